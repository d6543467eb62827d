#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "csflab/capacity.hpp"

namespace csf {
namespace {

enum class Node : unsigned char { Inner, Outer, Free };

// Sorted x-intercepts of a closed curve with the horizontal line at height y.
std::vector<double> row_crossings(const PolyCurved& c, double y) {
  std::vector<double> xs;
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) {
    Eigen::Vector2d a = c.vertex(i);
    Eigen::Vector2d b = a + c.edge(i);
    if (c.periodic()) {
      const double mid = 0.5 * (a.y() + b.y());
      const double shift = c.period * std::round((y - mid) / c.period);
      a.y() += shift;
      b.y() += shift;
    }
    if ((a.y() <= y) != (b.y() <= y)) xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

bool inside(const std::vector<double>& crossings, double x) {
  const auto above = crossings.end() - std::upper_bound(crossings.begin(), crossings.end(), x);
  return above % 2 == 1;
}

}  // namespace

CapacitySolution solve_capacity_fd(const NestedAnnulus& annulus, const SolverParams& params) {
  params.validate();
  validate_annulus(annulus);
  const bool periodic = annulus.ambient.period() > 0.0;

  // Square cells. Planar: grid_n cells across the longer side of the outer
  // bounding box plus a two-cell margin. Cylinder: grid_n cells around the circumference.
  const Vertices2<double> outer_walk = unwrapped_walk(annulus.outer);
  const Vertices2<double> inner_walk = unwrapped_walk(annulus.inner);
  double spacing, x0, y0;
  Eigen::Index nx, ny;
  if (periodic) {
    ny = params.grid_n;
    spacing = annulus.ambient.period() / static_cast<double>(ny);
    const double xmin = inner_walk.row(0).minCoeff();
    const double xmax = outer_walk.row(0).maxCoeff();
    x0 = xmin - 2.0 * spacing;
    nx = static_cast<Eigen::Index>(std::ceil((xmax - xmin) / spacing)) + 5;
    y0 = 0.0;
  } else {
    const Eigen::Vector2d lo = outer_walk.rowwise().minCoeff();
    const Eigen::Vector2d hi = outer_walk.rowwise().maxCoeff();
    spacing = (hi - lo).maxCoeff() / static_cast<double>(params.grid_n);
    x0 = lo.x() - 2.0 * spacing;
    y0 = lo.y() - 2.0 * spacing;
    nx = static_cast<Eigen::Index>(std::ceil((hi.x() - lo.x()) / spacing)) + 5;
    ny = static_cast<Eigen::Index>(std::ceil((hi.y() - lo.y()) / spacing)) + 5;
  }

  const double sep = min_separation(annulus.inner, annulus.outer);
  if (sep < 2.0 * spacing) {
    std::ostringstream os;
    os << "curve separation " << sep << " is below two grid cells (" << 2.0 * spacing << ")";
    throw ResolutionError(os.str());
  }

  std::vector<Node> node(static_cast<std::size_t>(nx * ny));
  auto at = [&](Eigen::Index i, Eigen::Index j) { return static_cast<std::size_t>(j * nx + i); };
  for (Eigen::Index j = 0; j < ny; ++j) {
    const double y = y0 + spacing * j;
    const auto in_cross = row_crossings(annulus.inner, y);
    const auto out_cross = row_crossings(annulus.outer, y);
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double x = x0 + spacing * i;
      node[at(i, j)] = inside(in_cross, x) ? Node::Inner : (inside(out_cross, x) ? Node::Free : Node::Outer);
    }
  }

  std::vector<Eigen::Index> unknown(node.size(), -1);
  Eigen::Index n_free = 0;
  for (std::size_t k = 0; k < node.size(); ++k)
    if (node[k] == Node::Free) unknown[k] = n_free++;
  if (n_free == 0) throw ResolutionError("grid has no interior nodes inside the annulus");

  // Right and up neighbours; each grid edge visited once. Returns false off-grid.
  auto neighbour = [&](Eigen::Index i, Eigen::Index j, int dir, Eigen::Index& ni, Eigen::Index& nj) {
    ni = i + (dir == 0 ? 1 : 0);
    nj = j + (dir == 1 ? 1 : 0);
    if (periodic) nj %= ny;
    return ni < nx && nj < ny;
  };
  auto value = [](Node n) { return n == Node::Outer ? 1.0 : 0.0; };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * n_free));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        Eigen::Index ni, nj;
        if (!neighbour(i, j, dir, ni, nj)) continue;
        const std::size_t p = at(i, j), q = at(ni, nj);
        const bool fp = node[p] == Node::Free, fq = node[q] == Node::Free;
        if (!fp && !fq) {
          if (node[p] != node[q]) throw ResolutionError("inner and outer boundary nodes are adjacent");
          continue;
        }
        if (fp) triplets.emplace_back(unknown[p], unknown[p], 1.0);
        if (fq) triplets.emplace_back(unknown[q], unknown[q], 1.0);
        if (fp && fq) {
          triplets.emplace_back(unknown[p], unknown[q], -1.0);
          triplets.emplace_back(unknown[q], unknown[p], -1.0);
        } else if (fp) {
          rhs(unknown[p]) += value(node[q]);
        } else {
          rhs(unknown[q]) += value(node[p]);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> L(n_free, n_free);
  L.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(static_cast<Eigen::Index>(20 * (nx + ny) + 1000));
  cg.compute(L);
  const Eigen::VectorXd u = cg.solve(rhs);

  auto u_at = [&](std::size_t k) { return node[k] == Node::Free ? u(unknown[k]) : value(node[k]); };
  double dirichlet = 0.0, flux = 0.0;
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        Eigen::Index ni, nj;
        if (!neighbour(i, j, dir, ni, nj)) continue;
        const std::size_t p = at(i, j), q = at(ni, nj);
        if (node[p] != Node::Free && node[q] != Node::Free) continue;
        const double d = u_at(q) - u_at(p);
        dirichlet += d * d;
        if (node[q] == Node::Outer) flux += d;
        if (node[p] == Node::Outer) flux -= d;
      }
    }
  }

  CapacitySolution sol;
  sol.coefficients.inner.resize(0);
  sol.coefficients.outer.resize(0);
  sol.E = 0.5 * dirichlet;
  sol.h = 1.0 / dirichlet;
  sol.flux = flux;
  sol.boundary_residual = cg.error();
  return sol;
}

}  // namespace csf
