#include "csflab/annulus.hpp"

#include <string>

namespace csf {
namespace {

PolyCurved oriented(PolyCurved c, double period) {
  c.period = period;
  if (!c.closed) throw InvalidArgument("annulus boundary curves must be closed");
  if (period > 0.0) {
    const int w = winding_count(c);
    if (w == -1) return reversed(c);
    if (w != 1) throw InvalidArgument("cylinder boundary curves must wind once around the cylinder");
    return c;
  }
  return enclosed_area(c) < 0.0 ? reversed(c) : c;
}

void check_orientation(const PolyCurved& c, const char* which) {
  if (c.periodic()) {
    if (winding_count(c) != 1)
      throw InvalidArgument(std::string(which) + " curve must wind once upward around the cylinder");
  } else if (!(enclosed_area(c) > 0.0)) {
    throw InvalidArgument(std::string(which) + " curve must be counter-clockwise");
  }
}

}  // namespace

NestedAnnulus make_annulus(PolyCurved inner, PolyCurved outer, AmbientSurface ambient) {
  const double period = ambient.period();
  NestedAnnulus a{oriented(std::move(inner), period), oriented(std::move(outer), period), ambient};
  validate_annulus(a);
  return a;
}

void validate_annulus(const NestedAnnulus& a) {
  validate_curve(a.inner);
  validate_curve(a.outer);
  if (!a.inner.closed || !a.outer.closed) throw InvalidArgument("annulus boundary curves must be closed");
  const double period = a.ambient.period();
  if (a.inner.period != period || a.outer.period != period)
    throw InvalidArgument("curve period does not match the ambient chart");
  check_orientation(a.inner, "inner");
  check_orientation(a.outer, "outer");
  for (const PolyCurved* c : {&a.inner, &a.outer})
    for (Eigen::Index i = 0; i < c->size(); ++i) a.ambient.require_in_domain(c->vertex(i));

  if (!(min_separation(a.inner, a.outer) > 0.0)) throw InvalidArgument("annulus boundary curves intersect");
  // disjoint curves: one inner vertex decides nesting
  if (!contains(a.outer, Eigen::Vector2d(a.inner.vertex(0))))
    throw InvalidArgument("inner curve does not lie inside the outer curve");
}

double annulus_area(const NestedAnnulus& a) { return enclosed_area(a.outer) - enclosed_area(a.inner); }

Vertices2<double> annulus_normals(const NestedAnnulus& a, bool outer) {
  return outer ? vertex_normals(a.outer) : Vertices2<double>(-vertex_normals(a.inner));
}

}  // namespace csf
