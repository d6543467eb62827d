#pragma once

#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace csf {

struct FlowTrace;

/// Raised for malformed inputs: vertex counts, ordering violations, bad parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the chart on which the ambient metric is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An analytic solution has left its interval of existence (circle or cap extinction).
class ExtinctionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for errors raised while time-stepping. csf_run annotates these with the
/// failure time and the trace recorded up to that point before rethrowing.
class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;

  double time = std::numeric_limits<double>::quiet_NaN();
  std::shared_ptr<const FlowTrace> partial_trace;
};

/// A boundary curve self-intersected, or the incoming state was not a valid annulus.
class DegenerateFlowError : public FlowError {
 public:
  using FlowError::FlowError;
};

/// The two boundary curves came closer than the separation floor, or a curve shrank to a point.
class AnnulusCollapseError : public FlowError {
 public:
  using FlowError::FlowError;
};

/// Least-squares boundary fit missed the declared tolerance.
class SolverAccuracyError : public std::runtime_error {
 public:
  SolverAccuracyError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}

  double residual;
};

/// Finite-difference grid too coarse to resolve the annulus.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Potential or gradient requested too close to a source singularity.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csf
