#pragma once

#include <stdexcept>
#include <string>

namespace calr {

/// Invalid argument values (angles, radii, |l| > k, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation was called outside the hypothesis it implements, e.g. a
/// test family applied to a configuration it was not built for.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The per-degree transmission problem has no unique solution (plasmonic
/// resonance of that degree at zero loss, or numerical singularity).
class ModeSingularity : public std::runtime_error {
 public:
  ModeSingularity(int degree, double condition, const std::string& detail);

  [[nodiscard]] int degree() const { return degree_; }
  /// Conditioning estimate of the interface system (inf if exactly singular).
  [[nodiscard]] double condition() const { return condition_; }

 private:
  int degree_;
  double condition_;
};

/// The finite-difference radial oracle did not show grid convergence.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A source spectrum too short to classify.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace calr
