#pragma once

#include <Eigen/Dense>

#include "bmd/errors.hpp"

namespace bmd {

/// Finite action set: one action (a real vector of dimension k) per column.
struct ActionSpace {
  Eigen::MatrixXd points;  // k x N

  ActionSpace() = default;
  explicit ActionSpace(Eigen::MatrixXd pts);

  int size() const { return static_cast<int>(points.cols()); }
  int dim() const { return static_cast<int>(points.rows()); }
  Eigen::VectorXd action(int i) const { return points.col(i); }

  /// N equally spaced scalar actions on [lo, hi].
  static ActionSpace linspace(double lo, double hi, int n);
};

/// Probability vector over a finite action set, carrying the strictly
/// positive reference measure against which densities are taken.
class Measure {
 public:
  Measure(Eigen::VectorXd weights, Eigen::VectorXd reference);

  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& reference() const { return reference_; }
  int size() const { return static_cast<int>(weights_.size()); }

  double weight(int i) const { return weights_(i); }
  Eigen::VectorXd densities() const { return weights_.cwiseQuotient(reference_); }

  bool same_reference(const Measure& other, double tol = 1e-12) const;
  bool strictly_positive() const { return weights_.minCoeff() > 0.0; }

  /// The reference measure itself as a Measure.
  static Measure reference_measure(const Eigen::VectorXd& reference);
  /// Uniform reference over n atoms.
  static Measure uniform(int n);

 private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd reference_;
};

/// Total variation distance between two measures on the same atoms.
double total_variation(const Measure& a, const Measure& b);

}  // namespace bmd
