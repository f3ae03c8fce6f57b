#include "bmd/measure.hpp"

#include <cmath>

namespace bmd {

namespace {
constexpr double kSumTol = 1e-12;
}

ActionSpace::ActionSpace(Eigen::MatrixXd pts) : points(std::move(pts)) {
  if (points.cols() < 1) throw InvalidMeasure("action space must contain at least one point");
  for (int i = 0; i < points.cols(); ++i) {
    for (int j = i + 1; j < points.cols(); ++j) {
      if ((points.col(i) - points.col(j)).norm() == 0.0) {
        throw InvalidMeasure("action space points must be distinct");
      }
    }
  }
}

ActionSpace ActionSpace::linspace(double lo, double hi, int n) {
  Eigen::MatrixXd pts(1, n);
  if (n == 1) {
    pts(0, 0) = lo;
  } else {
    for (int i = 0; i < n; ++i) pts(0, i) = lo + (hi - lo) * i / (n - 1);
  }
  return ActionSpace(pts);
}

Measure::Measure(Eigen::VectorXd weights, Eigen::VectorXd reference)
    : weights_(std::move(weights)), reference_(std::move(reference)) {
  if (weights_.size() != reference_.size() || weights_.size() == 0) {
    throw InvalidMeasure("weights and reference must have equal, positive length");
  }
  if (!weights_.allFinite() || !reference_.allFinite()) {
    throw InvalidMeasure("non-finite entries in measure");
  }
  if (weights_.minCoeff() < 0.0) throw InvalidMeasure("negative weight");
  if (reference_.minCoeff() <= 0.0) throw InvalidMeasure("reference weights must be strictly positive");
  if (std::abs(weights_.sum() - 1.0) > kSumTol) throw InvalidMeasure("weights do not sum to 1");
  if (std::abs(reference_.sum() - 1.0) > kSumTol) throw InvalidMeasure("reference does not sum to 1");
}

bool Measure::same_reference(const Measure& other, double tol) const {
  if (other.size() != size()) return false;
  return (reference_ - other.reference_).lpNorm<Eigen::Infinity>() <= tol;
}

Measure Measure::reference_measure(const Eigen::VectorXd& reference) {
  return Measure(reference, reference);
}

Measure Measure::uniform(int n) {
  Eigen::VectorXd r = Eigen::VectorXd::Constant(n, 1.0 / n);
  // renormalise exactly so the validity check is immune to 1/n rounding
  r /= r.sum();
  return Measure(r, r);
}

double total_variation(const Measure& a, const Measure& b) {
  return 0.5 * (a.weights() - b.weights()).lpNorm<1>();
}

}  // namespace bmd
