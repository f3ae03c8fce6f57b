#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "bmd/adjoint.hpp"
#include "bmd/dynamics.hpp"

namespace bmd {

struct MirrorDescentConfig {
  RegularizerSpec reg;
  double tau = 0.0;
  double lambda = 4.0;
  bool lambda_auto = false;
  int max_iters = 200;
  /// stop when sum E D_h(pi^{n+1}|pi^n) dt falls below this
  double stop_tol = 1e-12;
  std::shared_ptr<const ModelCoefficients> model;
  double T = 1.0;
  int n_steps = 8;
  int d_prime = 1;
  bool single_branch = false;
  /// reference measure; empty means uniform over the model's actions
  Eigen::VectorXd reference;
  std::uint64_t seed = 0;
  int probe_pairs = 50;
  bool compute_oracle = true;

  Eigen::VectorXd effective_reference() const;
  void validate() const;
};

struct ConvergenceReport {
  double tau = 0.0;
  double lambda_used = 0.0;
  double theoretical_rate = 0.0;  // 1 - tau/lambda
  int iterations = 0;
  std::vector<double> cost;             // J^tau(pi^n), n = 0..iterations
  std::vector<double> step_divergence;  // sum E D_h(pi^{n+1}|pi^n) dt
  bool oracle_available = false;
  double oracle_cost = 0.0;
  double oracle_residual = 0.0;
  double bregman_initial = 0.0;           // D0 = sum E D_h(pi*|pi^0) dt
  std::vector<double> gap;                // J^tau(pi^n) - J^tau(pi*)
  std::vector<double> bregman_to_oracle;  // sum E D_h(pi*|pi^n) dt
  std::vector<double> rate_bound;         // lambda (1 - tau/lambda)^n D0
  int dissipation_violations = 0;
  double fitted_rate = 0.0;
  double fitted_intercept = 0.0;
  double fitted_r2 = 0.0;
  bool rate_fit_available = false;
  double wall_clock_seconds = 0.0;  // not serialised: reports stay byte-reproducible
};

struct ProbeReport {
  int pairs = 0;
  double l_hat = 0.0;
  int convexity_violations = 0;
  double min_convexity_margin = 0.0;
  int smoothness_violations = 0;
  double min_smoothness_margin = 0.0;
  int three_point_violations = 0;
  double min_three_point_residual = 0.0;
  bool convexity_audit_ok = true;
};

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// J^tau(policy): exact tree expectation of sum (f + tau h) dt + g(X_T).
double cost(const ScenarioTree& tree, const ModelCoefficients& model,
            const RegularizerSpec& reg, double tau, const ControlField& policy);

/// Gateaux derivative of J^0 at `policy` in direction `direction - policy`,
/// from a fresh adjoint solve.
double first_variation(const ScenarioTree& tree, const ModelCoefficients& model,
                       const ControlField& policy, const ControlField& direction);

/// Directional derivative of J^tau (adds the tau dh/dm term).
double first_variation_regularized(const ScenarioTree& tree, const ModelCoefficients& model,
                                   const RegularizerSpec& reg, double tau,
                                   const ControlField& policy, const ControlField& direction);

/// One Algorithm-1 sweep: forward state, backward adjoint, nodewise prox.
ControlField mirror_iterate(const ScenarioTree& tree, const ModelCoefficients& model,
                            const RegularizerSpec& reg, double tau, double lambda,
                            const ControlField& policy);

/// sum_l E[D_h(a|b)] dt over decision levels.
double integrated_bregman(const ScenarioTree& tree, const RegularizerSpec& reg,
                          const ControlField& a, const ControlField& b);

/// Doubling search for the smallest step constant with monotone descent and
/// valid smoothness margins on probe pairs.
double calibrate_lambda(const MirrorDescentConfig& config, const ScenarioTree& tree);

ConvergenceReport run_mirror_descent(const MirrorDescentConfig& config);

/// tau > 0: damped Pontryagin fixed point with a residual certificate.
/// tau = 0: grid search over nodewise simplex grids (small instances only).
ControlField oracle_optimal_control(const MirrorDescentConfig& config,
                                    const ScenarioTree& tree, double* residual_out = nullptr);

ProbeReport theorem_probes(const MirrorDescentConfig& config, const ScenarioTree& tree,
                           double l_hat, int pairs);

/// Least-squares geometric fit of the gap sequence on the window gap > 1e-12.
RateFit fit_rate(const std::vector<double>& gaps);

/// Strictly positive random measure (normalised exponentials), for probes.
Measure random_measure(const Eigen::VectorXd& reference, std::mt19937_64& rng);
ControlField random_policy(const ScenarioTree& tree, const Eigen::VectorXd& reference,
                           std::mt19937_64& rng);

}  // namespace bmd
