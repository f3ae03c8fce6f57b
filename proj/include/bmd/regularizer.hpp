#pragma once

#include <Eigen/Dense>
#include <optional>

#include "bmd/measure.hpp"

namespace bmd {

enum class RegKind { RelativeEntropy, ChiSquared, EntropicOT };

/// Convex regulariser h on the simplex together with the parameters of its
/// mirror-step solvers. The entropic-OT variant carries the ground cost,
/// the temperature kappa and the anchor atom that pins the Schroedinger
/// potential phi (phi(anchor) = 0).
struct RegularizerSpec {
  RegKind kind = RegKind::RelativeEntropy;

  // EntropicOT only
  Eigen::MatrixXd cost;  // N x N
  double kappa = 1.0;
  int anchor = 0;
  double sinkhorn_tol = 1e-10;
  int sinkhorn_max_iters = 5000;
  double prox_tol = 1e-8;
  int prox_max_iters = 10000;

  static RegularizerSpec relative_entropy();
  static RegularizerSpec chi_squared();
  static RegularizerSpec entropic_ot(Eigen::MatrixXd cost, double kappa, int anchor = 0);
};

struct SinkhornResult {
  Eigen::VectorXd phi;  // potential on the first marginal, phi(anchor) = 0
  Eigen::VectorXd psi;  // potential on the second marginal (the reference)
  int iterations = 0;
  double residual = 0.0;
};

/// Solve the coupled log-sum-exp fixed point for the potentials of the
/// entropic transport cost from m to its reference. Zero atoms of m drop
/// out of the psi update. Warm starting is used by the iterative prox.
SinkhornResult sinkhorn_potentials(const RegularizerSpec& reg, const Measure& m,
                                   const SinkhornResult* warm_start = nullptr);

/// h(m). For entropic OT this is the converged dual value
/// int phi dm + int psi d(reference).
double h_value(const RegularizerSpec& reg, const Measure& m);

/// Centered flat derivative of h at m: sums to zero against m.
Eigen::VectorXd flat_derivative_h(const RegularizerSpec& reg, const Measure& m);

/// D_h(m'|m) from the definition h(m') - h(m) - <dh/dm(m), m'-m>.
double bregman(const RegularizerSpec& reg, const Measure& m_prime, const Measure& m);

/// argmin over the simplex of <grad, m - prior> + lambda * D_h(m|prior).
Measure mirror_step(const RegularizerSpec& reg, const Measure& prior,
                    const Eigen::VectorXd& grad, double lambda);

/// argmin over the simplex of <coeffs, m> + tau * h(m). The mirror step and
/// the Hamiltonian minimisation of the Pontryagin oracle both reduce to this.
/// `start` supplies the reference and the initial point of the entropic-OT
/// inner loop.
Measure h_prox(const RegularizerSpec& reg, const Eigen::VectorXd& coeffs, double tau,
               const Measure& start);

/// Variational-inequality residual of m_star for the mirror-step objective:
/// min over vertices e_i of <grad + lambda (dh/dm(m_star) - dh/dm(prior)), e_i - m_star>.
/// Nonnegative (up to tolerance) iff m_star is optimal.
double mirror_step_vi_residual(const RegularizerSpec& reg, const Measure& prior,
                               const Eigen::VectorXd& grad, double lambda,
                               const Measure& m_star);

/// Slack of the three point lemma at the prox point m* = mirror_step(...):
/// G(m') + D_h(m'|prior) - G(m*) - D_h(m'|m*) - D_h(m*|prior)
/// with G(m) = <grad, m - prior>/lambda, all scaled by lambda. Nonnegative.
double three_point_check(const RegularizerSpec& reg, const Measure& prior,
                         const Eigen::VectorXd& grad, double lambda,
                         const Measure& m_probe);

/// |D_{D_h(.|nu)}(m'|m) - D_h(m'|m)|, with the Bregman-of-Bregman divergence
/// built from the flat derivative dh/dm(m,.) - dh/dm(nu,.).
double bregman_of_bregman_check(const RegularizerSpec& reg, const Measure& nu,
                                const Measure& m_prime, const Measure& m);

}  // namespace bmd
