#pragma once

#include <Eigen/Dense>

#include "bmd/dynamics.hpp"

namespace bmd {

/// Costate pair: Y on levels 0..n_steps, Z on decision levels 0..n_steps-1.
struct AdjointField {
  NodeField<Eigen::VectorXd> Y;
  NodeField<Eigen::MatrixXd> Z;
};

/// Exact backward sweep of the adjoint equation on the tree.
/// Y(leaf) = Dx_g(X(leaf)); Z from the conditional covariance of the
/// children's Y with the branch increments; the per-node implicit Euler
/// step for Y solved as a d-dimensional linear system (the driver gradient
/// is affine in (Y, Z) for every coefficient interface shipped here).
AdjointField solve_adjoint(const ScenarioTree& tree, const ModelCoefficients& model,
                           const ControlField& policy, const StateField& state);

/// H^tau(t, x, y, z, m) = b.y + tr(sigma' z) + f + tau h(m).
double hamiltonian_value(const ModelCoefficients& model, const RegularizerSpec& reg,
                         double tau, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                         const Measure& m);

/// Centered flat derivative of H^tau in the measure, one entry per action:
/// dm_b.y + tr(dm_sigma' z) + dm_f + tau dh/dm.
Eigen::VectorXd hamiltonian_flat_derivative(const ModelCoefficients& model,
                                            const RegularizerSpec& reg, double tau, double t,
                                            const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                            const Eigen::MatrixXd& z, const Measure& m);

/// Discrete BMO norm of the Z process over node-indexed stopping times:
/// max over nodes of sqrt(E_node[sum of |Z|^2 dt from the node's level on]).
/// A lower bound for the stopping-time essential supremum; diagnostic only.
double bmo_diagnostic(const ScenarioTree& tree, const AdjointField& adjoint);

/// Max violation of the discrete backward identity
/// Y(node) = E_node[Y(children)] + dt DxH0(node) over all interior nodes.
double adjoint_identity_residual(const ScenarioTree& tree, const ModelCoefficients& model,
                                 const ControlField& policy, const StateField& state,
                                 const AdjointField& adjoint);

}  // namespace bmd
