#include "bmd/adjoint.hpp"

#include <cmath>

namespace bmd {

namespace {

// Dx H^0 at a node given its adjoint pair
Eigen::VectorXd dx_hamiltonian(const ModelCoefficients& model, double t,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& z, const Measure& m) {
  Eigen::VectorXd out = model.Dx_b(t, x, m).transpose() * y + model.Dx_f(t, x, m);
  const std::vector<Eigen::MatrixXd> dxs = model.Dx_sigma(t, x, m);
  for (int i = 0; i < model.state_dim(); ++i) out(i) += (dxs[i].transpose() * z).trace();
  return out;
}

}  // namespace

AdjointField solve_adjoint(const ScenarioTree& tree, const ModelCoefficients& model,
                           const ControlField& policy, const StateField& state) {
  const int d = model.state_dim();
  const int dp = model.noise_dim();
  AdjointField adj;
  adj.Y.first_level = 0;
  adj.Y.levels.resize(tree.n_steps + 1);
  adj.Z.first_level = 0;
  adj.Z.levels.resize(tree.n_steps);

  auto& leaves = adj.Y.levels[tree.n_steps];
  leaves.resize(tree.num_nodes(tree.n_steps));
  for (std::int64_t n = 0; n < tree.num_nodes(tree.n_steps); ++n) {
    leaves[n] = model.Dx_g(state.levels[tree.n_steps][n]);
  }

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  for (int l = tree.n_steps - 1; l >= 0; --l) {
    const double t = tree.time_of(l);
    adj.Y.levels[l].resize(tree.num_nodes(l));
    adj.Z.levels[l].resize(tree.num_nodes(l));
    const double p = 1.0 / tree.branching;
    for (std::int64_t n = 0; n < tree.num_nodes(l); ++n) {
      Eigen::VectorXd ey = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd z = Eigen::MatrixXd::Zero(d, dp);
      for (int br = 0; br < tree.branching; ++br) {
        const Eigen::VectorXd& yc = adj.Y.levels[l + 1][tree.child(n, br)];
        ey += p * yc;
        z += p * yc * tree.branch_increment(br).transpose();
      }
      z /= tree.dt;

      const Eigen::VectorXd& x = state.levels[l][n];
      const Measure& pi = policy.levels[l][n];
      // Y = E[Y_children] + dt (Dx_b' Y + tr(Dx_sigma' Z) + Dx_f): affine in Y
      Eigen::VectorXd rhs = ey + tree.dt * dx_hamiltonian(model, t, x,
                                                          Eigen::VectorXd::Zero(d), z, pi);
      const Eigen::MatrixXd lhs = eye - tree.dt * model.Dx_b(t, x, pi).transpose();
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
      Eigen::VectorXd y = lu.solve(rhs);
      if (!y.allFinite() || (lhs * y - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + rhs.norm())) {
        throw ImplicitStepDiverged("implicit adjoint step failed at level " + std::to_string(l));
      }
      adj.Y.levels[l][n] = std::move(y);
      adj.Z.levels[l][n] = std::move(z);
    }
  }
  return adj;
}

double hamiltonian_value(const ModelCoefficients& model, const RegularizerSpec& reg,
                         double tau, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                         const Measure& m) {
  double h = model.b(t, x, m).dot(y) + (model.sigma(t, x, m).transpose() * z).trace() +
             model.f(t, x, m);
  if (tau != 0.0) h += tau * h_value(reg, m);
  return h;
}

Eigen::VectorXd hamiltonian_flat_derivative(const ModelCoefficients& model,
                                            const RegularizerSpec& reg, double tau, double t,
                                            const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                            const Eigen::MatrixXd& z, const Measure& m) {
  const int n = model.actions().size();
  Eigen::VectorXd out(n);
  for (int a = 0; a < n; ++a) {
    out(a) = model.dm_b(t, x, m, a).dot(y) +
             (model.dm_sigma(t, x, m, a).transpose() * z).trace() + model.dm_f(t, x, m, a);
  }
  if (tau != 0.0) out += tau * flat_derivative_h(reg, m);
  return out;
}

double bmo_diagnostic(const ScenarioTree& tree, const AdjointField& adjoint) {
  // S(node) = E_node[sum_{levels >= l(node)} |Z|^2 dt], computed backward
  std::vector<double> s(tree.num_nodes(tree.n_steps), 0.0);
  double best = 0.0;
  const double p = 1.0 / tree.branching;
  for (int l = tree.n_steps - 1; l >= 0; --l) {
    std::vector<double> s_up(tree.num_nodes(l));
    for (std::int64_t n = 0; n < tree.num_nodes(l); ++n) {
      double acc = 0.0;
      for (int br = 0; br < tree.branching; ++br) acc += p * s[tree.child(n, br)];
      s_up[n] = adjoint.Z.levels[l][n].squaredNorm() * tree.dt + acc;
      best = std::max(best, s_up[n]);
    }
    s = std::move(s_up);
  }
  return std::sqrt(best);
}

double adjoint_identity_residual(const ScenarioTree& tree, const ModelCoefficients& model,
                                 const ControlField& policy, const StateField& state,
                                 const AdjointField& adjoint) {
  double worst = 0.0;
  const double p = 1.0 / tree.branching;
  for (int l = 0; l < tree.n_steps; ++l) {
    const double t = tree.time_of(l);
    for (std::int64_t n = 0; n < tree.num_nodes(l); ++n) {
      Eigen::VectorXd ey = Eigen::VectorXd::Zero(model.state_dim());
      for (int br = 0; br < tree.branching; ++br) {
        ey += p * adjoint.Y.levels[l + 1][tree.child(n, br)];
      }
      const Eigen::VectorXd res =
          adjoint.Y.levels[l][n] - ey -
          tree.dt * dx_hamiltonian(model, t, state.levels[l][n], adjoint.Y.levels[l][n],
                                   adjoint.Z.levels[l][n], policy.levels[l][n]);
      worst = std::max(worst, res.lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

}  // namespace bmd
