#include "bmd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmd {

std::vector<Eigen::MatrixXd> ModelCoefficients::Dx_sigma(double, const Eigen::VectorXd&,
                                                         const Measure&) const {
  return std::vector<Eigen::MatrixXd>(state_dim(),
                                      Eigen::MatrixXd::Zero(state_dim(), noise_dim()));
}

Eigen::MatrixXd ModelCoefficients::dm_sigma(double, const Eigen::VectorXd&, const Measure&,
                                            int) const {
  return Eigen::MatrixXd::Zero(state_dim(), noise_dim());
}

Eigen::MatrixXd ModelCoefficients::Dx_dm_b(double, const Eigen::VectorXd&, const Measure&,
                                           int) const {
  return Eigen::MatrixXd::Zero(state_dim(), state_dim());
}

std::vector<Eigen::MatrixXd> ModelCoefficients::Dx_dm_sigma(double, const Eigen::VectorXd&,
                                                            const Measure&, int) const {
  return std::vector<Eigen::MatrixXd>(state_dim(),
                                      Eigen::MatrixXd::Zero(state_dim(), noise_dim()));
}

Eigen::VectorXd ModelCoefficients::Dx_dm_f(double, const Eigen::VectorXd&, const Measure&,
                                           int) const {
  return Eigen::VectorXd::Zero(state_dim());
}

Eigen::VectorXd ModelCoefficients::d2m_b(double, const Eigen::VectorXd&, const Measure&, int,
                                         int) const {
  return Eigen::VectorXd::Zero(state_dim());
}

double ModelCoefficients::d2m_f(double, const Eigen::VectorXd&, const Measure&, int,
                                int) const {
  return 0.0;
}

LqParams LqParams::scalar(double beta, double B, double sigma0, double Q, double R, double G,
                          double x0) {
  LqParams p;
  p.beta = Eigen::MatrixXd::Constant(1, 1, beta);
  p.B = Eigen::MatrixXd::Constant(1, 1, B);
  p.sigma0 = Eigen::MatrixXd::Constant(1, 1, sigma0);
  p.Q = Eigen::MatrixXd::Constant(1, 1, Q);
  p.R = Eigen::MatrixXd::Constant(1, 1, R);
  p.G = Eigen::MatrixXd::Constant(1, 1, G);
  p.x0 = Eigen::VectorXd::Constant(1, x0);
  return p;
}

namespace {

void require_psd(const Eigen::MatrixXd& M, const char* name) {
  if ((M - M.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) {
    throw InvalidMeasure(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.eigenvalues().minCoeff() < -1e-12) {
    throw InvalidMeasure(std::string(name) + " must be positive semidefinite");
  }
}

}  // namespace

LqModel::LqModel(LqParams params, ActionSpace actions)
    : params_(std::move(params)), actions_(std::move(actions)) {
  require_psd(params_.Q, "Q");
  require_psd(params_.R, "R");
  require_psd(params_.G, "G");
  if (params_.B.cols() != actions_.dim()) {
    throw InvalidMeasure("B column count must match action dimension");
  }
}

Eigen::VectorXd LqModel::mean_action(const Measure& m) const {
  return actions_.points * m.weights();
}

double LqModel::mean_action_cost(const Measure& m) const {
  double s = 0.0;
  for (int i = 0; i < actions_.size(); ++i) {
    const Eigen::VectorXd a = actions_.action(i);
    s += m.weight(i) * a.dot(params_.R * a);
  }
  return s;
}

Eigen::VectorXd LqModel::b(double, const Eigen::VectorXd& x, const Measure& m) const {
  return params_.beta * x + params_.B * mean_action(m);
}

Eigen::MatrixXd LqModel::sigma(double, const Eigen::VectorXd&, const Measure& m) const {
  Eigen::MatrixXd s = params_.sigma0;
  if (!params_.sigma_gain.empty()) {
    const Eigen::VectorXd abar = mean_action(m);
    for (std::size_t l = 0; l < params_.sigma_gain.size(); ++l) {
      s += abar(static_cast<int>(l)) * params_.sigma_gain[l];
    }
  }
  return s;
}

double LqModel::f(double, const Eigen::VectorXd& x, const Measure& m) const {
  return 0.5 * x.dot(params_.Q * x) + 0.5 * mean_action_cost(m);
}

double LqModel::g(const Eigen::VectorXd& x) const { return 0.5 * x.dot(params_.G * x); }

Eigen::MatrixXd LqModel::Dx_b(double, const Eigen::VectorXd&, const Measure&) const {
  return params_.beta;
}

Eigen::VectorXd LqModel::Dx_f(double, const Eigen::VectorXd& x, const Measure&) const {
  return params_.Q * x;
}

Eigen::VectorXd LqModel::Dx_g(const Eigen::VectorXd& x) const { return params_.G * x; }

Eigen::VectorXd LqModel::dm_b(double, const Eigen::VectorXd&, const Measure& m,
                              int action) const {
  return params_.B * (actions_.action(action) - mean_action(m));
}

Eigen::MatrixXd LqModel::dm_sigma(double, const Eigen::VectorXd&, const Measure& m,
                                  int action) const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(state_dim(), noise_dim());
  if (!params_.sigma_gain.empty()) {
    const Eigen::VectorXd diff = actions_.action(action) - mean_action(m);
    for (std::size_t l = 0; l < params_.sigma_gain.size(); ++l) {
      s += diff(static_cast<int>(l)) * params_.sigma_gain[l];
    }
  }
  return s;
}

double LqModel::dm_f(double, const Eigen::VectorXd&, const Measure& m, int action) const {
  const Eigen::VectorXd a = actions_.action(action);
  return 0.5 * a.dot(params_.R * a) - 0.5 * mean_action_cost(m);
}

Eigen::VectorXd LqModel::d2m_b(double, const Eigen::VectorXd&, const Measure& m, int,
                               int action2) const {
  // b is linear in m, so the second flat derivative is the (centered)
  // negative of the first derivative's m-dependence
  return -params_.B * (actions_.action(action2) - mean_action(m));
}

double LqModel::d2m_f(double, const Eigen::VectorXd&, const Measure& m, int,
                      int action2) const {
  const Eigen::VectorXd a2 = actions_.action(action2);
  return -(0.5 * a2.dot(params_.R * a2) - 0.5 * mean_action_cost(m));
}

ControlField constant_policy(const ScenarioTree& tree, const Measure& m) {
  ControlField policy;
  policy.first_level = 0;
  policy.levels.resize(tree.n_steps);
  for (int l = 0; l < tree.n_steps; ++l) {
    policy.levels[l].assign(tree.num_nodes(l), m);
  }
  return policy;
}

StateField simulate_state(const ScenarioTree& tree, const ModelCoefficients& model,
                          const ControlField& policy) {
  if (static_cast<int>(policy.levels.size()) != tree.n_steps || policy.first_level != 0) {
    throw LevelMismatch("policy must cover levels 0..n_steps-1");
  }
  StateField x;
  x.first_level = 0;
  x.levels.resize(tree.n_steps + 1);
  x.levels[0] = {model.initial_state()};
  for (int l = 0; l < tree.n_steps; ++l) {
    const double t = tree.time_of(l);
    x.levels[l + 1].resize(tree.num_nodes(l + 1));
    for (std::int64_t n = 0; n < tree.num_nodes(l); ++n) {
      const Eigen::VectorXd& xn = x.levels[l][n];
      const Measure& pi = policy.levels[l][n];
      const Eigen::VectorXd drift = model.b(t, xn, pi);
      const Eigen::MatrixXd diff = model.sigma(t, xn, pi);
      for (int br = 0; br < tree.branching; ++br) {
        Eigen::VectorXd next = xn + drift * tree.dt + diff * tree.branch_increment(br);
        if (!next.allFinite()) throw NonFiniteState("state overflow during simulation");
        x.levels[l + 1][tree.child(n, br)] = std::move(next);
      }
    }
  }
  return x;
}

NodeField<Eigen::VectorXd> sensitivity_process(const ScenarioTree& tree,
                                               const ModelCoefficients& model,
                                               const ControlField& policy_from,
                                               const ControlField& policy_to,
                                               const StateField& state) {
  const int d = model.state_dim();
  NodeField<Eigen::VectorXd> v;
  v.first_level = 0;
  v.levels.resize(tree.n_steps + 1);
  v.levels[0] = {Eigen::VectorXd::Zero(d)};
  for (int l = 0; l < tree.n_steps; ++l) {
    const double t = tree.time_of(l);
    v.levels[l + 1].resize(tree.num_nodes(l + 1));
    for (std::int64_t n = 0; n < tree.num_nodes(l); ++n) {
      const Eigen::VectorXd& xn = state.levels[l][n];
      const Eigen::VectorXd& vn = v.levels[l][n];
      const Measure& pi = policy_from.levels[l][n];
      const Measure& pi2 = policy_to.levels[l][n];
      const Eigen::VectorXd dw_weights = pi2.weights() - pi.weights();

      Eigen::VectorXd drift = model.Dx_b(t, xn, pi) * vn;
      Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(d, model.noise_dim());
      const std::vector<Eigen::MatrixXd> dxs = model.Dx_sigma(t, xn, pi);
      for (int i = 0; i < d; ++i) diff += vn(i) * dxs[i];
      for (int a = 0; a < model.actions().size(); ++a) {
        if (dw_weights(a) == 0.0) continue;
        drift += dw_weights(a) * model.dm_b(t, xn, pi, a);
        diff += dw_weights(a) * model.dm_sigma(t, xn, pi, a);
      }
      for (int br = 0; br < tree.branching; ++br) {
        v.levels[l + 1][tree.child(n, br)] =
            vn + drift * tree.dt + diff * tree.branch_increment(br);
      }
    }
  }
  return v;
}

AuditReport assumption_audit(const ModelCoefficients& model, const RegularizerSpec& reg,
                             const std::vector<Eigen::VectorXd>& sample_states,
                             const std::vector<Measure>& sample_measures) {
  AuditReport rep;
  const int d = model.state_dim();
  const int dp = model.noise_dim();
  const int n_actions = model.actions().size();
  const double t = 0.0;

  // centering of the measure derivatives
  for (const auto& x : sample_states) {
    for (const auto& m : sample_measures) {
      Eigen::VectorXd cb = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd cs = Eigen::MatrixXd::Zero(d, dp);
      double cf = 0.0;
      for (int a = 0; a < n_actions; ++a) {
        cb += m.weight(a) * model.dm_b(t, x, m, a);
        cs += m.weight(a) * model.dm_sigma(t, x, m, a);
        cf += m.weight(a) * model.dm_f(t, x, m, a);
      }
      double viol = std::max({cb.lpNorm<Eigen::Infinity>(), cs.lpNorm<Eigen::Infinity>(),
                              std::abs(cf)});
      rep.max_centering_violation = std::max(rep.max_centering_violation, viol);
    }
  }

  // dm_sigma must not depend on m (second flat derivative of sigma vanishes);
  // compare centered differences, which are invariant to the centering shift
  for (const auto& x : sample_states) {
    for (std::size_t i = 0; i + 1 < sample_measures.size(); ++i) {
      for (std::size_t j = i + 1; j < sample_measures.size(); ++j) {
        for (int a = 1; a < n_actions; ++a) {
          const Eigen::MatrixXd d1 = model.dm_sigma(t, x, sample_measures[i], a) -
                                     model.dm_sigma(t, x, sample_measures[i], 0);
          const Eigen::MatrixXd d2 = model.dm_sigma(t, x, sample_measures[j], a) -
                                     model.dm_sigma(t, x, sample_measures[j], 0);
          rep.max_dm_sigma_dependence =
              std::max(rep.max_dm_sigma_dependence, (d1 - d2).lpNorm<Eigen::Infinity>());
        }
      }
    }
  }
  rep.dm_sigma_constant = rep.max_dm_sigma_dependence <= 1e-9;

  // Lipschitz ratios |phi(x,m)-phi(x',m')|^2 / (|x-x'|^2 + D_h(m|m'))
  for (std::size_t si = 0; si < sample_states.size(); ++si) {
    for (std::size_t sj = 0; sj < sample_states.size(); ++sj) {
      for (std::size_t mi = 0; mi < sample_measures.size(); ++mi) {
        for (std::size_t mj = 0; mj < sample_measures.size(); ++mj) {
          if (si == sj && mi == mj) continue;
          const Eigen::VectorXd& x = sample_states[si];
          const Eigen::VectorXd& x2 = sample_states[sj];
          const Measure& m = sample_measures[mi];
          const Measure& m2 = sample_measures[mj];
          double dh;
          try {
            dh = bregman(reg, m, m2);
          } catch (const ZeroAtomInKL&) {
            continue;
          }
          const double denom = (x - x2).squaredNorm() + std::max(dh, 0.0);
          if (denom < 1e-14) continue;
          const double num = (model.b(t, x, m) - model.b(t, x2, m2)).squaredNorm() +
                             (model.sigma(t, x, m) - model.sigma(t, x2, m2)).squaredNorm();
          rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, num / denom);
        }
      }
    }
  }

  // convexity of g and of (x, m) -> H^0 at probe adjoint values
  std::vector<Eigen::VectorXd> ys = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d),
                                     Eigen::VectorXd::Constant(d, -0.7)};
  std::vector<Eigen::MatrixXd> zs = {Eigen::MatrixXd::Zero(d, dp),
                                     Eigen::MatrixXd::Ones(d, dp) * 0.5};
  auto h0 = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                const Measure& m) {
    return model.b(t, x, m).dot(y) + (model.sigma(t, x, m).transpose() * z).trace() +
           model.f(t, x, m);
  };
  rep.min_hamiltonian_convexity_gap = std::numeric_limits<double>::infinity();
  rep.min_g_convexity_gap = std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < sample_states.size(); ++si) {
    for (std::size_t sj = 0; sj < sample_states.size(); ++sj) {
      const Eigen::VectorXd& x = sample_states[si];
      const Eigen::VectorXd& x2 = sample_states[sj];
      const double ggap = model.g(x2) - model.g(x) - model.Dx_g(x).dot(x2 - x);
      rep.min_g_convexity_gap = std::min(rep.min_g_convexity_gap, ggap);
      for (std::size_t mi = 0; mi < sample_measures.size(); ++mi) {
        for (std::size_t mj = 0; mj < sample_measures.size(); ++mj) {
          const Measure& m = sample_measures[mi];
          const Measure& m2 = sample_measures[mj];
          for (const auto& y : ys) {
            for (const auto& z : zs) {
              Eigen::VectorXd dx_h = model.Dx_b(t, x, m).transpose() * y + model.Dx_f(t, x, m);
              const std::vector<Eigen::MatrixXd> dxs = model.Dx_sigma(t, x, m);
              for (int i = 0; i < d; ++i) dx_h(i) += (dxs[i].transpose() * z).trace();
              double first_order = dx_h.dot(x2 - x);
              for (int a = 0; a < n_actions; ++a) {
                const double dw = m2.weight(a) - m.weight(a);
                if (dw == 0.0) continue;
                first_order += dw * (model.dm_b(t, x, m, a).dot(y) +
                                     (model.dm_sigma(t, x, m, a).transpose() * z).trace() +
                                     model.dm_f(t, x, m, a));
              }
              const double gap = h0(x2, y, z, m2) - h0(x, y, z, m) - first_order;
              rep.min_hamiltonian_convexity_gap =
                  std::min(rep.min_hamiltonian_convexity_gap, gap);
            }
          }
        }
      }
    }
  }
  rep.convexity_ok = rep.min_hamiltonian_convexity_gap >= -1e-9 && rep.min_g_convexity_gap >= -1e-9;
  return rep;
}

}  // namespace bmd
