#include "bmd/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace bmd {

RegularizerSpec RegularizerSpec::relative_entropy() {
  RegularizerSpec r;
  r.kind = RegKind::RelativeEntropy;
  return r;
}

RegularizerSpec RegularizerSpec::chi_squared() {
  RegularizerSpec r;
  r.kind = RegKind::ChiSquared;
  return r;
}

RegularizerSpec RegularizerSpec::entropic_ot(Eigen::MatrixXd cost, double kappa, int anchor) {
  if (kappa <= 0.0) throw InvalidMeasure("entropic OT requires kappa > 0");
  if (!cost.allFinite()) throw InvalidMeasure("entropic OT cost matrix must be finite");
  RegularizerSpec r;
  r.kind = RegKind::EntropicOT;
  r.cost = std::move(cost);
  r.kappa = kappa;
  r.anchor = anchor;
  return r;
}

namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf
  return m + std::log((v.array() - m).exp().sum());
}

// phi(a) = -kappa ln sum_j exp((psi_j - c(a,j))/kappa) rho_j
Eigen::VectorXd phi_from_psi(const RegularizerSpec& reg, const Eigen::VectorXd& psi,
                             const Eigen::VectorXd& rho) {
  const int n = static_cast<int>(rho.size());
  Eigen::VectorXd phi(n);
  Eigen::VectorXd log_rho = rho.array().log();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = (psi - reg.cost.row(i).transpose()) / reg.kappa + log_rho;
    phi(i) = -reg.kappa * log_sum_exp(e);
  }
  return phi;
}

// psi(a') = -kappa ln sum_i exp((phi_i - c(i,a'))/kappa) m_i; zero atoms drop out
Eigen::VectorXd psi_from_phi(const RegularizerSpec& reg, const Eigen::VectorXd& phi,
                             const Eigen::VectorXd& m) {
  const int n = static_cast<int>(m.size());
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd log_m(n);
  for (int i = 0; i < n; ++i) log_m(i) = m(i) > 0.0 ? std::log(m(i)) : neg_inf;
  Eigen::VectorXd psi(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = (phi - reg.cost.col(j)) / reg.kappa + log_m;
    psi(j) = -reg.kappa * log_sum_exp(e);
  }
  return psi;
}

double fixed_point_residual(const RegularizerSpec& reg, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& psi, const Eigen::VectorXd& m,
                            const Eigen::VectorXd& rho) {
  const double r1 = (phi - phi_from_psi(reg, psi, rho)).lpNorm<Eigen::Infinity>();
  const double r2 = (psi - psi_from_phi(reg, phi, m)).lpNorm<Eigen::Infinity>();
  return std::max(r1, r2);
}

// theta solving sum_i rho_i max(v_i - theta, 0) = 1; exact finite termination
double waterfill_threshold(const Eigen::VectorXd& v, const Eigen::VectorXd& rho) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
  double cum_rv = 0.0, cum_r = 0.0, theta = 0.0;
  for (int k = 0; k < n; ++k) {
    cum_rv += rho(idx[k]) * v(idx[k]);
    cum_r += rho(idx[k]);
    const double cand = (cum_rv - 1.0) / cum_r;
    if (k + 1 < n && v(idx[k + 1]) > cand) continue;
    theta = cand;
    break;
  }
  return theta;
}

}  // namespace

SinkhornResult sinkhorn_potentials(const RegularizerSpec& reg, const Measure& m,
                                   const SinkhornResult* warm_start) {
  if (reg.kind != RegKind::EntropicOT) {
    throw InvalidMeasure("sinkhorn_potentials requires an EntropicOT regulariser");
  }
  const int n = m.size();
  if (reg.cost.rows() != n || reg.cost.cols() != n) {
    throw InvalidMeasure("cost matrix shape does not match measure");
  }
  const Eigen::VectorXd& w = m.weights();
  const Eigen::VectorXd& rho = m.reference();

  Eigen::VectorXd psi = warm_start != nullptr && warm_start->psi.size() == n
                            ? warm_start->psi
                            : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd phi = phi_from_psi(reg, psi, rho);

  double damping = 1.0;
  double prev_res = std::numeric_limits<double>::infinity();
  int worsened = 0;
  SinkhornResult out;
  for (int it = 1; it <= reg.sinkhorn_max_iters; ++it) {
    Eigen::VectorXd psi_new = psi_from_phi(reg, phi, w);
    psi = damping * psi_new + (1.0 - damping) * psi;
    Eigen::VectorXd phi_new = phi_from_psi(reg, psi, rho);
    phi = damping * phi_new + (1.0 - damping) * phi;

    const double res = fixed_point_residual(reg, phi, psi, w, rho);
    if (res <= reg.sinkhorn_tol) {
      const double shift = phi(reg.anchor);
      phi.array() -= shift;
      psi.array() += shift;
      out.phi = phi;
      out.psi = psi;
      out.iterations = it;
      out.residual = res;
      return out;
    }
    if (res > prev_res) {
      if (++worsened >= 2) damping = 0.5;  // oscillation fallback
    } else {
      worsened = 0;
    }
    prev_res = res;
  }
  throw SinkhornDiverged("sinkhorn residual " + std::to_string(prev_res) +
                         " above tolerance after max iterations");
}

double h_value(const RegularizerSpec& reg, const Measure& m) {
  const Eigen::VectorXd& w = m.weights();
  const Eigen::VectorXd& rho = m.reference();
  switch (reg.kind) {
    case RegKind::RelativeEntropy: {
      double s = 0.0;
      for (int i = 0; i < m.size(); ++i) {
        if (w(i) > 0.0) s += w(i) * std::log(w(i) / rho(i));  // 0 ln 0 := 0
      }
      return s;
    }
    case RegKind::ChiSquared: {
      const Eigen::VectorXd d = m.densities();
      return 0.5 * ((d.array() - 1.0).square() * rho.array()).sum();
    }
    case RegKind::EntropicOT: {
      const SinkhornResult sr = sinkhorn_potentials(reg, m);
      return sr.phi.dot(w) + sr.psi.dot(rho);
    }
  }
  return 0.0;
}

Eigen::VectorXd flat_derivative_h(const RegularizerSpec& reg, const Measure& m) {
  const Eigen::VectorXd& w = m.weights();
  const Eigen::VectorXd& rho = m.reference();
  switch (reg.kind) {
    case RegKind::RelativeEntropy: {
      if (!m.strictly_positive()) {
        throw ZeroAtomInKL("relative entropy flat derivative needs strictly positive weights");
      }
      Eigen::VectorXd log_density = (w.array() / rho.array()).log();
      const double h = log_density.dot(w);
      return log_density.array() - h;
    }
    case RegKind::ChiSquared: {
      const Eigen::VectorXd d = m.densities();
      return d.array() - d.dot(w);
    }
    case RegKind::EntropicOT: {
      const SinkhornResult sr = sinkhorn_potentials(reg, m);
      return sr.phi.array() - sr.phi.dot(w);
    }
  }
  return Eigen::VectorXd::Zero(m.size());
}

double bregman(const RegularizerSpec& reg, const Measure& m_prime, const Measure& m) {
  if (!m_prime.same_reference(m)) {
    throw InvalidMeasure("bregman requires measures with the same reference");
  }
  const Eigen::VectorXd dh = flat_derivative_h(reg, m);
  return h_value(reg, m_prime) - h_value(reg, m) - dh.dot(m_prime.weights() - m.weights());
}

Measure h_prox(const RegularizerSpec& reg, const Eigen::VectorXd& coeffs, double tau,
               const Measure& start) {
  if (tau <= 0.0) throw InvalidMeasure("h_prox requires tau > 0");
  const Eigen::VectorXd& rho = start.reference();
  switch (reg.kind) {
    case RegKind::RelativeEntropy: {
      Eigen::VectorXd e = -coeffs / tau;
      e.array() -= e.maxCoeff();
      Eigen::VectorXd w = rho.array() * e.array().exp();
      w /= w.sum();
      return Measure(w, rho);
    }
    case RegKind::ChiSquared: {
      const Eigen::VectorXd v = (1.0 - coeffs.array() / tau).matrix();
      const double theta = waterfill_threshold(v, rho);
      Eigen::VectorXd w = ((v.array() - theta).max(0.0) * rho.array()).matrix();
      w /= w.sum();
      return Measure(w, rho);
    }
    case RegKind::EntropicOT: {
      // exponentiated-gradient descent in KL geometry on
      // F(m) = <coeffs, m> + tau h(m), gradient coeffs + tau dh/dm(m)
      Eigen::VectorXd w = start.weights();
      SinkhornResult ws;
      bool has_ws = false;
      double step = 1.0 / tau;
      double prev_vi = -std::numeric_limits<double>::infinity();
      int worsened = 0;
      for (int it = 0; it < reg.prox_max_iters; ++it) {
        const Measure cur(w, rho);
        const SinkhornResult sr = sinkhorn_potentials(reg, cur, has_ws ? &ws : nullptr);
        ws = sr;
        has_ws = true;
        Eigen::VectorXd grad_f = coeffs + tau * (sr.phi.array() - sr.phi.dot(w)).matrix();
        const double mean = grad_f.dot(w);
        const double vi = (grad_f.array() - mean).minCoeff();
        if (vi >= -reg.prox_tol) return cur;
        if (vi < prev_vi) {
          if (++worsened >= 3) {
            step *= 0.5;
            worsened = 0;
          }
        } else {
          worsened = 0;
        }
        prev_vi = vi;
        Eigen::VectorXd e = -step * grad_f;
        e.array() -= e.maxCoeff();
        w = (w.array() * e.array().exp()).matrix();
        w /= w.sum();
      }
      throw InnerSolveFailed("entropic OT prox did not reach the VI tolerance");
    }
  }
  return start;
}

Measure mirror_step(const RegularizerSpec& reg, const Measure& prior,
                    const Eigen::VectorXd& grad, double lambda) {
  if (!grad.allFinite()) throw InvalidMeasure("mirror_step gradient must be finite");
  if (lambda <= 0.0) throw InvalidMeasure("mirror_step requires lambda > 0");
  switch (reg.kind) {
    case RegKind::RelativeEntropy: {
      // closed form: prior-weighted softmax of -grad/lambda
      if (!prior.strictly_positive()) {
        throw ZeroAtomInKL("KL mirror step needs strictly positive prior weights");
      }
      Eigen::VectorXd e = -grad / lambda;
      e.array() -= e.maxCoeff();
      Eigen::VectorXd w = prior.weights().array() * e.array().exp();
      w /= w.sum();
      return Measure(w, prior.reference());
    }
    case RegKind::ChiSquared: {
      // weighted simplex projection of the target density prior - grad/lambda
      const Eigen::VectorXd v = prior.densities() - grad / lambda;
      const double theta = waterfill_threshold(v, prior.reference());
      Eigen::VectorXd w = ((v.array() - theta).max(0.0) * prior.reference().array()).matrix();
      w /= w.sum();
      return Measure(w, prior.reference());
    }
    case RegKind::EntropicOT: {
      const Eigen::VectorXd c = grad - lambda * flat_derivative_h(reg, prior);
      return h_prox(reg, c, lambda, prior);
    }
  }
  return prior;
}

double mirror_step_vi_residual(const RegularizerSpec& reg, const Measure& prior,
                               const Eigen::VectorXd& grad, double lambda,
                               const Measure& m_star) {
  const Eigen::VectorXd g =
      grad + lambda * (flat_derivative_h(reg, m_star) - flat_derivative_h(reg, prior));
  const double mean = g.dot(m_star.weights());
  return (g.array() - mean).minCoeff();
}

double three_point_check(const RegularizerSpec& reg, const Measure& prior,
                         const Eigen::VectorXd& grad, double lambda,
                         const Measure& m_probe) {
  const Measure m_star = mirror_step(reg, prior, grad, lambda);
  const double lhs = grad.dot(m_probe.weights() - prior.weights()) +
                     lambda * bregman(reg, m_probe, prior);
  const double rhs = grad.dot(m_star.weights() - prior.weights()) +
                     lambda * bregman(reg, m_probe, m_star) +
                     lambda * bregman(reg, m_star, prior);
  return lhs - rhs;
}

double bregman_of_bregman_check(const RegularizerSpec& reg, const Measure& nu,
                                const Measure& m_prime, const Measure& m) {
  // g := D_h(.|nu), flat derivative dh/dm(m,.) - dh/dm(nu,.)
  const double g_mp = bregman(reg, m_prime, nu);
  const double g_m = bregman(reg, m, nu);
  const Eigen::VectorXd dg = flat_derivative_h(reg, m) - flat_derivative_h(reg, nu);
  const double d_g = g_mp - g_m - dg.dot(m_prime.weights() - m.weights());
  return std::abs(d_g - bregman(reg, m_prime, m));
}

}  // namespace bmd
