#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "bmd/measure.hpp"
#include "bmd/regularizer.hpp"
#include "bmd/scenario_tree.hpp"

namespace bmd {

using ControlField = NodeField<Measure>;
using StateField = NodeField<Eigen::VectorXd>;

/// Model coefficients b, sigma, f, g with analytic x- and measure-derivatives.
/// All dm_* derivatives are centered flat derivatives: they integrate to zero
/// against the measure they are evaluated at. Evaluators must be pure.
class ModelCoefficients {
 public:
  virtual ~ModelCoefficients() = default;

  virtual int state_dim() const = 0;
  virtual int noise_dim() const = 0;
  virtual Eigen::VectorXd initial_state() const = 0;
  virtual const ActionSpace& actions() const = 0;

  virtual Eigen::VectorXd b(double t, const Eigen::VectorXd& x, const Measure& m) const = 0;
  virtual Eigen::MatrixXd sigma(double t, const Eigen::VectorXd& x, const Measure& m) const = 0;
  virtual double f(double t, const Eigen::VectorXd& x, const Measure& m) const = 0;
  virtual double g(const Eigen::VectorXd& x) const = 0;

  virtual Eigen::MatrixXd Dx_b(double t, const Eigen::VectorXd& x, const Measure& m) const = 0;
  /// Dx_sigma[i] is the derivative of sigma with respect to x_i (d x d').
  virtual std::vector<Eigen::MatrixXd> Dx_sigma(double t, const Eigen::VectorXd& x,
                                                const Measure& m) const;
  virtual Eigen::VectorXd Dx_f(double t, const Eigen::VectorXd& x, const Measure& m) const = 0;
  virtual Eigen::VectorXd Dx_g(const Eigen::VectorXd& x) const = 0;

  virtual Eigen::VectorXd dm_b(double t, const Eigen::VectorXd& x, const Measure& m,
                               int action) const = 0;
  virtual Eigen::MatrixXd dm_sigma(double t, const Eigen::VectorXd& x, const Measure& m,
                                   int action) const;
  virtual double dm_f(double t, const Eigen::VectorXd& x, const Measure& m,
                      int action) const = 0;

  // mixed and second flat derivatives, used by the assumption audit only
  virtual Eigen::MatrixXd Dx_dm_b(double t, const Eigen::VectorXd& x, const Measure& m,
                                  int action) const;
  virtual std::vector<Eigen::MatrixXd> Dx_dm_sigma(double t, const Eigen::VectorXd& x,
                                                   const Measure& m, int action) const;
  virtual Eigen::VectorXd Dx_dm_f(double t, const Eigen::VectorXd& x, const Measure& m,
                                  int action) const;
  virtual Eigen::VectorXd d2m_b(double t, const Eigen::VectorXd& x, const Measure& m,
                                int action, int action2) const;
  virtual double d2m_f(double t, const Eigen::VectorXd& x, const Measure& m, int action,
                       int action2) const;
};

/// Linear-quadratic benchmark: b = beta x + B abar(m), f = x'Qx/2 + int a'Ra/2 dm,
/// g = x'Gx/2, diffusion sigma0 plus an optional part linear in abar(m).
struct LqParams {
  Eigen::MatrixXd beta;    // d x d
  Eigen::MatrixXd B;       // d x k
  Eigen::MatrixXd sigma0;  // d x d'
  Eigen::MatrixXd Q;       // d x d, PSD
  Eigen::MatrixXd R;       // k x k, PSD
  Eigen::MatrixXd G;       // d x d, PSD
  Eigen::VectorXd x0;
  /// sigma_gain[l] (d x d') multiplies component l of the mean action.
  std::vector<Eigen::MatrixXd> sigma_gain;

  static LqParams scalar(double beta, double B, double sigma0, double Q, double R, double G,
                         double x0);
};

class LqModel : public ModelCoefficients {
 public:
  LqModel(LqParams params, ActionSpace actions);

  int state_dim() const override { return static_cast<int>(params_.x0.size()); }
  int noise_dim() const override { return static_cast<int>(params_.sigma0.cols()); }
  Eigen::VectorXd initial_state() const override { return params_.x0; }
  const ActionSpace& actions() const override { return actions_; }
  const LqParams& params() const { return params_; }

  Eigen::VectorXd b(double t, const Eigen::VectorXd& x, const Measure& m) const override;
  Eigen::MatrixXd sigma(double t, const Eigen::VectorXd& x, const Measure& m) const override;
  double f(double t, const Eigen::VectorXd& x, const Measure& m) const override;
  double g(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd Dx_b(double t, const Eigen::VectorXd& x, const Measure& m) const override;
  Eigen::VectorXd Dx_f(double t, const Eigen::VectorXd& x, const Measure& m) const override;
  Eigen::VectorXd Dx_g(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd dm_b(double t, const Eigen::VectorXd& x, const Measure& m,
                       int action) const override;
  Eigen::MatrixXd dm_sigma(double t, const Eigen::VectorXd& x, const Measure& m,
                           int action) const override;
  double dm_f(double t, const Eigen::VectorXd& x, const Measure& m, int action) const override;
  Eigen::VectorXd d2m_b(double t, const Eigen::VectorXd& x, const Measure& m, int action,
                        int action2) const override;
  double d2m_f(double t, const Eigen::VectorXd& x, const Measure& m, int action,
               int action2) const override;

  /// Mean action under m, int a m(da).
  Eigen::VectorXd mean_action(const Measure& m) const;
  /// int a'Ra m(da).
  double mean_action_cost(const Measure& m) const;

 private:
  LqParams params_;
  ActionSpace actions_;
};

/// Forward Euler of the controlled state on the tree.
StateField simulate_state(const ScenarioTree& tree, const ModelCoefficients& model,
                          const ControlField& policy);

/// Forward Euler of the linear sensitivity SDE driven by the control
/// direction policy_to - policy_from, along the state path of policy_from.
NodeField<Eigen::VectorXd> sensitivity_process(const ScenarioTree& tree,
                                               const ModelCoefficients& model,
                                               const ControlField& policy_from,
                                               const ControlField& policy_to,
                                               const StateField& state);

struct AuditReport {
  double max_centering_violation = 0.0;      // dm_* centered against m
  double max_dm_sigma_dependence = 0.0;      // dm_sigma constancy across measures
  double max_lipschitz_ratio = 0.0;          // |phi(x,m)-phi(x',m')|^2 / (|x-x'|^2 + D_h)
  double min_hamiltonian_convexity_gap = 0.0;  // H^0 convexity gaps on sampled pairs
  double min_g_convexity_gap = 0.0;
  bool dm_sigma_constant = true;
  bool convexity_ok = true;
};

/// Numerical audit of the standing regularity and convexity assumptions on
/// sampled states and measures. Report-only.
AuditReport assumption_audit(const ModelCoefficients& model, const RegularizerSpec& reg,
                             const std::vector<Eigen::VectorXd>& sample_states,
                             const std::vector<Measure>& sample_measures);

/// Convenience: the same control (or measure) at every decision node.
ControlField constant_policy(const ScenarioTree& tree, const Measure& m);

}  // namespace bmd
