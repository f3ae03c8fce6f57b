#include "bmd/scenario_tree.hpp"

#include <cmath>

namespace bmd {

std::int64_t ScenarioTree::num_nodes(int level) const {
  std::int64_t n = 1;
  for (int l = 0; l < level; ++l) n *= branching;
  return n;
}

double ScenarioTree::node_prob(int level) const {
  return 1.0 / static_cast<double>(num_nodes(level));
}

Eigen::VectorXd ScenarioTree::branch_increment(int branch) const {
  Eigen::VectorXd dw = Eigen::VectorXd::Zero(d_prime);
  if (single_branch) return dw;
  const double s = std::sqrt(dt);
  for (int k = 0; k < d_prime; ++k) {
    dw(k) = (branch >> k) & 1 ? -s : s;
  }
  return dw;
}

std::int64_t ScenarioTree::num_decision_nodes() const {
  std::int64_t total = 0;
  for (int l = 0; l < n_steps; ++l) total += num_nodes(l);
  return total;
}

ScenarioTree build_tree(double T, int n_steps, int d_prime, bool single_branch) {
  if (T <= 0.0) throw SizeExceeded("horizon must be positive");
  if (n_steps < 1 || n_steps > 16) throw SizeExceeded("n_steps must lie in [1, 16]");
  if (d_prime < 1 || d_prime > 2) throw SizeExceeded("d_prime must lie in [1, 2]");
  if (!single_branch && n_steps * d_prime > 20) {
    throw SizeExceeded("2^(d_prime * n_steps) exceeds the 2^20 leaf cap");
  }
  ScenarioTree tree;
  tree.horizon = T;
  tree.n_steps = n_steps;
  tree.d_prime = d_prime;
  tree.dt = T / n_steps;
  tree.single_branch = single_branch;
  tree.branching = single_branch ? 1 : (1 << d_prime);
  return tree;
}

double expectation_pathwise(const ScenarioTree& tree,
                            const std::vector<std::vector<double>>& integrands,
                            const std::vector<double>& terminal) {
  if (static_cast<int>(integrands.size()) != tree.n_steps) {
    throw LevelMismatch("expected one integrand level per time step");
  }
  if (static_cast<std::int64_t>(terminal.size()) != tree.num_nodes(tree.n_steps)) {
    throw LevelMismatch("terminal field size does not match leaf count");
  }
  double total = 0.0;
  for (int l = 0; l < tree.n_steps; ++l) {
    if (static_cast<std::int64_t>(integrands[l].size()) != tree.num_nodes(l)) {
      throw LevelMismatch("integrand size does not match level " + std::to_string(l));
    }
    const double p = tree.node_prob(l);
    double level_sum = 0.0;
    for (double v : integrands[l]) level_sum += v;
    total += p * level_sum * tree.dt;
  }
  const double p_leaf = tree.node_prob(tree.n_steps);
  double leaf_sum = 0.0;
  for (double v : terminal) leaf_sum += v;
  total += p_leaf * leaf_sum;
  return total;
}

}  // namespace bmd
