#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bmd/errors.hpp"

namespace bmd {

/// Non-recombining binary-per-coordinate discretisation of the Brownian
/// filtration: every node at level l < n_steps has 2^d_prime children, one
/// per sign pattern of the increment (+-sqrt(dt) in each coordinate), all
/// equally likely. A single-branch variant (one child, zero increment)
/// carries deterministic dynamics.
struct ScenarioTree {
  double horizon = 1.0;
  int n_steps = 1;
  int d_prime = 1;
  double dt = 1.0;
  int branching = 2;
  bool single_branch = false;

  std::int64_t num_nodes(int level) const;
  /// Probability of each node at a level (uniform within a level).
  double node_prob(int level) const;
  double time_of(int level) const { return level * dt; }
  std::int64_t child(std::int64_t node, int branch) const {
    return node * branching + branch;
  }
  std::int64_t parent(std::int64_t node) const { return node / branching; }
  /// Increment vector of a branch, in {+sqrt(dt), -sqrt(dt)}^d_prime
  /// (bit k of the branch index picks the sign of coordinate k).
  Eigen::VectorXd branch_increment(int branch) const;
  /// Number of control-bearing nodes (levels 0..n_steps-1).
  std::int64_t num_decision_nodes() const;
};

ScenarioTree build_tree(double T, int n_steps, int d_prime, bool single_branch = false);

/// One value per node on a contiguous range of levels.
template <class V>
struct NodeField {
  int first_level = 0;
  std::vector<std::vector<V>> levels;  // levels[l - first_level]

  int last_level() const { return first_level + static_cast<int>(levels.size()) - 1; }
  std::vector<V>& at_level(int level) { return levels.at(level - first_level); }
  const std::vector<V>& at_level(int level) const { return levels.at(level - first_level); }
  V& operator()(int level, std::int64_t node) { return at_level(level)[node]; }
  const V& operator()(int level, std::int64_t node) const { return at_level(level)[node]; }
};

/// Probability-weighted average of children values, one level up.
/// `field_values` holds the values at level `level + 1`.
template <class V>
std::vector<V> conditional_expectation(const ScenarioTree& tree,
                                       const std::vector<V>& field_values, int level) {
  if (level < 0 || level >= tree.n_steps) throw LevelMismatch("conditional_expectation level out of range");
  if (static_cast<std::int64_t>(field_values.size()) != tree.num_nodes(level + 1)) {
    throw LevelMismatch("field size does not match level " + std::to_string(level + 1));
  }
  const double p = 1.0 / tree.branching;
  std::vector<V> out;
  out.reserve(tree.num_nodes(level));
  for (std::int64_t n = 0; n < tree.num_nodes(level); ++n) {
    V acc = field_values[tree.child(n, 0)] * p;
    for (int b = 1; b < tree.branching; ++b) acc = acc + field_values[tree.child(n, b)] * p;
    out.push_back(acc);
  }
  return out;
}

/// E[ sum_l integrand_l dt + terminal ], an exact finite sum with
/// left-endpoint time quadrature. `integrands` holds scalar node values on
/// levels 0..n_steps-1, `terminal` on level n_steps.
double expectation_pathwise(const ScenarioTree& tree,
                            const std::vector<std::vector<double>>& integrands,
                            const std::vector<double>& terminal);

}  // namespace bmd
