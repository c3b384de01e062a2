#pragma once

#include <Eigen/Core>

namespace acgap {

// Directly parametrized state-action value table q (its parameter Jacobian
// is the identity).
struct CriticTable {
  Eigen::VectorXd values;  // S*A

  CriticTable() = default;
  explicit CriticTable(Eigen::Index dim) : values(Eigen::VectorXd::Zero(dim)) {}
  explicit CriticTable(Eigen::VectorXd v) : values(std::move(v)) {}

  void check_finite() const;
};

// Value table for the critic's residual treated as a reward.
struct ResCriticTable {
  Eigen::VectorXd values;  // S*A

  ResCriticTable() = default;
  explicit ResCriticTable(Eigen::Index dim) : values(Eigen::VectorXd::Zero(dim)) {}
  explicit ResCriticTable(Eigen::VectorXd v) : values(std::move(v)) {}

  void check_finite() const;
};

}  // namespace acgap
