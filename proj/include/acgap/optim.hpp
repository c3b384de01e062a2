#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

namespace acgap {

enum class StepDirection { Ascend, Descend };

enum class OptimizerKind { Adam, Sgd };

struct AdamState {
  std::int64_t step_count = 0;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  double alpha = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState create(Eigen::Index dim, double alpha);
};

// Bias-corrected Adam step. Pure: returns the advanced state and the updated
// parameters, so identical inputs always reproduce identical trajectories.
std::pair<AdamState, Eigen::VectorXd> adam_step(const AdamState& state,
                                                const Eigen::VectorXd& params,
                                                const Eigen::VectorXd& gradient,
                                                StepDirection direction);

Eigen::VectorXd sgd_step(double alpha, const Eigen::VectorXd& params,
                         const Eigen::VectorXd& gradient, StepDirection direction);

// Per-parameter-vector optimizer handle used by the training loops.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, Eigen::Index dim, double alpha)
      : kind_(kind), alpha_(alpha), adam_(AdamState::create(dim, alpha)) {}

  Eigen::VectorXd step(const Eigen::VectorXd& params, const Eigen::VectorXd& gradient,
                       StepDirection direction);

 private:
  OptimizerKind kind_;
  double alpha_;
  AdamState adam_;
};

}  // namespace acgap
