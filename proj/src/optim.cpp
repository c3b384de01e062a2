#include "acgap/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace acgap {

AdamState AdamState::create(Eigen::Index dim, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("AdamState: alpha must be nonnegative");
  AdamState state;
  state.alpha = alpha;
  state.first_moment = Eigen::VectorXd::Zero(dim);
  state.second_moment = Eigen::VectorXd::Zero(dim);
  return state;
}

std::pair<AdamState, Eigen::VectorXd> adam_step(const AdamState& state,
                                                const Eigen::VectorXd& params,
                                                const Eigen::VectorXd& gradient,
                                                StepDirection direction) {
  if (params.size() != gradient.size() || params.size() != state.first_moment.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  AdamState next = state;
  next.step_count = state.step_count + 1;
  next.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient;
  next.second_moment =
      state.beta2 * state.second_moment +
      (1.0 - state.beta2) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(next.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(next.step_count));
  const Eigen::VectorXd update =
      state.alpha * (next.first_moment / c1).cwiseQuotient(
                        ((next.second_moment / c2).cwiseSqrt().array() + state.epsilon).matrix());
  Eigen::VectorXd out =
      direction == StepDirection::Ascend ? (params + update).eval() : (params - update).eval();
  if (!out.allFinite()) throw std::runtime_error("adam_step: non-finite parameters");
  return {std::move(next), std::move(out)};
}

Eigen::VectorXd sgd_step(double alpha, const Eigen::VectorXd& params,
                         const Eigen::VectorXd& gradient, StepDirection direction) {
  if (params.size() != gradient.size()) throw std::invalid_argument("sgd_step: dimension mismatch");
  return direction == StepDirection::Ascend ? (params + alpha * gradient).eval()
                                            : (params - alpha * gradient).eval();
}

Eigen::VectorXd Optimizer::step(const Eigen::VectorXd& params, const Eigen::VectorXd& gradient,
                                StepDirection direction) {
  if (kind_ == OptimizerKind::Sgd) return sgd_step(alpha_, params, gradient, direction);
  auto [next, out] = adam_step(adam_, params, gradient, direction);
  adam_ = std::move(next);
  return out;
}

}  // namespace acgap
