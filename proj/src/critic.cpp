#include "acgap/critic.hpp"

#include <stdexcept>

namespace acgap {

void CriticTable::check_finite() const {
  if (!values.allFinite()) throw std::runtime_error("CriticTable: non-finite values");
}

void ResCriticTable::check_finite() const {
  if (!values.allFinite()) throw std::runtime_error("ResCriticTable: non-finite values");
}

}  // namespace acgap
