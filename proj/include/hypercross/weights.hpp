#pragma once

#include <cmath>

#include "hypercross/error.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/sequences.hpp"

namespace hypercross {

/// ln w(s) = ln(|s|_1!/s!) + sum_j s_j ln b_j, with the zero flag set when b
/// vanishes on the support of s.
inline LogWeight log_weight_or_zero(const MultiIndex& s, const WeightSequence& b) {
  LogWeight w{log_multinomial(s), false};
  for (const auto& e : s.entries()) {
    const double bj = b.value(e.dim);
    if (bj <= 0.0) return {-std::numeric_limits<double>::infinity(), true};
    w.log_value += static_cast<double>(e.exp) * std::log(bj);
  }
  return w;
}

/// Same as log_weight_or_zero but a vanishing weight is an error.
inline LogWeight log_weight(const MultiIndex& s, const WeightSequence& b) {
  const LogWeight w = log_weight_or_zero(s, b);
  if (w.zero) fail(ErrorKind::ZeroWeight, "b vanishes on the support of " + s.to_string());
  return w;
}

}  // namespace hypercross
