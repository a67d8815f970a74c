#pragma once

#include "despeckle/ica.hpp"

#include <chrono>

namespace despeckle::detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Fills W = U^T and the observation-space quantities from a rotation found
/// in whitened space.
inline void apply_rotation(UnmixingResult& out, const Matrix& U, const Whitened& w) {
  out.W = U.transpose();
  out.W_total = out.W * w.whitening.Q;
  out.sources = out.W * w.data.values();
  out.mixing = w.whitening.Q_pinv * U;
}

}  // namespace despeckle::detail
