#pragma once

#include <array>
#include <span>

#include "lora/params.hpp"

namespace lora {

inline constexpr int kFracDelayTaps = 16;
inline constexpr double kFracDelayKaiserBeta = 5.0;

// Taps h[0..15] for a delay of d samples, 0 <= d < 1. Tap m multiplies
// x[k - (m - 7)], so the filter adds no bulk delay beyond d.
std::array<double, kFracDelayTaps> frac_delay_taps(double d);

// y[k] = x(k - delay) for any real delay. The integer part is a shift; the
// remainder goes through the windowed-sinc filter. Samples outside x are
// treated as zero.
cvec delay_samples(std::span<const cplx> x, double delay);

}  // namespace lora
