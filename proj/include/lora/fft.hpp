#pragma once

#include <span>

#include "lora/params.hpp"

namespace lora {

// Unnormalized in-place forward DFT. Plans are cached per length and shared
// across threads.
void fft_inplace(std::span<cplx> data);

}  // namespace lora
