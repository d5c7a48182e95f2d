#pragma once

#include <string>

#include "lora/params.hpp"

namespace lora {

// Headerless little-endian float32 I/Q pairs (cf32).
void write_cf32(const std::string& path, const cvec& samples);
// Throws MalformedFile when the byte count is not a whole number of pairs.
cvec read_cf32(const std::string& path);

}  // namespace lora
