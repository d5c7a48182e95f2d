#pragma once

#include <span>
#include <vector>

#include "lora/params.hpp"

namespace lora {

struct Segment {
    double start = 0.0;     // seconds
    double duration = 0.0;  // seconds
    ChirpKind kind = ChirpKind::up;
    int symbol = 0;
    double start_chip = 0.0;  // start * bw, kept exact for chip-domain lookups
};

// Piecewise-chirp description of a transmitted frame. Segments are
// contiguous, half-open, and the first one starts at t = 0.
struct FrameDescriptor {
    ModemParams params;
    std::vector<Segment> segments;

    double duration() const;
};

// Phase of the up-chirp carrying symbol s, in cycles, at chip time c in [0, n).
double chirp_cycles(double c, int s, int n);

cvec modulate_symbol(int s, const ModemParams& params, ChirpKind kind = ChirpKind::up);

FrameDescriptor build_frame(const PreambleSpec& preamble, std::span<const int> payload,
                            const ModemParams& params);

cplx eval_frame(const FrameDescriptor& frame, double t);

// Same as eval_frame but with time given in chips (t * bw); used by the
// channel to avoid a round trip through seconds.
cplx eval_frame_chips(const FrameDescriptor& frame, double chip);

}  // namespace lora
