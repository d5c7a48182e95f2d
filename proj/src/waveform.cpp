#include "lora/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lora {

namespace {

void check_symbol(int s, int n) {
    if (s < 0 || s >= n) throw std::domain_error("symbol value out of range");
}

cplx unit_phasor(double cycles) {
    const double frac = cycles - std::floor(cycles);
    const double ph = 2.0 * std::numbers::pi * frac;
    return {std::cos(ph), std::sin(ph)};
}

}  // namespace

double FrameDescriptor::duration() const {
    if (segments.empty()) return 0.0;
    const auto& last = segments.back();
    return last.start + last.duration;
}

double chirp_cycles(double c, int s, int n) {
    const double fold = (c >= n - s) ? 1.0 : 0.0;
    return c * c / (2.0 * n) + (static_cast<double>(s) / n - 0.5 - fold) * c;
}

cvec modulate_symbol(int s, const ModemParams& params, ChirpKind kind) {
    const int n = params.n();
    check_symbol(s, n);
    cvec out(params.sps());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double c = static_cast<double>(k) / params.osr;
        cplx v = unit_phasor(chirp_cycles(c, s, n));
        out[k] = kind == ChirpKind::up ? v : std::conj(v);
    }
    return out;
}

FrameDescriptor build_frame(const PreambleSpec& preamble, std::span<const int> payload,
                            const ModemParams& params) {
    params.validate();
    preamble.validate(params);
    const int n = params.n();
    for (int s : payload) check_symbol(s, n);

    FrameDescriptor frame;
    frame.params = params;
    // Starts are computed from an exact chip count so that k/fs lands on
    // the same side of a boundary as the chip-domain lookup.
    double chips = 0.0;
    auto push = [&](ChirpKind kind, int sym, double len) {
        const double len_chips = len * n;
        frame.segments.push_back({chips / params.bw, len_chips / params.bw, kind, sym, chips});
        chips += len_chips;
    };
    for (int i = 0; i < preamble.n_up; ++i) push(ChirpKind::up, 0, 1.0);
    for (int w : preamble.sync_words) push(ChirpKind::up, w, 1.0);
    double down = preamble.n_down;
    while (down >= 1.0) {
        push(ChirpKind::down, 0, 1.0);
        down -= 1.0;
    }
    if (down > 0.0) push(ChirpKind::down, 0, down);
    for (int s : payload) push(ChirpKind::up, s, 1.0);
    return frame;
}

cplx eval_frame_chips(const FrameDescriptor& frame, double chip) {
    const auto& segs = frame.segments;
    if (segs.empty()) throw std::out_of_range("time outside frame");
    const double total = segs.back().start_chip + segs.back().duration * frame.params.bw;
    if (!(chip >= 0.0) || !(chip < total)) throw std::out_of_range("time outside frame");
    auto it = std::upper_bound(segs.begin(), segs.end(), chip,
                               [](double c, const Segment& s) { return c < s.start_chip; });
    const Segment& seg = *std::prev(it);
    const double local = chip - seg.start_chip;
    cplx v = unit_phasor(chirp_cycles(local, seg.symbol, frame.params.n()));
    return seg.kind == ChirpKind::up ? v : std::conj(v);
}

cplx eval_frame(const FrameDescriptor& frame, double t) {
    if (!(t >= 0.0) || !(t < frame.duration())) throw std::out_of_range("time outside frame");
    const auto& segs = frame.segments;
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](double x, const Segment& s) { return x < s.start; });
    const Segment& seg = *std::prev(it);
    const double local = (t - seg.start) * frame.params.bw;
    cplx v = unit_phasor(chirp_cycles(local, seg.symbol, frame.params.n()));
    return seg.kind == ChirpKind::up ? v : std::conj(v);
}

}  // namespace lora
