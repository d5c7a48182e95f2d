#include "lora/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lora {

void split_offset(double x, int& integer, double& fraction) {
    const double l = std::floor(x + 0.5);
    integer = static_cast<int>(l);
    fraction = x - l;
}

ChannelOffsets derive_offsets(double gamma, const ModemParams& params) {
    ChannelOffsets o;
    o.delta_fc = gamma * params.fc;
    o.fs_prime = params.fs() * (1.0 + gamma);
    split_offset(o.delta_fc * params.n() / params.bw, o.l_cfo, o.lambda_cfo);
    o.outside_estimation_range = std::abs(o.delta_fc) > params.bw / 4.0;
    return o;
}

namespace {

double cfo_of(const ImpairmentConfig& imp, const ModemParams& params) {
    return imp.cfo_hz ? *imp.cfo_hz : imp.gamma * params.fc;
}

}  // namespace

std::size_t max_received_samples(const FrameDescriptor& frame, const ImpairmentConfig& imp) {
    const ModemParams& p = frame.params;
    const double fs_prime = p.fs() * (1.0 + imp.gamma);
    const double span = frame.duration() - imp.tau;
    if (span <= 0.0) return 0;
    // k/fs' + tau < duration
    const double kmax = std::ceil(span * fs_prime) - 1.0;
    std::size_t k = kmax < 0 ? 0 : static_cast<std::size_t>(kmax) + 1;
    while (k > 0 && static_cast<double>(k - 1) / fs_prime + imp.tau >= frame.duration()) --k;
    return k;
}

cvec sample_received(const FrameDescriptor& frame, const ImpairmentConfig& imp,
                     std::size_t n_samples) {
    const ModemParams& p = frame.params;
    const auto& segs = frame.segments;
    if (segs.empty() || imp.tau < 0.0) throw std::out_of_range("requested span outside frame");
    const double fs_prime = p.fs() * (1.0 + imp.gamma);
    const double total_chips = segs.back().start_chip + segs.back().duration * p.bw;
    const double cfo = cfo_of(imp, p);
    const int n = p.n();

    cvec out(n_samples);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t = static_cast<double>(k) / fs_prime;
        const double chip = (t + imp.tau) * p.bw;
        if (chip >= total_chips) throw std::out_of_range("requested span outside frame");
        while (seg + 1 < segs.size() && chip >= segs[seg + 1].start_chip) ++seg;
        const Segment& s = segs[seg];
        double cyc = chirp_cycles(chip - s.start_chip, s.symbol, n);
        cyc -= std::floor(cyc);
        if (s.kind == ChirpKind::down) cyc = -cyc;
        double rot = cfo * t;
        rot -= std::floor(rot);
        const double ph = 2.0 * std::numbers::pi * (cyc + rot);
        out[k] = {std::cos(ph), std::sin(ph)};
    }
    return out;
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::vector<std::uint32_t> words;
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto k : keys) {
        words.push_back(static_cast<std::uint32_t>(k));
        words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

double noise_variance(double snr_db, int osr) {
    return osr * std::pow(10.0, -snr_db / 10.0);
}

void add_awgn(std::span<cplx> buffer, double snr_db, int osr, Rng& rng) {
    if (!std::isfinite(snr_db)) return;
    const double sigma = std::sqrt(noise_variance(snr_db, osr) / 2.0);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (auto& v : buffer) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += cplx(re, im);
    }
}

}  // namespace lora
