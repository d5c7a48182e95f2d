#include "lora/synchronizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lora/demod.hpp"
#include "lora/errors.hpp"
#include "lora/frac_delay.hpp"

namespace lora {

namespace {

using std::numbers::pi;

// Extra samples kept on both sides of the analysed region so the
// fractional-delay filter never reads past real data at window edges.
constexpr long kMargin = 16;

// Payload tracking runs at this multiple of the stream rate.
constexpr int kTrackInterp = 4;

cplx phasor(double cycles) {
    cycles -= std::floor(cycles);
    const double ph = 2.0 * pi * cycles;
    return {std::cos(ph), std::sin(ph)};
}

// buf[q] *= exp(-j 2 pi step (q + q0)); exact phasor every 256 samples,
// recurrence in between
void rotate(std::span<cplx> buf, double step, double q0) {
    constexpr std::size_t kBlock = 256;
    const cplx inc = phasor(-step);
    for (std::size_t b = 0; b < buf.size(); b += kBlock) {
        cplx ph = phasor(-step * (q0 + static_cast<double>(b)));
        const std::size_t end = std::min(buf.size(), b + kBlock);
        for (std::size_t q = b; q < end; ++q) {
            buf[q] *= ph;
            ph *= inc;
        }
    }
}

// Phase error in cycles of sample nbar within preamble symbol l.
double sfo_cycles(long l, double nbar, double gamma, const ModemParams& p) {
    const double r = 1.0 / (1.0 + gamma);
    const double c0 = nbar / p.osr;
    return c0 * c0 * (r * r - 1.0) / (2.0 * p.n()) + static_cast<double>(l) * (r * r - r) * c0 -
           (r - 1.0) * c0 / 2.0;
}

// Phase in cycles that the drift adds to the whole of preamble symbol l.
// The analytic correction leaves it out; it is needed when the CFO is
// re-estimated from pairwise phases after the correction.
double sfo_symbol_cycles(long l, double gamma, const ModemParams& p) {
    const double r = 1.0 / (1.0 + gamma);
    const double shift = static_cast<double>(l) * p.n() * gamma * r;
    return shift / 2.0 + shift * shift / (2.0 * p.n());
}

// Copy of stream[first, first + len) with zeros outside the stream.
cvec slice(std::span<const cplx> stream, long first, long len) {
    cvec out(static_cast<std::size_t>(len));
    const long total = static_cast<long>(stream.size());
    for (long k = 0; k < len; ++k) {
        const long j = first + k;
        if (j >= 0 && j < total) out[k] = stream[j];
    }
    return out;
}

DechirpedSpectrum window_spectrum(std::span<const cplx> buf, long first, const ModemParams& p,
                                  ChirpKind dir, int zero_pad) {
    const long s = static_cast<long>(p.sps());
    cvec w = slice(buf, first, s);
    return symbol_spectrum(w, p, dir, zero_pad);
}

double peak_power(const DechirpedSpectrum& s) { return std::norm(s.bins[s.peak()]); }

struct Placement {
    long origin = 0;       // stream sample of window 0
    double timing = 0.0;   // coarse timing of window 0 relative to frame symbol 1, chips
};

// Coarse window placement: shifts the raw grid until the dechirped preamble
// tone sits at bin 0, picks which symbol the first window covers by looking
// for down-chirp energy where the layout expects it, then steps back by the
// integer timing so window 0 starts on frame symbol 1.
Placement place_on_peak(std::span<const cplx> stream, const PreambleSpec& pre, const ModemParams& p) {
    const int n = p.n();
    const long s = static_cast<long>(p.sps());
    std::vector<DechirpedSpectrum> raw;
    for (int w = 0; w + 1 < pre.n_up; ++w)
        raw.push_back(window_spectrum(stream, w * s, p, ChirpKind::up, 0));
    const int s_raw = consensus_symbol(raw);
    const long a0 = static_cast<long>(n - s_raw) * p.osr;

    // a0 lies m symbols (m in 0..2) past a frame boundary shifted by the CFO
    int best_m = 1;
    double best_energy = -1.0;
    for (int m = 0; m <= 2; ++m) {
        double e = 0.0;
        for (int j = 0; j < 2; ++j) {
            const long first = a0 + (pre.n_up + 2 + j - m) * s;
            e += peak_power(window_spectrum(stream, first, p, ChirpKind::down, 0));
        }
        if (e > best_energy) {
            best_energy = e;
            best_m = m;
        }
    }
    Placement pl;
    pl.origin = a0 + (1 - best_m) * s;

    std::vector<DechirpedSpectrum> up, down;
    for (int w = 0; w + 1 < pre.n_up; ++w)
        up.push_back(window_spectrum(stream, pl.origin + w * s, p, ChirpKind::up, 0));
    for (int w = pre.n_up + 1; w <= pre.n_up + 2; ++w)
        down.push_back(window_spectrum(stream, pl.origin + w * s, p, ChirpKind::down, 0));
    const auto sym = consensus_symbols(up, down);
    const auto ints = est_int_cfo_sto(sym.s_up, sym.s_down, n);
    // Move window 0 onto the symbol boundary. Left on the peak, each window
    // would hold l_cfo samples past the chirp wrap, whose phase jumps with the
    // fractional timing and bends the three-line estimate.
    pl.origin -= static_cast<long>(gamma_fold(ints.l_sto, n)) * p.osr;
    pl.timing = 0.0;
    return pl;
}

template <typename Fn>
std::vector<DechirpedSpectrum> spectra(const cvec& z, int w_lo, int w_hi, const ModemParams& p,
                                       ChirpKind dir, int zero_pad, Fn&& offset) {
    std::vector<DechirpedSpectrum> out;
    for (int w = w_lo; w <= w_hi; ++w)
        out.push_back(window_spectrum(z, offset(w), p, dir, zero_pad));
    return out;
}

double wrap_timing(double chips, int n) {
    // fold into [-0.5, n - 0.5)
    double x = std::fmod(chips + 0.5, static_cast<double>(n));
    if (x < 0) x += n;
    return x - 0.5;
}

void split_timing(double chips, int n, int& l_sto, double& lambda_sto) {
    const double x = wrap_timing(chips, n);
    const double l = std::floor(x + 0.5);
    lambda_sto = x - l;
    l_sto = static_cast<int>(l) % n;
}

}  // namespace

double sfo_phase(std::size_t n, double gamma_hat, const ModemParams& params, ChirpKind direction) {
    const std::size_t s = params.sps();
    const long l = static_cast<long>(n / s);
    const double nbar = static_cast<double>(n % s);
    const double ph = 2.0 * pi * sfo_cycles(l, nbar, gamma_hat, params);
    return direction == ChirpKind::up ? ph : -ph;
}

double sfo_symbol_phase(std::size_t l, double gamma_hat, const ModemParams& params, ChirpKind direction) {
    const double ph = 2.0 * pi * sfo_symbol_cycles(static_cast<long>(l), gamma_hat, params);
    return direction == ChirpKind::up ? ph : -ph;
}

cvec compensate_cfo(std::span<const cplx> stream, double cfo_bins, const ModemParams& params) {
    cvec out(stream.begin(), stream.end());
    if (cfo_bins == 0.0) return out;
    rotate(out, cfo_bins / params.n() / params.osr, 0.0);
    return out;
}

cvec resample_frac_sto(std::span<const cplx> stream, double lambda_chips, const ModemParams& params) {
    if (lambda_chips == 0.0) return cvec(stream.begin(), stream.end());
    return delay_samples(stream, lambda_chips * params.osr);
}

PassResult estimate_pass(std::span<const cplx> stream, double gamma_prior, const SyncConfig& config,
                         const ModemParams& params, std::optional<double> sto_hint) {
    const PreambleSpec& pre = config.preamble;
    pre.validate(params);
    const int n = params.n();
    const int osr = params.osr;
    const long s = static_cast<long>(params.sps());
    const auto needed = static_cast<std::size_t>(std::ceil(pre.length_symbols() * s));
    if (stream.size() < needed) throw InsufficientData("stream shorter than the preamble");

    Placement pl;
    if (sto_hint) {
        pl.origin = std::lround((n - wrap_timing(*sto_hint, n)) * osr * (1.0 + gamma_prior));
        pl.timing = 0.0;
    } else {
        pl = place_on_peak(stream, pre, params);
    }

    // Windows wholly inside the up-chirps. A late grid spills the last one
    // into the first sync word.
    const int w_lo = 0;
    const int w_hi = pl.timing > 2.0 ? pre.n_up - 3 : pre.n_up - 2;
    const int d_lo = pre.n_up + 1;
    const int d_hi = pre.n_up + 2;

    const long zlen = (d_hi + 1) * s + 2 * kMargin;
    cvec z = slice(stream, pl.origin - kMargin, zlen);
    auto at = [&](int w) { return kMargin + w * s; };

    // Step 1: undo the preamble phase error predicted from gamma_prior.
    if (gamma_prior != 0.0) {
        for (long q = 0; q < zlen; ++q) {
            const long rel = q - kMargin;
            const long l = rel >= 0 ? rel / s : -((-rel + s - 1) / s);
            const double nbar = static_cast<double>(rel - l * s);
            double cyc = sfo_cycles(l, nbar, gamma_prior, params) +
                         sfo_symbol_cycles(l, gamma_prior, params);
            if (l >= d_lo) cyc = -cyc;
            z[q] *= phasor(-cyc);
        }
    }

    // Step 2: fractional CFO.
    const auto up0 = spectra(z, w_lo, w_hi, params, ChirpKind::up, 0, at);
    const FracEstimate frac_cfo = est_frac_cfo(up0);
    rotate(z, frac_cfo.value / n / osr, -static_cast<double>(kMargin));

    // Step 3: fractional STO on the zero-padded power spectrum, then delay
    // the preamble so the tone sits on a bin.
    const auto up_pad = spectra(z, w_lo, w_hi, params, ChirpKind::up, n, at);
    const FracEstimate frac_sto = est_frac_sto(accumulate_power(up_pad));
    z = delay_samples(z, frac_sto.value * osr);

    // Step 4: integer CFO and STO from the up and down consensus symbols.
    const auto up1 = spectra(z, w_lo, w_hi, params, ChirpKind::up, 0, at);
    const auto down1 = spectra(z, d_lo, d_hi, params, ChirpKind::down, 0, at);
    const auto sym = consensus_symbols(up1, down1);
    const auto ints = est_int_cfo_sto(sym.s_up, sym.s_down, n);

    // Step 5: clock offset from the carrier offset.
    const double gamma_hat = est_sfo_from_cfo(ints.l_cfo, frac_cfo.value, params);

    // Timing of window 0 relative to frame symbol 1, in chips.
    const double timing = gamma_fold(ints.l_sto, n) + frac_sto.value;
    const double origin = static_cast<double>(pl.origin);

    PassResult r;
    r.estimate.l_cfo = ints.l_cfo;
    r.estimate.lambda_cfo = frac_cfo.value;
    r.estimate.gamma_hat = gamma_hat;
    r.estimate.degenerate = frac_cfo.degenerate || frac_sto.degenerate;
    const double tau_pass = n + timing - origin / (osr * (1.0 + gamma_prior));
    split_timing(tau_pass, n, r.estimate.l_sto, r.estimate.lambda_sto);

    // The windows average the drift left after step 1 around their mean
    // centre; move that reading back to window 0.
    const double mean_centre = 0.5 * (w_lo + w_hi) + 0.5;
    const double timing0 = timing + mean_centre * n * (gamma_hat - gamma_prior) / (1.0 + gamma_hat);
    r.anchor_chips = n + timing0 - origin / (osr * (1.0 + gamma_hat));
    r.payload_start = (pre.length_symbols() * n - r.anchor_chips) * osr * (1.0 + gamma_hat);
    return r;
}

AlignedPass sync_pass(std::span<const cplx> stream, double gamma_prior, const SyncConfig& config,
                      const ModemParams& params, std::optional<double> sto_hint) {
    AlignedPass out;
    out.result = estimate_pass(stream, gamma_prior, config, params, sto_hint);
    const OffsetEstimate& e = out.result.estimate;
    const cvec derotated = compensate_cfo(stream, e.cfo_bins(), params);
    // advance so that sample 0 lands on the next symbol boundary
    const double tau = wrap_timing(e.sto_chips(), params.n());
    const double lead = tau <= 0.0 ? -tau : params.n() - tau;
    out.aligned = tau == 0.0 ? derotated : delay_samples(derotated, -lead * params.osr);
    return out;
}

SyncResult synchronize(std::span<const cplx> stream, const SyncConfig& config,
                       const ModemParams& params) {
    SyncResult res;
    PassResult first = estimate_pass(stream, 0.0, config, params);
    PassResult last = first;
    res.passes_run = 1;
    if (config.passes_max >= 2 && std::abs(first.estimate.gamma_hat) * params.n() > config.theta) {
        last = estimate_pass(stream, first.estimate.gamma_hat, config, params, first.anchor_chips);
        res.passes_run = 2;
    }
    res.first_pass = first.estimate;
    res.estimate = last.estimate;
    res.payload_start = last.payload_start;
    res.aligned_stream_offset =
        last.payload_start <= 0.0 ? 0 : static_cast<std::size_t>(std::lround(last.payload_start));
    res.cfo_out_of_range = std::abs(last.estimate.cfo_bins()) > params.n() / 4.0;
    res.degenerate = first.estimate.degenerate || last.estimate.degenerate;
    return res;
}

std::optional<double> compensation_period(double gamma_hat, const ModemParams& params) {
    if (gamma_hat == 0.0) return std::nullopt;
    return params.fs() / (2.0 * params.bw * std::abs(gamma_hat));
}

cvec payload_sfo_track(std::span<const cplx> stream, double gamma_hat, const ModemParams&) {
    if (gamma_hat == 0.0) return cvec(stream.begin(), stream.end());
    // Output sample m should be read at input position m (1 + gamma_hat);
    // rounding that position drops or repeats one sample each time the
    // accumulated drift crosses half a sample.
    cvec out;
    out.reserve(stream.size());
    for (std::size_t m = 0;; ++m) {
        const double pos = static_cast<double>(m) * (1.0 + gamma_hat);
        const auto j = static_cast<long>(std::floor(pos + 0.5));
        if (j < 0 || j >= static_cast<long>(stream.size())) break;
        out.push_back(stream[j]);
    }
    return out;
}

std::optional<long long> max_budget_before_error(double gamma, int sf) {
    if (gamma == 0.0) return std::nullopt;
    const double n = std::ldexp(1.0, sf);
    return static_cast<long long>(std::floor(1.0 / (2.0 * std::abs(gamma) * n)));
}

cvec extract_payload(std::span<const cplx> stream, const SyncResult& sync, const ModemParams& params,
                     std::size_t n_symbols, bool track) {
    const long s = static_cast<long>(params.sps());
    const double gamma = sync.estimate.gamma_hat;
    const double start = sync.payload_start;
    const long base = static_cast<long>(std::floor(start));
    const double frac = start - static_cast<double>(base);
    const long span_len =
        static_cast<long>(std::ceil(static_cast<double>(n_symbols) * s * (1.0 + std::abs(gamma)))) + 2;
    cvec seg = slice(stream, base - kMargin, span_len + 2 * kMargin);

    rotate(seg, sync.estimate.cfo_bins() / params.n() / params.osr, static_cast<double>(base - kMargin));
    if (frac != 0.0) seg = delay_samples(seg, -frac);
    cvec payload(seg.begin() + kMargin, seg.end());
    if (track && gamma != 0.0) {
        // Interleave kTrackInterp fractional-delay phases so each drop or
        // repeat moves the timing by a fraction of a sample, then take the
        // zero phase back out.
        const std::size_t len = payload.size();
        cvec fine(len * kTrackInterp);
        for (int j = 0; j < kTrackInterp; ++j) {
            const cvec phase = j == 0 ? payload : delay_samples(payload, -static_cast<double>(j) / kTrackInterp);
            for (std::size_t m = 0; m < len; ++m) fine[m * kTrackInterp + j] = phase[m];
        }
        fine = payload_sfo_track(fine, gamma, params);
        payload.assign(fine.size() / kTrackInterp, cplx{});
        for (std::size_t m = 0; m < payload.size(); ++m) payload[m] = fine[m * kTrackInterp];
    }
    payload.resize(n_symbols * static_cast<std::size_t>(s));
    return payload;
}

std::vector<int> demodulate(std::span<const cplx> aligned, const ModemParams& params,
                            std::size_t n_symbols) {
    const std::size_t s = params.sps();
    if (aligned.size() < n_symbols * s) throw InsufficientData("not enough samples for the payload");
    std::vector<int> out;
    out.reserve(n_symbols);
    for (std::size_t i = 0; i < n_symbols; ++i)
        out.push_back(detect_symbol(symbol_spectrum(aligned.subspan(i * s, s), params, ChirpKind::up, 0)));
    return out;
}

}  // namespace lora
