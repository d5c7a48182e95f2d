#include "lora/demod.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "lora/fft.hpp"
#include "lora/waveform.hpp"

namespace lora {

std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[best]) best = k;
    return best;
}

std::size_t DechirpedSpectrum::peak() const {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double m = std::norm(bins[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    return best;
}

const cvec& base_upchirp(const ModemParams& params) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<cvec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{params.sf, params.osr}];
    if (!slot) slot = std::make_unique<cvec>(modulate_symbol(0, params, ChirpKind::up));
    return *slot;
}

cvec dechirp(std::span<const cplx> symbol, const ModemParams& params, ChirpKind direction) {
    if (symbol.size() != params.sps())
        throw std::domain_error("dechirp: buffer length must be N*osr");
    const cvec& ref = base_upchirp(params);
    cvec out(symbol.size());
    if (direction == ChirpKind::up)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = symbol[k] * std::conj(ref[k]);
    else
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = symbol[k] * ref[k];
    return out;
}

DechirpedSpectrum spectrum(std::span<const cplx> dechirped, const ModemParams& params,
                           int zero_pad) {
    if (zero_pad < 0) throw std::domain_error("spectrum: negative zero padding");
    const int n = params.n();
    const int osr = params.osr;
    if (dechirped.size() != static_cast<std::size_t>(n) * osr)
        throw std::domain_error("spectrum: buffer length must be N*osr");
    DechirpedSpectrum s;
    s.n = n;
    s.zero_pad = zero_pad;
    s.bins.assign(static_cast<std::size_t>(n + zero_pad), cplx{});
    for (int m = 0; m < n; ++m) {
        cplx acc{};
        for (int j = 0; j < osr; ++j) acc += dechirped[static_cast<std::size_t>(m) * osr + j];
        s.bins[m] = acc;
    }
    fft_inplace(s.bins);
    return s;
}

DechirpedSpectrum symbol_spectrum(std::span<const cplx> symbol, const ModemParams& params,
                                  ChirpKind direction, int zero_pad) {
    return spectrum(dechirp(symbol, params, direction), params, zero_pad);
}

int detect_symbol(const DechirpedSpectrum& spec) {
    if (spec.zero_pad != 0) throw std::domain_error("detect_symbol: spectrum is zero padded");
    return static_cast<int>(spec.peak());
}

PowerSpectrum accumulate_power(std::span<const DechirpedSpectrum> spectra) {
    PowerSpectrum out;
    if (spectra.empty()) return out;
    const std::size_t len = spectra.front().n_dft();
    out.n = spectra.front().n;
    out.p.assign(len, 0.0);
    for (const auto& s : spectra) {
        if (s.n_dft() != len || s.n != out.n)
            throw std::domain_error("accumulate_power: mixed spectrum lengths");
        for (std::size_t k = 0; k < len; ++k) out.p[k] += std::norm(s.bins[k]);
    }
    return out;
}

}  // namespace lora
