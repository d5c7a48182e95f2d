#include "lora/estimators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lora {

using std::numbers::pi;

RctslConstants::RctslConstants(int n) {
    u = 64.0 * n / (std::pow(pi, 5) + 32.0 * pi);
    v = u * pi * pi / 4.0;
}

int gamma_fold(int k, int n) { return k < n / 2 ? k : k - n; }

double wrap_half(double x) {
    double w = x - std::floor(x + 0.5);
    if (w >= 0.5) w -= 1.0;
    return w;
}

FracEstimate est_frac_cfo(std::span<const DechirpedSpectrum> upchirps) {
    if (upchirps.size() < 2) throw std::invalid_argument("est_frac_cfo: need two or more spectra");
    cplx acc{};
    for (std::size_t l = 1; l < upchirps.size(); ++l) {
        const auto& cur = upchirps[l];
        const auto& prev = upchirps[l - 1];
        const auto len = static_cast<long>(cur.n_dft());
        if (prev.n_dft() != cur.n_dft())
            throw std::domain_error("est_frac_cfo: mixed spectrum lengths");
        const long i = static_cast<long>(cur.peak());
        for (long p = -2; p <= 2; ++p) {
            const long k = ((i + p) % len + len) % len;
            acc += cur.bins[k] * std::conj(prev.bins[k]);
        }
    }
    if (acc == cplx{}) return {0.0, true};
    return {wrap_half(std::arg(acc) / (2.0 * pi)), false};
}

FracEstimate est_frac_sto(const PowerSpectrum& p) {
    const long len = static_cast<long>(p.p.size());
    if (len == 0 || p.n <= 0) return {0.0, true};
    const long i = static_cast<long>(argmax(p.p));
    const double mid = p.p[i];
    if (mid <= 0.0) return {0.0, true};
    const double left = p.p[(i - 1 + len) % len];
    const double right = p.p[(i + 1) % len];
    const RctslConstants c(p.n);
    const double den = c.u * (right + left) + c.v * mid;
    const double delta = den > 0.0 ? p.n / (2.0 * pi) * (right - left) / den : 0.0;
    // bin spacing in chips is n / len (one half for 2N padding)
    const double position = static_cast<double>(i) * p.n / len + delta;
    return {wrap_half(position), false};
}

IntegerOffsets est_int_cfo_sto(int s_up, int s_down, int n) {
    if (s_up < 0 || s_up >= n || s_down < 0 || s_down >= n)
        throw std::domain_error("est_int_cfo_sto: symbol out of range");
    const int folded = gamma_fold((s_up + s_down) % n, n);
    // integer division truncates toward zero, which is the rule for odd sums
    const int l_cfo = folded / 2;
    const int l_sto = ((s_up - l_cfo) % n + n) % n;
    return {l_cfo, l_sto};
}

int consensus_symbol(std::span<const DechirpedSpectrum> spectra) {
    if (spectra.empty()) throw std::invalid_argument("consensus_symbol: no spectra");
    const PowerSpectrum p = accumulate_power(spectra);
    const auto k = argmax(p.p);
    // a padded spectrum maps back to the chip grid
    return static_cast<int>((k * p.n / p.p.size()) % p.n);
}

ConsensusSymbols consensus_symbols(std::span<const DechirpedSpectrum> up,
                                   std::span<const DechirpedSpectrum> down) {
    return {consensus_symbol(up), consensus_symbol(down)};
}

double est_sfo_from_cfo(int l_cfo, double lambda_cfo, const ModemParams& params) {
    return (l_cfo + lambda_cfo) * params.bw / (params.n() * params.fc);
}

}  // namespace lora
