#include "lora/frac_delay.hpp"

#include <cmath>
#include <numbers>

namespace lora {

namespace {

constexpr int kHalf = kFracDelayTaps / 2;

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

double kaiser(double x, double half_width, double beta) {
    const double r = x / half_width;
    if (std::abs(r) >= 1.0) return 0.0;
    return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace

std::array<double, kFracDelayTaps> frac_delay_taps(double d) {
    std::array<double, kFracDelayTaps> h{};
    double sum = 0.0;
    for (int m = 0; m < kFracDelayTaps; ++m) {
        const double x = (m - (kHalf - 1)) - d;
        h[m] = sinc(x) * kaiser(x, kHalf, kFracDelayKaiserBeta);
        sum += h[m];
    }
    for (auto& v : h) v /= sum;
    return h;
}

cvec delay_samples(std::span<const cplx> x, double delay) {
    const double whole = std::floor(delay);
    const double frac = delay - whole;
    const long shift = static_cast<long>(whole);
    const long len = static_cast<long>(x.size());
    cvec y(x.size());
    if (frac == 0.0) {
        for (long k = 0; k < len; ++k) {
            const long j = k - shift;
            y[k] = (j >= 0 && j < len) ? x[j] : cplx{};
        }
        return y;
    }
    const auto h = frac_delay_taps(frac);
    // taps reversed so the inner loop walks x forwards
    std::array<double, kFracDelayTaps> rev{};
    for (int m = 0; m < kFracDelayTaps; ++m) rev[m] = h[kFracDelayTaps - 1 - m];
    const auto* xr = reinterpret_cast<const double*>(x.data());
    for (long k = 0; k < len; ++k) {
        const long lo = k - shift - kHalf;
        if (lo >= 0 && lo + kFracDelayTaps <= len) {
            double re = 0.0, im = 0.0;
            const double* p = xr + 2 * lo;
            for (int m = 0; m < kFracDelayTaps; ++m) {
                re += rev[m] * p[2 * m];
                im += rev[m] * p[2 * m + 1];
            }
            y[k] = {re, im};
            continue;
        }
        cplx acc{};
        for (int m = 0; m < kFracDelayTaps; ++m) {
            const long j = lo + m;
            if (j >= 0 && j < len) acc += rev[m] * x[j];
        }
        y[k] = acc;
    }
    return y;
}

}  // namespace lora
