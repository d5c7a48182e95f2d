#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "lora/channel.hpp"
#include "lora/demod.hpp"
#include "lora/estimators.hpp"
#include "lora/synchronizer.hpp"
#include "lora/waveform.hpp"

using namespace lora;

namespace {

// Up-chirp spectra of the first n_up - 1 windows of a preamble.
std::vector<DechirpedSpectrum> preamble_spectra(const cvec& y, const ModemParams& p, int count, int zero_pad) {
    std::vector<DechirpedSpectrum> out;
    for (int l = 0; l < count; ++l)
        out.push_back(symbol_spectrum(std::span<const cplx>(y).subspan(l * p.sps(), p.sps()), p, ChirpKind::up, zero_pad));
    return out;
}

cvec preamble(const ModemParams& p, const ImpairmentConfig& imp, int symbols = 8) {
    const FrameDescriptor f = build_frame(PreambleSpec{}, {}, p);
    return sample_received(f, imp, symbols * p.sps());
}

// Forward model of the two dechirped preamble peaks.
void forward(int l_cfo, int l_sto, int n, int& s_up, int& s_down) {
    s_up = ((l_cfo + l_sto) % n + n) % n;
    s_down = ((l_cfo - l_sto) % n + n) % n;
}

}  // namespace

TEST_CASE("signed fold") {
    CHECK(gamma_fold(3, 16) == 3);
    CHECK(gamma_fold(10, 16) == -6);
    CHECK(gamma_fold(8, 16) == -8);
    CHECK(gamma_fold(7, 16) == 7);
    CHECK(gamma_fold(0, 16) == 0);
    CHECK(gamma_fold(15, 16) == -1);
}

TEST_CASE("half wrap") {
    CHECK(wrap_half(0.0) == 0.0);
    CHECK(wrap_half(0.5) == -0.5);
    CHECK(wrap_half(-0.5) == -0.5);
    CHECK(wrap_half(1.25) == doctest::Approx(0.25));
    CHECK(wrap_half(-0.75) == doctest::Approx(0.25));
}

TEST_CASE("three-line constants") {
    const RctslConstants c(1024);
    const double pi = std::numbers::pi;
    CHECK(c.u == doctest::Approx(64.0 * 1024 / (std::pow(pi, 5) + 32 * pi)));
    CHECK(c.v == doctest::Approx(c.u * pi * pi / 4));
    CHECK(c.u > 0);
    CHECK(c.v > 0);
}

TEST_CASE("integer solve examples") {
    int su = 0, sd = 0;
    forward(5, 3, 128, su, sd);
    CHECK(su == 8);
    CHECK(sd == 2);
    auto r = est_int_cfo_sto(8, 2, 128);
    CHECK(r.l_cfo == 5);
    CHECK(r.l_sto == 3);

    r = est_int_cfo_sto(0, 0, 128);
    CHECK(r.l_cfo == 0);
    CHECK(r.l_sto == 0);

    forward(-5, 3, 128, su, sd);
    CHECK(su == 126);
    CHECK(sd == 120);
    r = est_int_cfo_sto(126, 120, 128);
    CHECK(r.l_cfo == -5);
    CHECK(r.l_sto == 3);
}

TEST_CASE("odd sums truncate toward zero") {
    // 2 L + 1 with L = 5: folded 11 -> 5; -11 -> -5
    auto r = est_int_cfo_sto(11, 0, 128);
    CHECK(r.l_cfo == 5);
    CHECK(r.l_sto == 6);
    r = est_int_cfo_sto(128 - 11, 0, 128);
    CHECK(r.l_cfo == -5);
    CHECK(r.l_sto == (128 - 11 + 5) % 128);
}

TEST_CASE("integer solve recovers every pair") {
    for (int sf = 5; sf <= 8; ++sf) {
        const int n = 1 << sf;
        int wrong = 0;
        for (int lc = -n / 4; lc < n / 4; ++lc) {
            for (int ls = 0; ls < n; ++ls) {
                int su = 0, sd = 0;
                forward(lc, ls, n, su, sd);
                const auto r = est_int_cfo_sto(su, sd, n);
                wrong += r.l_cfo != lc || r.l_sto != ls;
            }
        }
        CAPTURE(sf);
        CHECK(wrong == 0);
    }
}

TEST_CASE("fractional carrier offset") {
    const ModemParams p(9, 250e3, 868e6, 1);
    ImpairmentConfig imp;
    imp.cfo_hz = 0.0;
    auto spec = preamble_spectra(preamble(p, imp), p, 7, 0);
    CHECK(std::abs(est_frac_cfo(spec).value) < 1e-9);

    imp.cfo_hz = 0.25 * p.bw / p.n();
    spec = preamble_spectra(preamble(p, imp), p, 7, 0);
    CHECK(std::abs(est_frac_cfo(spec).value - 0.25) < 1e-6);
}

TEST_CASE("fractional carrier offset under clock drift") {
    // 0.25 bins of carrier offset, clock fast by 40 ppm; the estimate drops
    // by gamma / (1 + gamma)^2
    for (int sf = 7; sf <= 12; ++sf) {
        for (double tau : {0.0, 0.3}) {
            const ModemParams p(sf, 250e3, 868e6, 1);
            ImpairmentConfig imp;
            imp.gamma = 40e-6;
            imp.cfo_hz = 0.25 * p.bw / p.n();
            imp.tau = tau / p.bw;
            const auto spec = preamble_spectra(preamble(p, imp), p, 7, 0);
            const double g = imp.gamma;
            CAPTURE(sf);
            CHECK(std::abs(est_frac_cfo(spec).value - (0.25 - g / ((1 + g) * (1 + g)))) < 1e-4);
        }
    }
}

TEST_CASE("fractional carrier offset sweep") {
    const ModemParams p(8, 250e3, 868e6, 1);
    double worst = 0.0;
    for (double lam = -0.5; lam < 0.5; lam += 0.05) {
        ImpairmentConfig imp;
        imp.cfo_hz = (3 + lam) * p.bw / p.n();
        imp.tau = 17.3 / p.bw;
        const auto est = est_frac_cfo(preamble_spectra(preamble(p, imp), p, 7, 0));
        CHECK(est.value >= -0.5);
        CHECK(est.value < 0.5);
        worst = std::max(worst, std::abs(wrap_half(est.value - lam)));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("degenerate spectra") {
    const ModemParams p(7, 250e3, 868e6, 1);
    const std::vector<DechirpedSpectrum> zeros(3, spectrum(cvec(p.sps()), p, 0));
    const auto c = est_frac_cfo(zeros);
    CHECK(c.value == 0.0);
    CHECK(c.degenerate);
    const std::vector<DechirpedSpectrum> zpad(3, spectrum(cvec(p.sps()), p, p.n()));
    const auto s = est_frac_sto(accumulate_power(zpad));
    CHECK(s.value == 0.0);
    CHECK(s.degenerate);
}

TEST_CASE("fractional timing sweep") {
    for (int sf : {7, 8, 10, 12}) {
        const ModemParams p(sf, 250e3, 868e6, 1);
        double worst = 0.0;
        double last = -1.0;
        bool monotone = true;
        for (double lam = -0.45; lam <= 0.4501; lam += 0.05) {
            ImpairmentConfig imp;
            // windows start on a symbol boundary, as the synchronizer places
            // them; an integer misalignment of k chips leaves k samples past
            // the chirp wrap with a phase jump of 2 pi lam
            imp.tau = (p.n() + lam) / p.bw;
            const cvec y = preamble(p, imp, 7);
            const auto est = est_frac_sto(accumulate_power(preamble_spectra(y, p, 6, p.n())));
            worst = std::max(worst, std::abs(est.value - lam));
            monotone = monotone && est.value > last;
            last = est.value;
        }
        CAPTURE(sf);
        CHECK(worst < 0.02);
        CHECK(monotone);
    }
    const ModemParams p(9, 250e3, 868e6, 1);
    const auto at_zero = est_frac_sto(accumulate_power(preamble_spectra(preamble(p, ImpairmentConfig{}), p, 7, p.n())));
    CHECK(std::abs(at_zero.value) < 1e-3);
}

TEST_CASE("fractional timing floor under clock drift") {
    // carrier offset removed exactly, windows at the stream start: the drift
    // across the up-chirps pulls the estimate well away from the truth
    const ModemParams p(10, 250e3, 868e6, 1);
    ImpairmentConfig imp;
    imp.gamma = 40e-6;
    imp.tau = 0.3 / p.bw;
    const cvec y = preamble(p, imp);
    const double cfo_rx_bins = imp.gamma * p.fc * p.n() / (p.bw * (1 + imp.gamma));
    const cvec clean = compensate_cfo(y, cfo_rx_bins, p);
    const auto est = est_frac_sto(accumulate_power(preamble_spectra(clean, p, 7, p.n())));
    CHECK(std::abs(est.value - 0.3) > 0.1);
}

TEST_CASE("consensus symbols") {
    const ModemParams p(8, 250e3, 868e6, 1);
    const std::vector<DechirpedSpectrum> same(8, symbol_spectrum(modulate_symbol(77, p), p, ChirpKind::up));
    CHECK(consensus_symbol(same) == 77);

    std::vector<DechirpedSpectrum> burst = same;
    cvec noisy = modulate_symbol(77, p);
    Rng rng = make_rng(11, {});
    add_awgn(noisy, -3.0, 1, rng);
    for (std::size_t k = 0; k < noisy.size(); ++k) noisy[k] += 2.0 * modulate_symbol(5, p)[k];
    burst[2] = symbol_spectrum(noisy, p, ChirpKind::up);
    CHECK(detect_symbol(burst[2]) == 5);
    CHECK(consensus_symbol(burst) == 77);

    const std::vector<DechirpedSpectrum> up{symbol_spectrum(modulate_symbol(9, p), p, ChirpKind::up)};
    const std::vector<DechirpedSpectrum> down{symbol_spectrum(modulate_symbol(0, p, ChirpKind::down), p, ChirpKind::down)};
    const auto both = consensus_symbols(up, down);
    CHECK(both.s_up == detect_symbol(up[0]));
    CHECK(both.s_down == detect_symbol(down[0]));

    // padded spectra report on the chip grid
    const std::vector<DechirpedSpectrum> pad(3, symbol_spectrum(modulate_symbol(77, p), p, ChirpKind::up, p.n()));
    CHECK(consensus_symbol(pad) == 77);
}

TEST_CASE("clock offset from carrier offset") {
    const ModemParams p(10, 250e3, 868e6, 1);
    CHECK(est_sfo_from_cfo(142, 0.213, p) == doctest::Approx(4.0e-5).epsilon(1e-4));
    CHECK(est_sfo_from_cfo(0, 0.0, p) == 0.0);
    for (double g : {-37e-6, 1e-6, 32e-6, 40e-6}) {
        const ChannelOffsets o = derive_offsets(g, p);
        CHECK(est_sfo_from_cfo(o.l_cfo, o.lambda_cfo, p) == doctest::Approx(g).epsilon(1e-9));
    }
}
