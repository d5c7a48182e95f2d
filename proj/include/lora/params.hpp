#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace lora {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

enum class ChirpKind { up, down };

// Modem numerology. fs is always osr * bw.
struct ModemParams {
    int sf = 12;
    double bw = 250e3;
    double fc = 868e6;
    int osr = 1;

    ModemParams() = default;
    ModemParams(int sf, double bw, double fc, int osr = 1);

    int n() const { return 1 << sf; }
    double fs() const { return bw * osr; }
    // samples per symbol at the nominal receive rate
    std::size_t sps() const { return static_cast<std::size_t>(n()) * osr; }
    double symbol_duration() const { return n() / bw; }

    // throws std::invalid_argument when sf/bw/osr are out of range
    void validate() const;
};

struct PreambleSpec {
    int n_up = 8;
    std::array<int, 2> sync_words{8, 16};
    double n_down = 2.25;

    double length_symbols() const { return n_up + 2 + n_down; }
    void validate(const ModemParams& params) const;
};

}  // namespace lora
