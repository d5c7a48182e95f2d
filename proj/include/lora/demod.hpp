#pragma once

#include <span>
#include <vector>

#include "lora/params.hpp"

namespace lora {

struct DechirpedSpectrum {
    cvec bins;  // length n + zero_pad
    int n = 0;
    int zero_pad = 0;

    std::size_t n_dft() const { return bins.size(); }
    // argmax |bins|, lowest index on ties
    std::size_t peak() const;
};

struct PowerSpectrum {
    std::vector<double> p;
    int n = 0;
};

// Base up-chirp x_0 for these params, cached.
const cvec& base_upchirp(const ModemParams& params);

// Multiplies by conj(x_0) for ChirpKind::up and by x_0 for ChirpKind::down.
cvec dechirp(std::span<const cplx> symbol, const ModemParams& params, ChirpKind direction);

// DFT of the dechirped buffer after folding osr interleaved phases down to N
// samples and appending zero_pad zeros.
DechirpedSpectrum spectrum(std::span<const cplx> dechirped, const ModemParams& params,
                           int zero_pad = 0);

// Dechirp + spectrum in one step.
DechirpedSpectrum symbol_spectrum(std::span<const cplx> symbol, const ModemParams& params,
                                  ChirpKind direction, int zero_pad = 0);

int detect_symbol(const DechirpedSpectrum& spec);

PowerSpectrum accumulate_power(std::span<const DechirpedSpectrum> spectra);

std::size_t argmax(std::span<const double> v);

}  // namespace lora
