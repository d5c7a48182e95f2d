#pragma once

#include <span>

#include "lora/demod.hpp"
#include "lora/params.hpp"

namespace lora {

struct OffsetEstimate {
    int l_cfo = 0;
    double lambda_cfo = 0.0;
    int l_sto = 0;
    double lambda_sto = 0.0;
    double gamma_hat = 0.0;
    bool degenerate = false;  // some estimator saw an all-zero spectrum

    double cfo_bins() const { return l_cfo + lambda_cfo; }
    double sto_chips() const { return l_sto + lambda_sto; }
};

struct RctslConstants {
    double u = 0.0;
    double v = 0.0;
    explicit RctslConstants(int n);
};

// k for k < n/2, k - n otherwise.
int gamma_fold(int k, int n);

// Wraps x into [-0.5, 0.5).
double wrap_half(double x);

struct FracEstimate {
    double value = 0.0;
    bool degenerate = false;
};

// Fractional CFO from the phase rotation between consecutive up-chirp
// spectra, summed over the five bins around each pair's peak.
FracEstimate est_frac_cfo(std::span<const DechirpedSpectrum> upchirps);

// Fractional STO from the three power lines around the peak of a spectrum
// zero padded to 2N. The peak bin itself sits on a half-chip grid, and the
// result is the total tone position folded into [-0.5, 0.5).
FracEstimate est_frac_sto(const PowerSpectrum& p);

struct IntegerOffsets {
    int l_cfo = 0;
    int l_sto = 0;
};

IntegerOffsets est_int_cfo_sto(int s_up, int s_down, int n);

struct ConsensusSymbols {
    int s_up = 0;
    int s_down = 0;
};

ConsensusSymbols consensus_symbols(std::span<const DechirpedSpectrum> up,
                                   std::span<const DechirpedSpectrum> down);

// Peak of the summed power across spectra.
int consensus_symbol(std::span<const DechirpedSpectrum> spectra);

double est_sfo_from_cfo(int l_cfo, double lambda_cfo, const ModemParams& params);

}  // namespace lora
