#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lora/estimators.hpp"
#include "lora/params.hpp"

namespace lora {

struct SyncConfig {
    int passes_max = 2;
    double theta = 0.05;  // chips per symbol; pass 2 runs when |gamma_hat| * N exceeds it
    PreambleSpec preamble;
};

struct PassResult {
    // Offsets at stream sample 0. The timing part is read under the pass's
    // own drift assumption (gamma_prior), so an uncompensated pass reports
    // the timing it measured across the up-chirps without drift correction.
    OffsetEstimate estimate;
    // Timing at stream sample 0 after correcting for the drift left over in
    // the analysed windows, using gamma_hat. This is what the payload
    // alignment uses.
    double anchor_chips = 0.0;
    // Stream sample (fractional) where payload symbol 0 starts.
    double payload_start = 0.0;
};

struct SyncResult {
    int passes_run = 0;
    OffsetEstimate estimate;
    OffsetEstimate first_pass;
    double payload_start = 0.0;
    std::size_t aligned_stream_offset = 0;  // payload_start rounded to a sample
    bool cfo_out_of_range = false;
    bool degenerate = false;
};

// Phase (radians) that a clock offset gamma_hat adds to sample n of the
// preamble, with n counted from a symbol boundary. Negated for down-chirps.
double sfo_phase(std::size_t n, double gamma_hat, const ModemParams& params, ChirpKind direction);

// Phase (radians) the drift adds to the whole of preamble symbol l on top of
// sfo_phase. Zero for l = 0. Negated for down-chirps.
double sfo_symbol_phase(std::size_t l, double gamma_hat, const ModemParams& params, ChirpKind direction);

// y[n] * exp(-j 2 pi (cfo/N) (B/fs) n)
cvec compensate_cfo(std::span<const cplx> stream, double cfo_bins, const ModemParams& params);

// Delays the stream by lambda chips (lambda * osr samples).
cvec resample_frac_sto(std::span<const cplx> stream, double lambda_chips, const ModemParams& params);

// One synchronization iteration without building the aligned stream.
// sto_hint is the timing at stream sample 0 in chips from an earlier pass;
// without it the analysis windows are placed on the up-chirp peak.
PassResult estimate_pass(std::span<const cplx> stream, double gamma_prior, const SyncConfig& config,
                         const ModemParams& params, std::optional<double> sto_hint = std::nullopt);

struct AlignedPass {
    PassResult result;
    // Input with the estimated CFO removed, shifted so that sample 0 sits on
    // the first symbol boundary at or after the stream start.
    cvec aligned;
};

AlignedPass sync_pass(std::span<const cplx> stream, double gamma_prior, const SyncConfig& config,
                      const ModemParams& params, std::optional<double> sto_hint = std::nullopt);

SyncResult synchronize(std::span<const cplx> stream, const SyncConfig& config,
                       const ModemParams& params);

// Samples between drop/duplicate corrections, fs / (2 B |gamma_hat|);
// empty when gamma_hat is zero.
std::optional<double> compensation_period(double gamma_hat, const ModemParams& params);

// Drops (gamma_hat > 0) or repeats (gamma_hat < 0) a sample whenever the
// accumulated drift since sample 0 passes half a sample.
cvec payload_sfo_track(std::span<const cplx> stream, double gamma_hat, const ModemParams& params);

// floor(1 / (2 gamma N)); empty means unbounded.
std::optional<long long> max_budget_before_error(double gamma, int sf);

// Payload samples starting exactly at payload symbol 0, CFO removed, and
// drift-tracked when track is set. Samples past the stream end are zero.
cvec extract_payload(std::span<const cplx> stream, const SyncResult& sync, const ModemParams& params,
                     std::size_t n_symbols, bool track);

std::vector<int> demodulate(std::span<const cplx> aligned, const ModemParams& params,
                            std::size_t n_symbols);

}  // namespace lora
