#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lora/estimators.hpp"
#include "lora/params.hpp"
#include "lora/synchronizer.hpp"

namespace lora {

enum class SfoMode { none, payload_only, full, ideal };

std::string to_string(SfoMode mode);
SfoMode parse_sfo_mode(const std::string& s);  // none|payload|full|ideal

struct ExperimentConfig {
    ModemParams params;
    PreambleSpec preamble;
    double gamma_ppm = 32.0;
    std::vector<double> snr_grid{0.0};
    int n_frames = 100;
    int payload_len = 8;
    SfoMode sfo_mode = SfoMode::full;
    SyncConfig sync;
    std::uint64_t seed = 1;
};

struct OffsetTruth {
    int l_cfo = 0;
    double lambda_cfo = 0.0;
    int l_sto = 0;
    double lambda_sto = 0.0;
    double gamma = 0.0;
};

struct TrialRecord {
    OffsetTruth truth;
    OffsetEstimate estimate;    // final
    OffsetEstimate first_pass;
    int passes_run = 0;
    std::vector<int> sent;
    std::vector<int> decided;

    // Signed errors. The total offset error is split into a rounded integer
    // and a remainder in [-0.5, 0.5); timing wraps modulo N first.
    int err_l_cfo() const;
    double err_lambda_cfo() const;
    int err_l_sto(int n) const;
    double err_lambda_sto(int n) const;
    int err_l_cfo_first() const;
    double err_lambda_sto_first(int n) const;
    int symbol_errors() const;
};

struct ResultRow {
    double snr_db = 0.0;
    double rmse_l_cfo = 0.0;
    double rmse_lambda_cfo = 0.0;
    double rmse_l_sto = 0.0;
    double rmse_lambda_sto = 0.0;
    double ser = 0.0;
    long long frames = 0;
    long long symbols = 0;
};

using ResultTable = std::vector<ResultRow>;

// Per-point aggregate that also keeps first-pass statistics.
struct PointStats {
    ResultRow row;
    double rmse_l_cfo_first = 0.0;
    double rmse_lambda_sto_first = 0.0;
    double mean_passes = 0.0;
    long long symbol_errors = 0;
};

TrialRecord run_trial(const ExperimentConfig& config, double snr_db, std::uint64_t trial_index);

// Aggregates trials [0, n_frames) at one SNR point. Trials run on
// `threads` workers (0 = hardware concurrency) and are reduced in index
// order, so the result does not depend on scheduling.
PointStats run_point(const ExperimentConfig& config, double snr_db, unsigned threads = 0);

ResultTable run_sweep(const ExperimentConfig& config, unsigned threads = 0);

// Noisy received stream for one trial, as run_trial sees it.
cvec trial_stream(const ExperimentConfig& config, double snr_db, std::uint64_t trial_index,
                  OffsetTruth* truth = nullptr, std::vector<int>* payload = nullptr);

}  // namespace lora
