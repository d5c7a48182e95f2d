#include "lora/simulator.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "lora/channel.hpp"
#include "lora/waveform.hpp"

namespace lora {

std::string to_string(SfoMode mode) {
    switch (mode) {
        case SfoMode::none: return "none";
        case SfoMode::payload_only: return "payload";
        case SfoMode::full: return "full";
        case SfoMode::ideal: return "ideal";
    }
    return "?";
}

SfoMode parse_sfo_mode(const std::string& s) {
    if (s == "none") return SfoMode::none;
    if (s == "payload" || s == "payload-only") return SfoMode::payload_only;
    if (s == "full") return SfoMode::full;
    if (s == "ideal") return SfoMode::ideal;
    throw std::invalid_argument("unknown sfo mode: " + s);
}

namespace {

// Total error split as round + remainder, so a fraction that flips across
// +-0.5 together with its integer part is not counted as an integer miss.
double timing_error(const OffsetEstimate& e, const OffsetTruth& t, int n) {
    double d = std::fmod(e.sto_chips() - (t.l_sto + t.lambda_sto), static_cast<double>(n));
    if (d >= n / 2.0) d -= n;
    if (d < -n / 2.0) d += n;
    return d;
}

double cfo_error(const OffsetEstimate& e, const OffsetTruth& t) {
    return e.cfo_bins() - (t.l_cfo + t.lambda_cfo);
}

int integer_part(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

int TrialRecord::err_l_cfo() const { return integer_part(cfo_error(estimate, truth)); }
double TrialRecord::err_lambda_cfo() const { return wrap_half(cfo_error(estimate, truth)); }
int TrialRecord::err_l_sto(int n) const { return integer_part(timing_error(estimate, truth, n)); }
double TrialRecord::err_lambda_sto(int n) const { return wrap_half(timing_error(estimate, truth, n)); }
int TrialRecord::err_l_cfo_first() const { return integer_part(cfo_error(first_pass, truth)); }
double TrialRecord::err_lambda_sto_first(int n) const {
    return wrap_half(timing_error(first_pass, truth, n));
}
int TrialRecord::symbol_errors() const {
    int e = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) e += (i >= decided.size() || decided[i] != sent[i]);
    return e;
}

namespace {

double channel_gamma(const ExperimentConfig& c) {
    return c.sfo_mode == SfoMode::ideal ? 0.0 : c.gamma_ppm * 1e-6;
}

}  // namespace

cvec trial_stream(const ExperimentConfig& config, double snr_db, std::uint64_t trial_index,
                  OffsetTruth* truth, std::vector<int>* payload_out) {
    const ModemParams& p = config.params;
    const int n = p.n();
    Rng rng = make_rng(config.seed, {std::bit_cast<std::uint64_t>(snr_db), trial_index});

    std::uniform_real_distribution<double> tau_dist(0.0, static_cast<double>(n));
    const double tau_chips = tau_dist(rng);
    std::uniform_int_distribution<int> sym_dist(0, n - 1);
    std::vector<int> payload(static_cast<std::size_t>(config.payload_len));
    for (auto& v : payload) v = sym_dist(rng);

    const FrameDescriptor frame = build_frame(config.preamble, payload, p);
    ImpairmentConfig imp;
    imp.gamma = channel_gamma(config);
    imp.tau = tau_chips / p.bw;
    imp.snr_db = snr_db;
    imp.seed = config.seed;
    cvec stream = sample_received(frame, imp, max_received_samples(frame, imp));
    add_awgn(stream, snr_db, p.osr, rng);

    if (truth) {
        const ChannelOffsets off = derive_offsets(imp.gamma, p);
        truth->gamma = imp.gamma;
        truth->l_cfo = off.l_cfo;
        truth->lambda_cfo = off.lambda_cfo;
        int l = 0;
        double lam = 0.0;
        split_offset(tau_chips, l, lam);
        truth->l_sto = ((l % n) + n) % n;
        truth->lambda_sto = lam;
    }
    if (payload_out) *payload_out = std::move(payload);
    return stream;
}

TrialRecord run_trial(const ExperimentConfig& config, double snr_db, std::uint64_t trial_index) {
    TrialRecord rec;
    const cvec stream = trial_stream(config, snr_db, trial_index, &rec.truth, &rec.sent);

    SyncConfig sync = config.sync;
    sync.preamble = config.preamble;
    bool track = true;
    switch (config.sfo_mode) {
        case SfoMode::none:
            sync.passes_max = 1;
            track = false;
            break;
        case SfoMode::payload_only:
            sync.passes_max = 1;
            break;
        case SfoMode::full:
        case SfoMode::ideal:
            break;
    }
    const SyncResult res = synchronize(stream, sync, config.params);
    rec.estimate = res.estimate;
    rec.first_pass = res.first_pass;
    rec.passes_run = res.passes_run;
    const cvec payload = extract_payload(stream, res, config.params, rec.sent.size(), track);
    rec.decided = demodulate(payload, config.params, rec.sent.size());
    return rec;
}

PointStats run_point(const ExperimentConfig& config, double snr_db, unsigned threads) {
    if (config.n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");
    const auto total = static_cast<std::size_t>(config.n_frames);
    std::vector<TrialRecord> records(total);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) records[i] = run_trial(config, snr_db, i);
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }

    const int n = config.params.n();
    double s_lc = 0, s_lamc = 0, s_ls = 0, s_lams = 0, s_lc1 = 0, s_lams1 = 0, passes = 0;
    long long sym_err = 0, syms = 0;
    for (const auto& r : records) {
        s_lc += std::pow(r.err_l_cfo(), 2);
        s_lamc += std::pow(r.err_lambda_cfo(), 2);
        s_ls += std::pow(r.err_l_sto(n), 2);
        s_lams += std::pow(r.err_lambda_sto(n), 2);
        s_lc1 += std::pow(r.err_l_cfo_first(), 2);
        s_lams1 += std::pow(r.err_lambda_sto_first(n), 2);
        passes += r.passes_run;
        sym_err += r.symbol_errors();
        syms += static_cast<long long>(r.sent.size());
    }
    const double f = static_cast<double>(total);
    PointStats st;
    st.row.snr_db = snr_db;
    st.row.rmse_l_cfo = std::sqrt(s_lc / f);
    st.row.rmse_lambda_cfo = std::sqrt(s_lamc / f);
    st.row.rmse_l_sto = std::sqrt(s_ls / f);
    st.row.rmse_lambda_sto = std::sqrt(s_lams / f);
    st.row.ser = syms > 0 ? static_cast<double>(sym_err) / static_cast<double>(syms) : 0.0;
    st.row.frames = static_cast<long long>(total);
    st.row.symbols = syms;
    st.rmse_l_cfo_first = std::sqrt(s_lc1 / f);
    st.rmse_lambda_sto_first = std::sqrt(s_lams1 / f);
    st.mean_passes = passes / f;
    st.symbol_errors = sym_err;
    return st;
}

ResultTable run_sweep(const ExperimentConfig& config, unsigned threads) {
    if (config.snr_grid.empty()) throw std::invalid_argument("empty SNR grid");
    ResultTable table;
    for (double snr : config.snr_grid) table.push_back(run_point(config, snr, threads).row);
    return table;
}

}  // namespace lora
