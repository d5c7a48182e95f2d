#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lora/errors.hpp"
#include "lora/iq_file.hpp"
#include "lora/synchronizer.hpp"

namespace lorasync {

namespace {

struct ModeDefaults {
    double ppm;
    int frames;
    double snr_start, snr_stop, snr_step;
};

ModeDefaults defaults_for(Mode m) {
    switch (m) {
        case Mode::rmse: return {40.0, 1000, -25.0, 0.0, 1.0};
        case Mode::ser: return {32.0, 2000, -25.0, -15.0, 0.5};
        default: return {32.0, 1, 0.0, 0.0, 1.0};
    }
}

Mode parse_mode(const std::string& s) {
    if (s == "rmse") return Mode::rmse;
    if (s == "ser") return Mode::ser;
    if (s == "sync-file") return Mode::sync_file;
    return Mode::budget;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot open " + path + " for writing");
    f.exceptions(std::ios::badbit | std::ios::failbit);
    return f;
}

void sync_file(const CliArgs& a, std::ostream& out, std::ostream& err) {
    const lora::ExperimentConfig& c = a.experiment;
    const lora::cvec stream = lora::read_cf32(a.iq_in);
    lora::SyncConfig sync = c.sync;
    sync.preamble = c.preamble;
    bool track = true;
    if (c.sfo_mode == lora::SfoMode::none || c.sfo_mode == lora::SfoMode::payload_only) sync.passes_max = 1;
    if (c.sfo_mode == lora::SfoMode::none) track = false;

    const lora::SyncResult res = lora::synchronize(stream, sync, c.params);
    const auto n_sym = static_cast<std::size_t>(c.payload_len);
    const double need = res.payload_start + static_cast<double>(n_sym * c.params.sps()) * (1.0 + res.estimate.gamma_hat);
    if (need > static_cast<double>(stream.size()))
        throw lora::InsufficientData("stream ends before the requested payload");
    const lora::cvec payload = lora::extract_payload(stream, res, c.params, n_sym, track);
    const std::vector<int> symbols = lora::demodulate(payload, c.params, n_sym);

    if (res.cfo_out_of_range) err << "warning: carrier offset outside the unambiguous range\n";
    if (res.degenerate) err << "warning: degenerate spectrum during estimation\n";

    const lora::OffsetEstimate& e = res.estimate;
    if (a.format == lora::TableFormat::json) {
        nlohmann::json j;
        j["passes"] = res.passes_run;
        j["l_cfo"] = e.l_cfo;
        j["lambda_cfo"] = e.lambda_cfo;
        j["l_sto"] = e.l_sto;
        j["lambda_sto"] = e.lambda_sto;
        j["gamma_hat"] = e.gamma_hat;
        j["payload_start"] = res.payload_start;
        j["symbols"] = symbols;
        out << j.dump(2) << "\n";
        return;
    }
    std::ostringstream line;
    line.imbue(std::locale::classic());
    line << std::setprecision(10);
    line << res.passes_run << ',' << e.l_cfo << ',' << e.lambda_cfo << ',' << e.l_sto << ',' << e.lambda_sto << ','
         << e.gamma_hat << ',' << res.payload_start << ',';
    for (std::size_t i = 0; i < symbols.size(); ++i) line << (i ? ";" : "") << symbols[i];
    out << "passes,l_cfo,lambda_cfo,l_sto,lambda_sto,gamma_hat,payload_start,symbols\n" << line.str() << "\n";
}

void budget(const CliArgs& a, std::ostream& out) {
    std::vector<int> sfs;
    if (a.sf_given) sfs.push_back(a.experiment.params.sf);
    else for (int sf = 7; sf <= 12; ++sf) sfs.push_back(sf);
    std::vector<double> ppms;
    if (a.ppm_given) ppms.push_back(a.experiment.gamma_ppm);
    else for (int p = 1; p <= 100; ++p) ppms.push_back(p);

    nlohmann::json arr = nlohmann::json::array();
    std::ostringstream csv;
    csv.imbue(std::locale::classic());
    csv << "sf,ppm,max_symbols\n";
    for (int sf : sfs) {
        for (double ppm : ppms) {
            const auto b = lora::max_budget_before_error(ppm * 1e-6, sf);
            nlohmann::json j{{"sf", sf}, {"ppm", ppm}};
            j["max_symbols"] = b ? nlohmann::json(*b) : nlohmann::json(nullptr);
            arr.push_back(j);
            csv << sf << ',' << ppm << ',';
            if (b) csv << *b;
            csv << '\n';
        }
    }
    if (a.format == lora::TableFormat::json) out << arr.dump(2) << "\n";
    else out << csv.str();
}

}  // namespace

std::vector<double> snr_grid(double start, double stop, double step) {
    if (step == 0.0 || !std::isfinite(step)) throw UsageError("--snr-step must be nonzero");
    if (!std::isfinite(start) || !std::isfinite(stop)) throw UsageError("SNR bounds must be finite");
    const double span = (stop - start) / step;
    if (span < -1e-9) throw UsageError("--snr-step points away from --snr-stop");
    const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
    if (count > 100000) throw UsageError("SNR grid too large");
    std::vector<double> g;
    for (long long i = 0; i < count; ++i) g.push_back(start + static_cast<double>(i) * step);
    return g;
}

CliArgs parse_args(const std::vector<std::string>& args) {
    CLI::App app{"LoRa two-pass offset synchronizer and Monte Carlo driver", "lorasync"};
    std::string mode_s, sfo_s = "full", format_s = "csv";
    int sf = 12, osr = 1, n_up = 8, passes = 2, payload = 8, frames = 0;
    double bw = 250e3, fc = 868e6, ppm = 0.0, theta = 0.05;
    double snr_start = 0.0, snr_stop = 0.0, snr_step = 1.0;
    std::uint64_t seed = 1;
    CliArgs a;

    app.add_option("mode", mode_s, "rmse | ser | sync-file | budget")
        ->required()
        ->check(CLI::IsMember({"rmse", "ser", "sync-file", "budget"}));
    auto* o_sf = app.add_option("--sf", sf, "spreading factor (5-12)");
    app.add_option("--bw", bw, "bandwidth in Hz");
    app.add_option("--fc", fc, "carrier frequency in Hz");
    auto* o_ppm = app.add_option("--ppm", ppm, "oscillator offset in ppm");
    auto* o_start = app.add_option("--snr-start", snr_start, "first SNR point in dB");
    auto* o_stop = app.add_option("--snr-stop", snr_stop, "last SNR point in dB");
    auto* o_step = app.add_option("--snr-step", snr_step, "SNR step in dB");
    auto* o_frames = app.add_option("--frames", frames, "frames per SNR point");
    app.add_option("--payload", payload, "payload symbols per frame");
    app.add_option("--n-up", n_up, "preamble up-chirps");
    app.add_option("--osr", osr, "oversampling ratio");
    app.add_option("--sfo-comp", sfo_s, "none | payload | full | ideal")
        ->check(CLI::IsMember({"none", "payload", "payload-only", "full", "ideal"}));
    app.add_option("--passes", passes, "maximum estimation passes (1 or 2)");
    app.add_option("--theta", theta, "second-pass threshold in chips per symbol");
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--threads", a.threads, "worker threads, 0 for all cores");
    app.add_option("--out", a.out, "output path (default stdout)");
    app.add_option("--format", format_s, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--iq-dump", a.iq_dump, "write the first trial's stream as cf32");
    app.add_option("--iq-in", a.iq_in, "cf32 input for sync-file");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    a.mode = parse_mode(mode_s);
    const ModeDefaults d = defaults_for(a.mode);
    a.sf_given = o_sf->count() > 0;
    a.ppm_given = o_ppm->count() > 0;
    if (!a.ppm_given) ppm = d.ppm;
    if (o_frames->count() == 0) frames = d.frames;
    if (o_start->count() == 0) snr_start = d.snr_start;
    if (o_stop->count() == 0) snr_stop = o_start->count() ? snr_start : d.snr_stop;
    if (o_step->count() == 0) snr_step = d.snr_step;

    lora::ExperimentConfig& c = a.experiment;
    try {
        c.params = lora::ModemParams(sf, bw, fc, osr);
        c.params.validate();
        c.preamble.n_up = n_up;
        c.preamble.validate(c.params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    c.sfo_mode = lora::parse_sfo_mode(sfo_s);
    c.gamma_ppm = ppm;
    c.n_frames = frames;
    c.payload_len = payload;
    c.seed = seed;
    c.sync.passes_max = passes;
    c.sync.theta = theta;
    c.sync.preamble = c.preamble;
    a.format = format_s == "json" ? lora::TableFormat::json : lora::TableFormat::csv;

    if (!std::isfinite(ppm) || std::abs(ppm) >= 1e5) throw UsageError("--ppm out of range");
    if (frames < 1) throw UsageError("--frames must be >= 1");
    if (payload < 1) throw UsageError("--payload must be >= 1");
    if (passes != 1 && passes != 2) throw UsageError("--passes must be 1 or 2");
    if (!(theta >= 0.0)) throw UsageError("--theta must be >= 0");
    if (a.mode == Mode::sync_file && a.iq_in.empty()) throw UsageError("sync-file needs --iq-in");
    if (a.mode != Mode::sync_file && !a.iq_in.empty()) throw UsageError("--iq-in is only used by sync-file");
    if ((a.mode == Mode::sync_file || a.mode == Mode::budget) && !a.iq_dump.empty())
        throw UsageError("--iq-dump is only used by rmse and ser");
    if (a.mode == Mode::rmse || a.mode == Mode::ser) c.snr_grid = snr_grid(snr_start, snr_stop, snr_step);
    return a;
}

int run(const CliArgs& a, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    if (!a.out.empty()) file = open_out(a.out);
    std::ostream& dst = a.out.empty() ? out : file;

    switch (a.mode) {
        case Mode::budget: budget(a, dst); break;
        case Mode::sync_file: sync_file(a, dst, err); break;
        case Mode::rmse:
        case Mode::ser: {
            if (!a.iq_dump.empty())
                lora::write_cf32(a.iq_dump, lora::trial_stream(a.experiment, a.experiment.snr_grid.front(), 0));
            lora::ResultTable table;
            for (double snr : a.experiment.snr_grid) {
                table.push_back(lora::run_point(a.experiment, snr, a.threads).row);
                err << "snr " << snr << " dB done\n";
            }
            lora::write_results(table, dst, a.format);
            break;
        }
    }
    dst.flush();
    return kExitOk;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliArgs a;
    try {
        a = parse_args(args);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for options\n";
        return kExitUsage;
    }
    try {
        return run(a, out, err);
    } catch (const lora::InsufficientData& e) {
        err << "insufficient data: " << e.what() << "\n";
        return kExitInsufficientData;
    } catch (const lora::MalformedFile& e) {
        err << "malformed file: " << e.what() << "\n";
        return kExitMalformedFile;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace lorasync
