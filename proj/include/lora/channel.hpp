#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <random>
#include <span>

#include "lora/params.hpp"
#include "lora/waveform.hpp"

namespace lora {

struct ImpairmentConfig {
    double gamma = 0.0;  // relative clock error, 1e-6 per ppm
    double tau = 0.0;    // seconds into the frame at receiver sample 0
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    // Carrier offset in Hz used instead of gamma * fc. Lets tests decouple
    // the CFO from the SFO.
    std::optional<double> cfo_hz;
};

struct ChannelOffsets {
    double delta_fc = 0.0;  // Hz
    double fs_prime = 0.0;  // Hz
    int l_cfo = 0;
    double lambda_cfo = 0.0;  // [-0.5, 0.5)
    bool outside_estimation_range = false;  // |delta_fc| > bw/4
};

ChannelOffsets derive_offsets(double gamma, const ModemParams& params);

// Split a value in bins (or chips) into integer + fraction in [-0.5, 0.5).
void split_offset(double x, int& integer, double& fraction);

// Receiver samples of the frame under clock offset and timing offset. Sample
// k is the frame evaluated at k/fs' + tau, rotated by the carrier offset.
cvec sample_received(const FrameDescriptor& frame, const ImpairmentConfig& imp,
                     std::size_t n_samples);

// Largest sample count sample_received accepts for this frame and impairment.
std::size_t max_received_samples(const FrameDescriptor& frame, const ImpairmentConfig& imp);

using Rng = std::mt19937_64;

// Independent stream per (seed, keys...). Keys are typically SNR index and
// trial index.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

// Adds circular Gaussian noise with per-sample variance osr * 10^(-snr/10).
// A non-finite or +inf snr_db leaves the buffer untouched.
void add_awgn(std::span<cplx> buffer, double snr_db, int osr, Rng& rng);

double noise_variance(double snr_db, int osr);

}  // namespace lora
