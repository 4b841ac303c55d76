#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "srnn/rng.hpp"

namespace srnn {

struct EncoderConfig {
    double f_poisson_max_hz = 150.0;
    double t_bin_s = 0.150;
    int n_input = 100;
    uint64_t seed = 1;
    // The affine rate map goes negative below -2 mV and past the maximum
    // above +0.5 mV; both ends are clamped.
    double rate_ceiling_factor = 1.2;

    void validate() const {
        if (!(f_poisson_max_hz > 0.0))
            throw std::invalid_argument("EncoderConfig: f_poisson_max_hz must be positive");
        if (!(t_bin_s > 0.0))
            throw std::invalid_argument("EncoderConfig: t_bin_s must be positive");
        if (n_input <= 0)
            throw std::invalid_argument("EncoderConfig: n_input must be positive");
    }
};

// Affine map from ECG potential (mV) to target firing rate (Hz), clamped to
// [0, ceiling * f_poisson_max].
inline double ecg_to_rate(double e_input_mv, double f_poisson_max_hz,
                          double ceiling_factor = 1.2) {
    if (!std::isfinite(e_input_mv))
        throw std::invalid_argument("ecg_to_rate: input must be finite");
    const double rate = f_poisson_max_hz * (4.0 + 2.0 * e_input_mv) / 5.0;
    return std::clamp(rate, 0.0, ceiling_factor * f_poisson_max_hz);
}

inline double measure_rate(long spike_count, double t_bin_s) {
    if (!(t_bin_s > 0.0))
        throw std::invalid_argument("measure_rate: t_bin_s must be positive");
    return static_cast<double>(spike_count) / t_bin_s;
}

// Bernoulli-per-step approximation of a Poisson process on the global clock.
inline std::vector<uint8_t> generate_poisson_bin(double rate_hz, double t_bin_s,
                                                 double dt_s, std::mt19937_64& rng) {
    if (rate_hz < 0.0) throw std::invalid_argument("generate_poisson_bin: negative rate");
    if (!(dt_s > 0.0) || !(t_bin_s > 0.0))
        throw std::invalid_argument("generate_poisson_bin: durations must be positive");
    const double p = rate_hz * dt_s;
    if (p >= 1.0)
        throw std::invalid_argument("generate_poisson_bin: rate * dt must be < 1");
    const auto steps = static_cast<size_t>(std::llround(t_bin_s / dt_s));
    std::vector<uint8_t> train(steps, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (size_t i = 0; i < steps; ++i)
        train[i] = unit(rng) < p ? 1 : 0;
    return train;
}

// One independent stream per input neuron; all neurons encode the same scalar
// sample with independent randomness.
class PoissonEncoder {
public:
    explicit PoissonEncoder(const EncoderConfig& cfg) : cfg_(cfg) {
        cfg.validate();
        streams_.reserve(static_cast<size_t>(cfg.n_input));
        for (int i = 0; i < cfg.n_input; ++i)
            streams_.push_back(make_rng(cfg.seed, {0x656e63u, static_cast<uint64_t>(i)}));
    }

    // Fills one spike flag per input neuron for a single dt step.
    void step(double rate_hz, double dt_s, std::vector<uint8_t>& spikes) {
        const double p = rate_hz * dt_s;
        if (p >= 1.0)
            throw std::invalid_argument("PoissonEncoder: rate * dt must be < 1");
        spikes.assign(streams_.size(), 0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (size_t i = 0; i < streams_.size(); ++i)
            spikes[i] = unit(streams_[i]) < p ? 1 : 0;
    }

    int n_input() const { return static_cast<int>(streams_.size()); }

    std::vector<std::mt19937_64>& streams() { return streams_; }
    const std::vector<std::mt19937_64>& streams() const { return streams_; }

private:
    EncoderConfig cfg_;
    std::vector<std::mt19937_64> streams_;
};

} // namespace srnn
