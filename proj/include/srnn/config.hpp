#pragma once

#include <iosfwd>
#include <string>

#include "srnn/engine.hpp"
#include "srnn/experiment.hpp"

namespace srnn {

// Everything a run needs, loadable from one `key = value` file.
struct RunConfig {
    SimConfig sim;
    SweepSpec sweep;
    size_t guard_band = 2;
    // Synthetic data generation.
    int train_beats = 3;
    int test_beats = 4;
    std::vector<int> test_anomaly_beats = {2};
    double anomaly_qrs_amplitude_mv = -1.3;
    double anomaly_qrs_width_s = 0.05;
    int samples_per_beat = 128;
    double data_jitter = 0.0;
    double data_noise_mv = 0.0;
};

// Line-oriented `key = value`; '#' starts a comment; unknown keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

// Every key with its current value, suitable for re-parsing (run manifest).
void write_config(const RunConfig& cfg, std::ostream& out);

// Applies a single `key=value` override (CLI flags win over the file).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

} // namespace srnn
