#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srnn/anomaly.hpp"
#include "srnn/engine.hpp"

namespace srnn {

enum class Plasticity { None, SdspOnly, SdspPlusIp };

Plasticity plasticity_from_name(const std::string& name);
const char* plasticity_name(Plasticity p);

struct Ablation {
    Plasticity plasticity = Plasticity::SdspPlusIp;
    bool threshold_sync = true;
};

struct ExperimentResult {
    ReadoutModel readout;
    std::vector<BinRecord> test_records;
    AnnotatedSeries d_series;
    std::optional<MarginResult> margin; // absent when a label class is missing
    uint64_t final_plasticity_hash = 0;
};

// Per-sample labels from the annotation ranges. Normal samples within
// `guard_band` of an abnormal range are excluded (left unlabeled), since the
// one-step deviation can bleed across the boundary.
std::vector<SampleLabel> labels_from_annotations(const AnnotationSet& ann,
                                                 size_t series_len,
                                                 size_t guard_band = 2);

// Full three-phase run: unsupervised reconstruction per the ablation flags,
// readout fit on the training series, deviation series on the test series.
ExperimentResult run_experiment(const SimConfig& cfg, const EcgSeries& train,
                                const EcgSeries& test, const AnnotationSet& test_ann,
                                const Ablation& ablation, size_t guard_band = 2);

struct SweepSpec {
    std::vector<double> lr_sdsp = {0.1, 0.2, 0.5, 1.0, 2.0};
    std::vector<double> lr_thr_v = {0.025, 0.05, 0.1, 0.3};
    std::vector<double> t_bin_s = {0.150};
    std::vector<int> n_input = {100};
    std::vector<double> f_poisson_hz = {150.0};
    int repeats = 1;
    Ablation ablation;

    void validate() const;
    size_t n_cells() const {
        return lr_sdsp.size() * lr_thr_v.size() * t_bin_s.size() * n_input.size() *
               f_poisson_hz.size();
    }
};

struct SweepRow {
    double lr_sdsp = 0.0, lr_thr_v = 0.0, t_bin_s = 0.0;
    int n_input = 0;
    double f_poisson_hz = 0.0;
    uint64_t seed = 0;
    std::optional<MarginResult> margin;
    std::string error; // nonempty when the cell failed
};

// Runs every cell x repeat on a worker pool. Output order is the cell
// enumeration order, independent of the number of jobs; per-cell seeds are
// a pure hash of (master seed, cell coordinates, repeat).
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SimConfig& base_cfg,
                                const EcgSeries& train, const EcgSeries& test,
                                const AnnotationSet& test_ann, int jobs);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_sweep_cell_means(const std::vector<SweepRow>& rows, std::ostream& out);

// `k,d_hz,label` trace of the deviation series.
void write_dk_trace(const AnnotatedSeries& s, std::ostream& out);

// Applies a sweep cell's coordinates to a config copy.
SimConfig apply_cell(const SimConfig& base, double lr_sdsp, double lr_thr_v,
                     double t_bin_s, int n_input, double f_poisson_hz, uint64_t seed);

} // namespace srnn
