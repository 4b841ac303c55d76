#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace srnn {

struct EcgSeries {
    std::vector<double> values_mv;
    double sample_rate_hz = 128.0;
    std::string record_id;

    size_t size() const { return values_mv.size(); }
};

struct AnnotationRange {
    size_t begin = 0;   // inclusive
    size_t end = 0;     // inclusive
    bool abnormal = false;
};

struct AnnotationSet {
    std::vector<AnnotationRange> ranges; // sorted, non-overlapping
};

// CSV grammar: optional header line, then `time_or_index,value_mV` with an
// optional ignored extra column. LF or CRLF. NaN/inf values are rejected.
EcgSeries parse_ecg_csv(std::istream& in);
void write_ecg_csv(const EcgSeries& s, std::ostream& out);

// Annotation grammar: lines `start,end,label` with label `normal` or
// `abnormal`, start <= end, ranges within [0, series_len) and non-overlapping.
AnnotationSet parse_annotations(std::istream& in, size_t series_len);
void write_annotations(const AnnotationSet& a, std::ostream& out);

// Knobs for the distorted beats injected into the synthetic trace.
struct SyntheticAnomaly {
    double qrs_amplitude_mv = -1.3; // inverted by default
    double qrs_width_s = 0.05;      // widened vs the normal 0.012 s
};

struct SyntheticEcgConfig {
    int n_beats = 4;
    std::vector<int> anomaly_beats;
    uint64_t seed = 0;
    int samples_per_beat = 128; // one beat per second at 128 samples/s
    SyntheticAnomaly anomaly;
    // Beat-to-beat variability: each beat's bump amplitudes are scaled by
    // independent uniform factors in [1-j, 1+j], and white Gaussian noise of
    // the given deviation is added per sample. Both default to zero, which
    // keeps the trace exactly periodic.
    double amplitude_jitter = 0.0;
    double noise_mv = 0.0;
};

// Periodic P-QRS-T template (three Gaussian bumps) inside the [-2, 0.5] mV
// window, with the listed beats replaced by a distorted template and
// annotated abnormal around the distorted region.
std::pair<EcgSeries, AnnotationSet> make_synthetic_ecg(const SyntheticEcgConfig& cfg);

// Train/test slicing by beat count.
EcgSeries slice_series(const EcgSeries& s, size_t begin, size_t len);

} // namespace srnn
