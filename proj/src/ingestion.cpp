#include "srnn/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace srnn {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

} // namespace

EcgSeries parse_ecg_csv(std::istream& in) {
    EcgSeries s;
    std::string line;
    size_t line_no = 0;
    bool first_data_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_commas(line);
        if (fields.size() < 2)
            throw std::runtime_error("ECG CSV: line " + std::to_string(line_no) +
                                     ": expected at least 2 comma-separated fields");
        double t, v;
        const bool ok = parse_double(fields[0], t) && parse_double(fields[1], v);
        if (!ok) {
            // A single non-numeric leading line is accepted as a header.
            if (!first_data_seen && line_no == 1) continue;
            throw std::runtime_error("ECG CSV: parse error at line " + std::to_string(line_no));
        }
        if (!std::isfinite(v))
            throw std::runtime_error("ECG CSV: non-finite value at line " + std::to_string(line_no));
        s.values_mv.push_back(v);
        first_data_seen = true;
    }
    if (s.values_mv.empty())
        throw std::runtime_error("ECG CSV: no samples found");
    return s;
}

void write_ecg_csv(const EcgSeries& s, std::ostream& out) {
    out.precision(17);
    for (size_t i = 0; i < s.values_mv.size(); ++i)
        out << i << ',' << s.values_mv[i] << '\n';
}

AnnotationSet parse_annotations(std::istream& in, size_t series_len) {
    AnnotationSet a;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_commas(line);
        if (fields.size() != 3)
            throw std::runtime_error("annotations: line " + std::to_string(line_no) +
                                     ": expected start,end,label");
        AnnotationRange r;
        try {
            r.begin = std::stoull(fields[0]);
            r.end = std::stoull(fields[1]);
        } catch (const std::exception&) {
            throw std::runtime_error("annotations: line " + std::to_string(line_no) +
                                     ": bad index");
        }
        if (fields[2] == "normal") r.abnormal = false;
        else if (fields[2] == "abnormal") r.abnormal = true;
        else throw std::runtime_error("annotations: line " + std::to_string(line_no) +
                                      ": unknown label '" + fields[2] + "'");
        if (r.begin > r.end)
            throw std::runtime_error("annotations: line " + std::to_string(line_no) +
                                     ": start > end");
        if (r.end >= series_len)
            throw std::runtime_error("annotations: line " + std::to_string(line_no) +
                                     ": range exceeds series length");
        a.ranges.push_back(r);
    }
    std::sort(a.ranges.begin(), a.ranges.end(),
              [](const AnnotationRange& x, const AnnotationRange& y) { return x.begin < y.begin; });
    for (size_t i = 1; i < a.ranges.size(); ++i)
        if (a.ranges[i].begin <= a.ranges[i - 1].end)
            throw std::runtime_error("annotations: overlapping ranges at index " +
                                     std::to_string(a.ranges[i].begin));
    return a;
}

void write_annotations(const AnnotationSet& a, std::ostream& out) {
    for (const AnnotationRange& r : a.ranges)
        out << r.begin << ',' << r.end << ',' << (r.abnormal ? "abnormal" : "normal") << '\n';
}

namespace {

double gauss(double u, double mu, double sigma) {
    const double z = (u - mu) / sigma;
    return std::exp(-0.5 * z * z);
}

// Per-beat scale factors for the P, R and T bumps.
struct BeatScales {
    double p = 1.0, r = 1.0, t = 1.0;
};

// Normal beat: baseline -0.5 mV with P, R and T bumps; peak 0.45 mV. The R
// bump is kept wide enough that the trace stays smooth at typical per-beat
// sample counts.
double normal_beat(double u, const BeatScales& sc = {}) {
    return -0.5 + sc.p * 0.25 * gauss(u, 0.22, 0.035) + sc.r * 0.95 * gauss(u, 0.45, 0.03) +
           sc.t * 0.35 * gauss(u, 0.70, 0.05);
}

double anomalous_beat(double u, const SyntheticAnomaly& a, double beat_period_s,
                      const BeatScales& sc = {}) {
    const double width_u = a.qrs_width_s / beat_period_s;
    return -0.5 + sc.p * 0.25 * gauss(u, 0.22, 0.035) +
           sc.r * a.qrs_amplitude_mv * gauss(u, 0.45, width_u) +
           sc.t * 0.35 * gauss(u, 0.70, 0.05);
}

} // namespace

std::pair<EcgSeries, AnnotationSet> make_synthetic_ecg(const SyntheticEcgConfig& cfg) {
    if (cfg.n_beats < 2)
        throw std::invalid_argument("make_synthetic_ecg: need at least 2 beats");
    for (int b : cfg.anomaly_beats)
        if (b < 0 || b >= cfg.n_beats)
            throw std::invalid_argument("make_synthetic_ecg: anomaly beat out of range");

    EcgSeries s;
    s.sample_rate_hz = 128.0;
    s.record_id = "synthetic";
    const int spb = cfg.samples_per_beat;
    const double beat_period_s = static_cast<double>(spb) / s.sample_rate_hz;
    s.values_mv.reserve(static_cast<size_t>(cfg.n_beats) * static_cast<size_t>(spb));

    AnnotationSet ann;
    size_t prev_normal_start = 0;
    bool in_normal = true;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(1.0 - cfg.amplitude_jitter,
                                                  1.0 + cfg.amplitude_jitter);
    std::normal_distribution<double> noise(0.0, 1.0);

    for (int beat = 0; beat < cfg.n_beats; ++beat) {
        const bool abnormal =
            std::find(cfg.anomaly_beats.begin(), cfg.anomaly_beats.end(), beat) !=
            cfg.anomaly_beats.end();
        BeatScales sc;
        if (cfg.amplitude_jitter > 0.0) {
            sc.p = jitter(rng);
            sc.r = jitter(rng);
            sc.t = jitter(rng);
        }
        for (int i = 0; i < spb; ++i) {
            const double u = static_cast<double>(i) / static_cast<double>(spb);
            double v = abnormal ? anomalous_beat(u, cfg.anomaly, beat_period_s, sc)
                                : normal_beat(u, sc);
            if (cfg.noise_mv > 0.0)
                v += cfg.noise_mv * noise(rng);
            v = std::clamp(v, -2.0, 0.5);
            s.values_mv.push_back(v);
        }
        const size_t beat_start = static_cast<size_t>(beat) * static_cast<size_t>(spb);
        if (abnormal) {
            // Annotate the contiguous region where the waveform materially
            // deviates from the normal beat; weakly distorted shoulder
            // samples would otherwise dilute the abnormal class.
            constexpr double kDeviationMv = 0.8;
            int lo = spb, hi = -1;
            for (int i = 0; i < spb; ++i) {
                const double u = static_cast<double>(i) / static_cast<double>(spb);
                const double dev = std::abs(
                    std::clamp(anomalous_beat(u, cfg.anomaly, beat_period_s), -2.0, 0.5) -
                    std::clamp(normal_beat(u), -2.0, 0.5));
                if (dev >= kDeviationMv) {
                    lo = std::min(lo, i);
                    hi = std::max(hi, i);
                }
            }
            if (hi < 0) { // degenerate anomaly: fall back to the QRS neighborhood
                lo = static_cast<int>(0.40 * spb);
                hi = static_cast<int>(0.50 * spb);
            }
            const size_t ab_begin = beat_start + static_cast<size_t>(lo);
            const size_t ab_end = beat_start + static_cast<size_t>(hi);
            if (in_normal && ab_begin > prev_normal_start)
                ann.ranges.push_back({prev_normal_start, ab_begin - 1, false});
            ann.ranges.push_back({ab_begin, ab_end, true});
            prev_normal_start = ab_end + 1;
            in_normal = true;
        }
    }
    const size_t last = s.values_mv.size() - 1;
    if (prev_normal_start <= last)
        ann.ranges.push_back({prev_normal_start, last, false});
    return {std::move(s), std::move(ann)};
}

EcgSeries slice_series(const EcgSeries& s, size_t begin, size_t len) {
    if (begin + len > s.values_mv.size())
        throw std::out_of_range("slice_series: slice exceeds series");
    EcgSeries out;
    out.sample_rate_hz = s.sample_rate_hz;
    out.record_id = s.record_id;
    out.values_mv.assign(s.values_mv.begin() + static_cast<long>(begin),
                         s.values_mv.begin() + static_cast<long>(begin + len));
    return out;
}

} // namespace srnn
