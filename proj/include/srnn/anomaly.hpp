#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace srnn {

enum class SampleLabel : uint8_t { Unlabeled = 0, Normal = 1, Abnormal = 2 };

struct AnnotatedSeries {
    std::vector<double> d_hz;
    std::vector<SampleLabel> labels; // same length as d_hz
};

struct MarginResult {
    double d_no_max_hz = 0.0;
    double d_ab_min_hz = 0.0;
    double w_thr_hz = 0.0;                  // d_ab_min - d_no_max, may be negative
    std::optional<double> f_thr_hz;         // midpoint, present only when w_thr > 0
};

inline double deviation(double f_out_hz, double f_in_next_hz) {
    if (!std::isfinite(f_out_hz) || !std::isfinite(f_in_next_hz))
        throw std::invalid_argument("deviation: inputs must be finite");
    return std::abs(f_out_hz - f_in_next_hz);
}

inline MarginResult margin(const AnnotatedSeries& s) {
    if (s.d_hz.size() != s.labels.size())
        throw std::invalid_argument("margin: D/label length mismatch");
    bool any_normal = false, any_abnormal = false;
    MarginResult r;
    for (size_t k = 0; k < s.d_hz.size(); ++k) {
        switch (s.labels[k]) {
            case SampleLabel::Normal:
                r.d_no_max_hz = any_normal ? std::max(r.d_no_max_hz, s.d_hz[k]) : s.d_hz[k];
                any_normal = true;
                break;
            case SampleLabel::Abnormal:
                r.d_ab_min_hz = any_abnormal ? std::min(r.d_ab_min_hz, s.d_hz[k]) : s.d_hz[k];
                any_abnormal = true;
                break;
            case SampleLabel::Unlabeled:
                break;
        }
    }
    if (!any_normal) throw std::runtime_error("margin: no normal-labeled samples");
    if (!any_abnormal) throw std::runtime_error("margin: no abnormal-labeled samples");
    r.w_thr_hz = r.d_ab_min_hz - r.d_no_max_hz;
    if (r.w_thr_hz > 0.0)
        r.f_thr_hz = 0.5 * (r.d_no_max_hz + r.d_ab_min_hz);
    return r;
}

// Strict comparison: only deviations above the judgment threshold count.
inline bool detect(double d_hz, double f_thr_hz) {
    if (f_thr_hz < 0.0) throw std::invalid_argument("detect: f_thr must be >= 0");
    return d_hz > f_thr_hz;
}

} // namespace srnn
