#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace srnn {

// Linear map from per-bin excitatory firing rates to the predicted next-bin
// input rate. Bias is unpenalized by the ridge term.
struct ReadoutModel {
    std::vector<double> weights; // one per excitatory neuron
    double bias = 0.0;
    double lambda = 0.0;
    double training_rms_residual_hz = 0.0;
};

// Ridge regression via normal equations; lambda is relative to the mean
// squared feature scale so its effect is comparable across rate magnitudes.
// lambda == 0 falls back to plain least squares and reports rank deficiency.
ReadoutModel fit_readout(const std::vector<std::vector<double>>& features,
                         const std::vector<double>& targets, double lambda);

// Prediction, clamped below at 0 Hz.
double predict(const ReadoutModel& m, std::span<const double> rates);

void save_readout(const ReadoutModel& m, std::ostream& out);
ReadoutModel load_readout(std::istream& in);

} // namespace srnn
