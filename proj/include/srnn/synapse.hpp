#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace srnn {

struct SynapseParams {
    double tau_syn_s = 5e-3;
    double alpha_amp = 50e-12;  // current injected per unit weight
    double w_max = 2.0;
    double lr_sdsp = 0.1;       // weight step per plasticity event
    bool sdsp_enabled = true;

    void validate() const {
        if (!(tau_syn_s > 0.0)) throw std::invalid_argument("SynapseParams: tau_syn_s must be positive");
        if (!(alpha_amp > 0.0)) throw std::invalid_argument("SynapseParams: alpha_amp must be positive");
        if (!(w_max > 0.0)) throw std::invalid_argument("SynapseParams: w_max must be positive");
        if (!(lr_sdsp > 0.0) || lr_sdsp > w_max)
            throw std::invalid_argument("SynapseParams: lr_sdsp must lie in (0, w_max]");
        const double n = w_max / lr_sdsp;
        if (std::abs(n - std::round(n)) > 1e-9)
            throw std::invalid_argument("SynapseParams: lr_sdsp must divide w_max");
    }
};

// Per-edge weight. Weights are stored non-negative; inhibition is carried by
// the sign at current injection.
struct EdgeWeight {
    double weight = 1.0;
    bool plastic = false;
    int8_t sign = +1;  // +1 excitatory, -1 inhibitory
};

// One aggregated current accumulator per post-synaptic neuron. Valid because
// all edges share tau_syn and the current equation is linear.
struct SynapticCurrent {
    double amps = 0.0;
};

inline void decay_current(SynapticCurrent& s, const SynapseParams& p, double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("decay_current: dt must be positive");
    s.amps *= std::exp(-dt_s / p.tau_syn_s);
}

inline void inject_spike(SynapticCurrent& s, const EdgeWeight& e, const SynapseParams& p) {
    s.amps += static_cast<double>(e.sign) * p.alpha_amp * e.weight;
}

// Weight update on pre-synaptic spike arrival: direction picked by the
// post-synaptic membrane potential against the learning thresholds,
// magnitude fixed at lr_sdsp, clamped to [0, w_max] and kept on the
// {n * lr_sdsp} grid.
inline void apply_sdsp(EdgeWeight& e, double v_mem_post,
                       double v_lthr_up, double v_lthr_down,
                       const SynapseParams& p) {
    double w = e.weight;
    if (v_mem_post > v_lthr_up) w = std::min(w + p.lr_sdsp, p.w_max);
    else if (v_mem_post < v_lthr_down) w = std::max(w - p.lr_sdsp, 0.0);
    else return;
    // Snap onto the weight grid when already within round-off of it, so long
    // update sequences from a grid-aligned start cannot drift.
    const double snapped = std::round(w / p.lr_sdsp) * p.lr_sdsp;
    if (std::abs(snapped - w) < 1e-9) w = std::clamp(snapped, 0.0, p.w_max);
    e.weight = w;
}

} // namespace srnn
