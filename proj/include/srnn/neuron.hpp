#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srnn {

// Static parameters of a leaky integrate-and-fire neuron.
struct NeuronParams {
    double resistance_ohm = 400e6;
    double capacitance_farad = 10e-12;
    double reset_potential_v = 0.0;
    double refractory_s = 2e-3;
    double calcium_tau_s = 100e-3; // decay constant of the activity trace
    bool is_excitatory = true;

    double membrane_tau_s() const { return resistance_ohm * capacitance_farad; }

    void validate() const {
        if (!(resistance_ohm > 0.0) || !(capacitance_farad > 0.0))
            throw std::invalid_argument("NeuronParams: R and C must be positive");
        if (!(calcium_tau_s > 0.0))
            throw std::invalid_argument("NeuronParams: calcium_tau_s must be positive");
        if (refractory_s < 0.0)
            throw std::invalid_argument("NeuronParams: refractory_s must be >= 0");
        if (!std::isfinite(membrane_tau_s()))
            throw std::invalid_argument("NeuronParams: membrane time constant not finite");
    }
};

// Stepwise intrinsic-plasticity settings. The firing threshold moves on the
// grid {v_thr_min + n * threshold_step_v}; the learning thresholds track it
// at half its value when sync_learning_thresholds is set.
struct IpConfig {
    double threshold_step_v = 0.05;   // step of the firing threshold
    double learning_step_v = 0.025;   // step of the learning thresholds (= threshold_step_v / 2)
    double target_activity = 1.0;     // calcium level the neuron is regulated toward
    double healthy_band = 0.3;        // width parameter of the no-update band
    double v_thr_min = 0.1;
    double v_thr_max = 0.4;
    bool enabled = true;
    bool sync_learning_thresholds = true;

    void validate() const {
        if (!(healthy_band > 0.0) || !(healthy_band < 2.0))
            throw std::invalid_argument("IpConfig: healthy_band must lie in (0, 2)");
        if (!(v_thr_min < v_thr_max))
            throw std::invalid_argument("IpConfig: v_thr_min must be < v_thr_max");
        if (!(v_thr_min > 0.0))
            throw std::invalid_argument("IpConfig: v_thr_min must be positive");
        if (!(threshold_step_v > 0.0))
            throw std::invalid_argument("IpConfig: threshold_step_v must be positive");
        const double span = (v_thr_max - v_thr_min) / threshold_step_v;
        if (std::abs(span - std::round(span)) > 1e-9)
            throw std::invalid_argument("IpConfig: threshold_step_v must divide the threshold range");
        if (std::abs(learning_step_v - threshold_step_v / 2.0) > 1e-12)
            throw std::invalid_argument("IpConfig: learning_step_v must equal threshold_step_v / 2");
    }
};

// Dynamic per-neuron variables.
struct NeuronState {
    double v_mem = 0.0;
    double v_thr = 0.2;
    double v_lthr_up = 0.1;
    double v_lthr_down = 0.1;
    double calcium = 0.0;        // exponentially decaying spike count
    double refractory_left = 0.0;
};

// Membrane update with a precomputed decay factor exp(-dt / tau_mem).
// Exact for input current held constant over the step.
inline void advance_membrane(NeuronState& s, const NeuronParams& p,
                             double i_in_amp, double dt_s, double decay) {
    if (s.refractory_left > 0.0) {
        s.v_mem = p.reset_potential_v;
        s.refractory_left = std::max(0.0, s.refractory_left - dt_s);
        return;
    }
    s.v_mem = s.v_mem * decay + i_in_amp * p.resistance_ohm * (1.0 - decay);
}

inline void step_membrane(NeuronState& s, const NeuronParams& p,
                          double i_in_amp, double dt_s) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("step_membrane: dt must be positive");
    if (!std::isfinite(i_in_amp))
        throw std::invalid_argument("step_membrane: input current must be finite");
    advance_membrane(s, p, i_in_amp, dt_s, std::exp(-dt_s / p.membrane_tau_s()));
}

// Strict comparison: the membrane must exceed the threshold to fire.
inline bool check_fire(NeuronState& s, const NeuronParams& p) {
    if (s.refractory_left > 0.0 || !(s.v_mem > s.v_thr)) return false;
    s.v_mem = p.reset_potential_v;
    s.refractory_left = p.refractory_s;
    return true;
}

inline void update_calcium_decayed(NeuronState& s, bool fired, double decay) {
    s.calcium *= decay;
    if (fired) s.calcium += 1.0;
}

inline void update_calcium(NeuronState& s, const NeuronParams& p, bool fired, double dt_s) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("update_calcium: dt must be positive");
    update_calcium_decayed(s, fired, std::exp(-dt_s / p.calcium_tau_s));
}

// Stepwise threshold update, applied at the instant the neuron fires.
// When the clamp would be hit, the whole update (firing threshold and
// learning thresholds together) is suppressed, keeping the thresholds
// synchronized.
inline void apply_ip(NeuronState& s, const IpConfig& ip) {
    const double hi = (1.0 + ip.healthy_band / 2.0) * ip.target_activity;
    const double lo = (1.0 - ip.healthy_band / 2.0) * ip.target_activity;
    double dir;
    if (s.calcium > hi) dir = 1.0;
    else if (s.calcium < lo) dir = -1.0;
    else return;

    const double v_new = s.v_thr + dir * ip.threshold_step_v;
    if (v_new < ip.v_thr_min - 1e-12 || v_new > ip.v_thr_max + 1e-12) return;
    // Snap onto the grid so long update sequences cannot drift.
    const double n = std::round((v_new - ip.v_thr_min) / ip.threshold_step_v);
    s.v_thr = ip.v_thr_min + n * ip.threshold_step_v;
    if (ip.sync_learning_thresholds) {
        s.v_lthr_up = 0.5 * s.v_thr;
        s.v_lthr_down = 0.5 * s.v_thr;
    }
}

} // namespace srnn
