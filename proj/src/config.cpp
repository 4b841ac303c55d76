#include "srnn/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace srnn {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(trim(tok)));
    return out;
}

std::vector<int> parse_int_list(const std::string& v) {
    std::vector<int> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(trim(tok)));
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument("expected boolean, got '" + v + "'");
}

template <typename T>
std::string join_list(const std::vector<T>& v) {
    std::ostringstream ss;
    ss.precision(17);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) ss << ',';
        ss << v[i];
    }
    return ss.str();
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct KeyHandler {
    Setter set;
    Getter get;
};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

const std::map<std::string, KeyHandler>& key_table() {
    static const std::map<std::string, KeyHandler> table = {
        {"dt", {[](RunConfig& c, const std::string& v) { c.sim.dt_s = std::stod(v); },
                [](const RunConfig& c) { return fmt(c.sim.dt_s); }}},
        {"master_seed", {[](RunConfig& c, const std::string& v) { c.sim.master_seed = std::stoull(v); },
                         [](const RunConfig& c) { return std::to_string(c.sim.master_seed); }}},
        {"membrane_resistance", {[](RunConfig& c, const std::string& v) {
                                     c.sim.exc_neuron.resistance_ohm = std::stod(v);
                                     c.sim.inh_neuron.resistance_ohm = std::stod(v);
                                 },
                                 [](const RunConfig& c) { return fmt(c.sim.exc_neuron.resistance_ohm); }}},
        {"membrane_capacitance", {[](RunConfig& c, const std::string& v) {
                                      c.sim.exc_neuron.capacitance_farad = std::stod(v);
                                      c.sim.inh_neuron.capacitance_farad = std::stod(v);
                                  },
                                  [](const RunConfig& c) { return fmt(c.sim.exc_neuron.capacitance_farad); }}},
        {"reset_potential", {[](RunConfig& c, const std::string& v) {
                                 c.sim.exc_neuron.reset_potential_v = std::stod(v);
                                 c.sim.inh_neuron.reset_potential_v = std::stod(v);
                             },
                             [](const RunConfig& c) { return fmt(c.sim.exc_neuron.reset_potential_v); }}},
        {"refractory_time", {[](RunConfig& c, const std::string& v) {
                                 c.sim.exc_neuron.refractory_s = std::stod(v);
                                 c.sim.inh_neuron.refractory_s = std::stod(v);
                             },
                             [](const RunConfig& c) { return fmt(c.sim.exc_neuron.refractory_s); }}},
        {"calcium_tau", {[](RunConfig& c, const std::string& v) {
                             c.sim.exc_neuron.calcium_tau_s = std::stod(v);
                             c.sim.inh_neuron.calcium_tau_s = std::stod(v);
                         },
                         [](const RunConfig& c) { return fmt(c.sim.exc_neuron.calcium_tau_s); }}},
        {"initial_v_thr", {[](RunConfig& c, const std::string& v) { c.sim.initial_v_thr = std::stod(v); },
                           [](const RunConfig& c) { return fmt(c.sim.initial_v_thr); }}},
        {"inh_v_thr", {[](RunConfig& c, const std::string& v) { c.sim.inh_v_thr = std::stod(v); },
                       [](const RunConfig& c) { return fmt(c.sim.inh_v_thr); }}},
        {"tau_syn", {[](RunConfig& c, const std::string& v) { c.sim.synapse.tau_syn_s = std::stod(v); },
                     [](const RunConfig& c) { return fmt(c.sim.synapse.tau_syn_s); }}},
        {"alpha", {[](RunConfig& c, const std::string& v) { c.sim.synapse.alpha_amp = std::stod(v); },
                   [](const RunConfig& c) { return fmt(c.sim.synapse.alpha_amp); }}},
        {"w_max", {[](RunConfig& c, const std::string& v) {
                       c.sim.synapse.w_max = std::stod(v);
                       c.sim.topology.w_max = std::stod(v);
                   },
                   [](const RunConfig& c) { return fmt(c.sim.synapse.w_max); }}},
        {"lr_sdsp", {[](RunConfig& c, const std::string& v) { c.sim.synapse.lr_sdsp = std::stod(v); },
                     [](const RunConfig& c) { return fmt(c.sim.synapse.lr_sdsp); }}},
        {"sdsp_enabled", {[](RunConfig& c, const std::string& v) { c.sim.synapse.sdsp_enabled = parse_bool(v); },
                          [](const RunConfig& c) { return c.sim.synapse.sdsp_enabled ? "true" : "false"; }}},
        {"lr_thr", {[](RunConfig& c, const std::string& v) {
                        c.sim.ip.threshold_step_v = std::stod(v);
                        c.sim.ip.learning_step_v = std::stod(v) / 2.0;
                    },
                    [](const RunConfig& c) { return fmt(c.sim.ip.threshold_step_v); }}},
        {"target_activity", {[](RunConfig& c, const std::string& v) { c.sim.ip.target_activity = std::stod(v); },
                             [](const RunConfig& c) { return fmt(c.sim.ip.target_activity); }}},
        {"healthy_band", {[](RunConfig& c, const std::string& v) { c.sim.ip.healthy_band = std::stod(v); },
                          [](const RunConfig& c) { return fmt(c.sim.ip.healthy_band); }}},
        {"v_thr_min", {[](RunConfig& c, const std::string& v) { c.sim.ip.v_thr_min = std::stod(v); },
                       [](const RunConfig& c) { return fmt(c.sim.ip.v_thr_min); }}},
        {"v_thr_max", {[](RunConfig& c, const std::string& v) { c.sim.ip.v_thr_max = std::stod(v); },
                       [](const RunConfig& c) { return fmt(c.sim.ip.v_thr_max); }}},
        {"ip_enabled", {[](RunConfig& c, const std::string& v) { c.sim.ip.enabled = parse_bool(v); },
                        [](const RunConfig& c) { return c.sim.ip.enabled ? "true" : "false"; }}},
        {"threshold_sync", {[](RunConfig& c, const std::string& v) {
                                c.sim.ip.sync_learning_thresholds = parse_bool(v);
                                c.sweep.ablation.threshold_sync = c.sim.ip.sync_learning_thresholds;
                            },
                            [](const RunConfig& c) { return c.sim.ip.sync_learning_thresholds ? "true" : "false"; }}},
        {"f_poisson", {[](RunConfig& c, const std::string& v) { c.sim.encoder.f_poisson_max_hz = std::stod(v); },
                       [](const RunConfig& c) { return fmt(c.sim.encoder.f_poisson_max_hz); }}},
        {"t_bin", {[](RunConfig& c, const std::string& v) { c.sim.encoder.t_bin_s = std::stod(v); },
                   [](const RunConfig& c) { return fmt(c.sim.encoder.t_bin_s); }}},
        {"rate_ceiling_factor", {[](RunConfig& c, const std::string& v) { c.sim.encoder.rate_ceiling_factor = std::stod(v); },
                                 [](const RunConfig& c) { return fmt(c.sim.encoder.rate_ceiling_factor); }}},
        {"n_input", {[](RunConfig& c, const std::string& v) {
                         c.sim.encoder.n_input = std::stoi(v);
                         c.sim.topology.n_input = std::stoi(v);
                     },
                     [](const RunConfig& c) { return std::to_string(c.sim.encoder.n_input); }}},
        {"n_excitatory", {[](RunConfig& c, const std::string& v) { c.sim.topology.n_excitatory = std::stoi(v); },
                          [](const RunConfig& c) { return std::to_string(c.sim.topology.n_excitatory); }}},
        {"n_inhibitory", {[](RunConfig& c, const std::string& v) { c.sim.topology.n_inhibitory = std::stoi(v); },
                          [](const RunConfig& c) { return std::to_string(c.sim.topology.n_inhibitory); }}},
        {"n_output", {[](RunConfig& c, const std::string& v) { c.sim.topology.n_output = std::stoi(v); },
                      [](const RunConfig& c) { return std::to_string(c.sim.topology.n_output); }}},
        {"p_in", {[](RunConfig& c, const std::string& v) { c.sim.topology.p_in = std::stod(v); },
                  [](const RunConfig& c) { return fmt(c.sim.topology.p_in); }}},
        {"p_ee", {[](RunConfig& c, const std::string& v) { c.sim.topology.p_ee = std::stod(v); },
                  [](const RunConfig& c) { return fmt(c.sim.topology.p_ee); }}},
        {"p_ei", {[](RunConfig& c, const std::string& v) { c.sim.topology.p_ei = std::stod(v); },
                  [](const RunConfig& c) { return fmt(c.sim.topology.p_ei); }}},
        {"p_ie", {[](RunConfig& c, const std::string& v) { c.sim.topology.p_ie = std::stod(v); },
                  [](const RunConfig& c) { return fmt(c.sim.topology.p_ie); }}},
        {"allow_self_loops", {[](RunConfig& c, const std::string& v) { c.sim.topology.allow_self_loops = parse_bool(v); },
                              [](const RunConfig& c) { return c.sim.topology.allow_self_loops ? "true" : "false"; }}},
        {"initial_plastic_weight", {[](RunConfig& c, const std::string& v) { c.sim.topology.initial_plastic_weight = std::stod(v); },
                                    [](const RunConfig& c) { return fmt(c.sim.topology.initial_plastic_weight); }}},
        {"phase1_passes", {[](RunConfig& c, const std::string& v) { c.sim.phase1_passes = std::stoi(v); },
                           [](const RunConfig& c) { return std::to_string(c.sim.phase1_passes); }}},
        {"ridge_lambda", {[](RunConfig& c, const std::string& v) { c.sim.ridge_lambda = std::stod(v); },
                          [](const RunConfig& c) { return fmt(c.sim.ridge_lambda); }}},
        {"d_metric_input", {[](RunConfig& c, const std::string& v) {
                                if (v == "target") c.sim.d_metric_input = DMetricInput::Target;
                                else if (v == "realized") c.sim.d_metric_input = DMetricInput::Realized;
                                else throw std::invalid_argument("d_metric_input must be target or realized");
                            },
                            [](const RunConfig& c) {
                                return c.sim.d_metric_input == DMetricInput::Target ? "target" : "realized";
                            }}},
        {"ip_after_calcium_increment", {[](RunConfig& c, const std::string& v) { c.sim.ip_after_calcium_increment = parse_bool(v); },
                                        [](const RunConfig& c) { return c.sim.ip_after_calcium_increment ? "true" : "false"; }}},
        {"guard_band", {[](RunConfig& c, const std::string& v) { c.guard_band = std::stoull(v); },
                        [](const RunConfig& c) { return std::to_string(c.guard_band); }}},
        {"train_beats", {[](RunConfig& c, const std::string& v) { c.train_beats = std::stoi(v); },
                         [](const RunConfig& c) { return std::to_string(c.train_beats); }}},
        {"test_beats", {[](RunConfig& c, const std::string& v) { c.test_beats = std::stoi(v); },
                        [](const RunConfig& c) { return std::to_string(c.test_beats); }}},
        {"test_anomaly_beats", {[](RunConfig& c, const std::string& v) { c.test_anomaly_beats = parse_int_list(v); },
                                [](const RunConfig& c) { return join_list(c.test_anomaly_beats); }}},
        {"anomaly_qrs_amplitude", {[](RunConfig& c, const std::string& v) { c.anomaly_qrs_amplitude_mv = std::stod(v); },
                                   [](const RunConfig& c) { return fmt(c.anomaly_qrs_amplitude_mv); }}},
        {"anomaly_qrs_width", {[](RunConfig& c, const std::string& v) { c.anomaly_qrs_width_s = std::stod(v); },
                               [](const RunConfig& c) { return fmt(c.anomaly_qrs_width_s); }}},
        {"samples_per_beat", {[](RunConfig& c, const std::string& v) { c.samples_per_beat = std::stoi(v); },
                              [](const RunConfig& c) { return std::to_string(c.samples_per_beat); }}},
        {"data_jitter", {[](RunConfig& c, const std::string& v) { c.data_jitter = std::stod(v); },
                         [](const RunConfig& c) { return fmt(c.data_jitter); }}},
        {"data_noise", {[](RunConfig& c, const std::string& v) { c.data_noise_mv = std::stod(v); },
                        [](const RunConfig& c) { return fmt(c.data_noise_mv); }}},
        {"sweep_lr_sdsp", {[](RunConfig& c, const std::string& v) { c.sweep.lr_sdsp = parse_double_list(v); },
                           [](const RunConfig& c) { return join_list(c.sweep.lr_sdsp); }}},
        {"sweep_lr_thr", {[](RunConfig& c, const std::string& v) { c.sweep.lr_thr_v = parse_double_list(v); },
                          [](const RunConfig& c) { return join_list(c.sweep.lr_thr_v); }}},
        {"sweep_t_bin", {[](RunConfig& c, const std::string& v) { c.sweep.t_bin_s = parse_double_list(v); },
                         [](const RunConfig& c) { return join_list(c.sweep.t_bin_s); }}},
        {"sweep_n_input", {[](RunConfig& c, const std::string& v) { c.sweep.n_input = parse_int_list(v); },
                           [](const RunConfig& c) { return join_list(c.sweep.n_input); }}},
        {"sweep_f_poisson", {[](RunConfig& c, const std::string& v) { c.sweep.f_poisson_hz = parse_double_list(v); },
                             [](const RunConfig& c) { return join_list(c.sweep.f_poisson_hz); }}},
        {"sweep_repeats", {[](RunConfig& c, const std::string& v) { c.sweep.repeats = std::stoi(v); },
                           [](const RunConfig& c) { return std::to_string(c.sweep.repeats); }}},
        {"plasticity", {[](RunConfig& c, const std::string& v) { c.sweep.ablation.plasticity = plasticity_from_name(v); },
                        [](const RunConfig& c) { return plasticity_name(c.sweep.ablation.plasticity); }}},
    };
    return table;
}

} // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = key_table();
    auto it = table.find(key);
    if (it == table.end())
        throw std::invalid_argument("unknown config key '" + key + "'");
    it->second.set(cfg, value);
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_override(cfg, key, value);
        } catch (const std::exception& ex) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " +
                                     ex.what());
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

void write_config(const RunConfig& cfg, std::ostream& out) {
    for (const auto& [key, handler] : key_table())
        out << key << " = " << handler.get(cfg) << '\n';
}

} // namespace srnn
