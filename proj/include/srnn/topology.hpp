#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "srnn/synapse.hpp"

namespace srnn {

enum class EdgeClass : uint8_t {
    InputToExc = 0,
    ExcToExc = 1,
    ExcToInh = 2,
    InhToExc = 3,
    ExcToOutput = 4,
};
constexpr int kNumEdgeClasses = 5;

const char* edge_class_name(EdgeClass c);
EdgeClass edge_class_from_name(const std::string& name);

struct TopologyConfig {
    int n_input = 100;
    int n_excitatory = 160;
    int n_inhibitory = 40;
    int n_output = 1;
    double p_in = 0.10;
    double p_ee = 0.05;
    double p_ei = 0.02;
    double p_ie = 0.10;
    double p_ii = 0.0; // kept at zero; inhibitory neurons never connect to each other
    double w_max = 2.0;
    double initial_plastic_weight = 1.0;
    uint64_t seed = 1;
    bool allow_self_loops = false;

    void validate() const;
};

// src/dst index spaces: input edges use input indices [0, n_input) for src;
// all other srcs and every recurrent dst index into the middle layer, where
// excitatory neurons occupy [0, n_excitatory) and inhibitory
// [n_excitatory, n_excitatory + n_inhibitory). Output edges use output
// indices [0, n_output) for dst.
struct Edge {
    uint32_t src = 0;
    uint32_t dst = 0;
    EdgeWeight w;
    EdgeClass cls = EdgeClass::ExcToExc;
};

// Immutable random graph; the per-edge weight slots are the only thing a
// simulation mutates.
struct Topology {
    TopologyConfig cfg;
    std::vector<Edge> edges; // grouped by class, classes in enum order

    int n_neurons() const { return cfg.n_excitatory + cfg.n_inhibitory; }
    bool is_excitatory(uint32_t neuron) const {
        return neuron < static_cast<uint32_t>(cfg.n_excitatory);
    }
    size_t count(EdgeClass c) const;
};

Topology build_network(const TopologyConfig& cfg);

struct ClassDegreeStats {
    EdgeClass cls;
    size_t edge_count = 0;
    int in_min = 0, in_max = 0;
    int out_min = 0, out_max = 0;
    double in_mean = 0.0, out_mean = 0.0;
};

struct DegreeReport {
    std::vector<ClassDegreeStats> per_class;
    std::vector<uint32_t> isolated_excitatory; // zero total in-degree
};

DegreeReport degree_report(const Topology& t);

// Plain-text edge list: header with config echo, then one line per edge
// `class src dst weight plastic_flag`. Weights are printed at full precision
// so a round trip is bit-exact.
void save_topology(const Topology& t, std::ostream& out);
Topology load_topology(std::istream& in);

// Dense crossbar view of the recurrent weight matrix (rows = post-synaptic,
// columns = pre-synaptic middle-layer neurons); absent edges are zeros.
// Inhibitory columns carry negative entries.
std::vector<double> dense_weight_matrix(const Topology& t);

} // namespace srnn
