#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "srnn/encoding.hpp"
#include "srnn/ingestion.hpp"
#include "srnn/neuron.hpp"
#include "srnn/readout.hpp"
#include "srnn/synapse.hpp"
#include "srnn/topology.hpp"

namespace srnn {

enum class DMetricInput { Target, Realized };

struct SimConfig {
    double dt_s = 1e-4;
    NeuronParams exc_neuron;
    NeuronParams inh_neuron;
    double inh_v_thr = 0.2;       // inhibitory thresholds stay fixed
    double initial_v_thr = 0.2;
    SynapseParams synapse;
    IpConfig ip;
    EncoderConfig encoder;
    TopologyConfig topology;
    int phase1_passes = 3;
    double ridge_lambda = 1e-3;
    DMetricInput d_metric_input = DMetricInput::Target;
    // Threshold plasticity looks at the calcium value before the spike's own
    // increment; after the +1 the trace can never sit below the healthy band,
    // which would make the update one-directional.
    bool ip_after_calcium_increment = false;
    uint64_t master_seed = 1;

    void validate() const;
};

// Which plasticity rules run during a step; both are off in phases 2 and 3.
struct PhaseFlags {
    bool sdsp = false;
    bool ip = false;
};

struct BinRecord {
    long k = 0;
    double e_input_mv = 0.0;
    double f_in_hz = 0.0;              // target rate from the affine map
    double f_in_realized_hz = 0.0;     // measured mean input-neuron rate
    std::vector<uint32_t> exc_counts;
    double f_out_hz = std::numeric_limits<double>::quiet_NaN();
    double d_hz = std::numeric_limits<double>::quiet_NaN();
};

// Clock-driven network simulation. One instance is owned by one logical
// thread; instances are independent.
class Network {
public:
    Network(Topology topo, const SimConfig& cfg);

    void set_phase(PhaseFlags flags) { phase_ = flags; }
    PhaseFlags phase() const { return phase_; }

    // Advances one dt: decay currents, deliver spikes queued from the
    // previous step (input and recurrent alike, one-step delay), integrate
    // membranes, detect fires, update calcium, apply threshold plasticity.
    // `input_spikes_now` is one flag per input neuron generated this step;
    // it is queued for delivery at the next step.
    void step(const std::vector<uint8_t>& input_spikes_now);

    // Presents one sample for t_bin: encodes it to Poisson spikes and
    // accumulates per-excitatory-neuron spike counts.
    BinRecord run_bin(long k, double e_input_mv);

    const SimConfig& config() const { return cfg_; }
    const Topology& topology() const { return topo_; }
    Topology& topology() { return topo_; }
    const std::vector<NeuronState>& neurons() const { return neurons_; }
    std::vector<NeuronState>& neurons() { return neurons_; }
    const std::vector<double>& synaptic_currents() const { return i_syn_; }
    const std::vector<uint32_t>& fired_last_step() const { return pending_fires_; }
    long clock_steps() const { return clock_steps_; }
    int n_excitatory() const { return topo_.cfg.n_excitatory; }

    // FNV-style hash over all weights and thresholds; used to assert the
    // plasticity freeze in phases 2 and 3.
    uint64_t plasticity_hash() const;

    void save_checkpoint(std::ostream& out) const;
    static Network load_checkpoint(std::istream& in, const SimConfig& cfg);

private:
    void build_adjacency();
    void deliver(uint32_t edge_id);

    SimConfig cfg_;
    Topology topo_;
    std::vector<NeuronState> neurons_;
    std::vector<double> i_syn_;
    std::vector<std::vector<uint32_t>> input_edges_;   // per input neuron
    std::vector<std::vector<uint32_t>> neuron_edges_;  // per middle-layer neuron
    std::vector<uint32_t> pending_fires_;
    std::vector<uint32_t> pending_input_spikes_;
    PoissonEncoder encoder_;
    PhaseFlags phase_;
    long clock_steps_ = 0;
    long steps_per_bin_ = 0;
    // cached per-step decay factors
    double mem_decay_exc_ = 0.0, mem_decay_inh_ = 0.0;
    double ca_decay_exc_ = 0.0, ca_decay_inh_ = 0.0;
    double syn_decay_ = 0.0;
    std::vector<uint8_t> spike_buf_;
};

// Unsupervised pass(es) over the training series with the current phase
// flags; plasticity flags must be set by the caller beforehand.
void run_phase1(Network& net, const EcgSeries& train, int passes);

// One frozen pass, returning per-bin records (used both for readout fitting
// and as the test phase driver).
std::vector<BinRecord> run_frozen(Network& net, const EcgSeries& series);

// Readout fit on rates(k) -> f_in(k+1) row alignment.
ReadoutModel fit_readout_from_records(const std::vector<BinRecord>& records,
                                      double t_bin_s, double lambda);

// Test phase: fills f_out for every bin and d at bins 1..n-1.
std::vector<BinRecord> run_phase3(Network& net, const EcgSeries& test,
                                  const ReadoutModel& readout);

} // namespace srnn
