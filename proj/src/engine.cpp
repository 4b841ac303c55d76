#include "srnn/engine.hpp"

#include "srnn/anomaly.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace srnn {

void SimConfig::validate() const {
    if (!(dt_s > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
    exc_neuron.validate();
    inh_neuron.validate();
    synapse.validate();
    ip.validate();
    encoder.validate();
    topology.validate();
    if (dt_s > exc_neuron.membrane_tau_s() / 10.0 || dt_s > inh_neuron.membrane_tau_s() / 10.0)
        throw std::invalid_argument("SimConfig: dt must be <= tau_mem / 10");
    const double steps = encoder.t_bin_s / dt_s;
    if (std::abs(steps - std::round(steps)) > 1e-6)
        throw std::invalid_argument("SimConfig: dt must divide t_bin");
    if (encoder.n_input != topology.n_input)
        throw std::invalid_argument("SimConfig: encoder and topology n_input differ");
    if (phase1_passes < 0)
        throw std::invalid_argument("SimConfig: phase1_passes must be >= 0");
}

Network::Network(Topology topo, const SimConfig& cfg)
    : cfg_(cfg), topo_(std::move(topo)), encoder_(cfg.encoder) {
    cfg_.validate();
    const int n = topo_.n_neurons();
    neurons_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        NeuronState& s = neurons_[static_cast<size_t>(i)];
        s.v_mem = 0.0;
        s.v_thr = topo_.is_excitatory(static_cast<uint32_t>(i)) ? cfg_.initial_v_thr
                                                                : cfg_.inh_v_thr;
        s.v_lthr_up = 0.5 * s.v_thr;
        s.v_lthr_down = 0.5 * s.v_thr;
    }
    i_syn_.assign(static_cast<size_t>(n), 0.0);
    build_adjacency();

    steps_per_bin_ = std::llround(cfg_.encoder.t_bin_s / cfg_.dt_s);
    mem_decay_exc_ = std::exp(-cfg_.dt_s / cfg_.exc_neuron.membrane_tau_s());
    mem_decay_inh_ = std::exp(-cfg_.dt_s / cfg_.inh_neuron.membrane_tau_s());
    ca_decay_exc_ = std::exp(-cfg_.dt_s / cfg_.exc_neuron.calcium_tau_s);
    ca_decay_inh_ = std::exp(-cfg_.dt_s / cfg_.inh_neuron.calcium_tau_s);
    syn_decay_ = std::exp(-cfg_.dt_s / cfg_.synapse.tau_syn_s);
}

void Network::build_adjacency() {
    input_edges_.assign(static_cast<size_t>(topo_.cfg.n_input), {});
    neuron_edges_.assign(static_cast<size_t>(topo_.n_neurons()), {});
    for (uint32_t eid = 0; eid < topo_.edges.size(); ++eid) {
        const Edge& e = topo_.edges[eid];
        switch (e.cls) {
            case EdgeClass::InputToExc:
                input_edges_[e.src].push_back(eid);
                break;
            case EdgeClass::ExcToExc:
            case EdgeClass::ExcToInh:
            case EdgeClass::InhToExc:
                neuron_edges_[e.src].push_back(eid);
                break;
            case EdgeClass::ExcToOutput:
                break; // readout is rate-based, not simulated
        }
    }
}

void Network::deliver(uint32_t edge_id) {
    Edge& e = topo_.edges[edge_id];
    const double w_at_arrival = e.w.weight;
    if (e.w.plastic && phase_.sdsp && cfg_.synapse.sdsp_enabled) {
        // Post-synaptic membrane sampled before this step's integration.
        const NeuronState& post = neurons_[e.dst];
        apply_sdsp(e.w, post.v_mem, post.v_lthr_up, post.v_lthr_down, cfg_.synapse);
    }
    i_syn_[e.dst] += static_cast<double>(e.w.sign) * cfg_.synapse.alpha_amp * w_at_arrival;
}

void Network::step(const std::vector<uint8_t>& input_spikes_now) {
    // (a) decay aggregated currents
    for (double& i : i_syn_) i *= syn_decay_;

    // (b) deliver spikes emitted at the previous step
    for (uint32_t src : pending_input_spikes_)
        for (uint32_t eid : input_edges_[src]) deliver(eid);
    for (uint32_t src : pending_fires_)
        for (uint32_t eid : neuron_edges_[src]) deliver(eid);

    // (c)-(f) integrate, fire, trace, threshold plasticity
    const size_t n_e = static_cast<size_t>(topo_.cfg.n_excitatory);
    std::vector<uint32_t> fired_now;
    for (size_t i = 0; i < neurons_.size(); ++i) {
        const bool exc = i < n_e;
        const NeuronParams& p = exc ? cfg_.exc_neuron : cfg_.inh_neuron;
        NeuronState& s = neurons_[i];
        advance_membrane(s, p, i_syn_[i], cfg_.dt_s, exc ? mem_decay_exc_ : mem_decay_inh_);
        const bool fired = check_fire(s, p);
        if (fired) fired_now.push_back(static_cast<uint32_t>(i));
        if (cfg_.ip_after_calcium_increment) {
            update_calcium_decayed(s, fired, exc ? ca_decay_exc_ : ca_decay_inh_);
            if (fired && exc && phase_.ip && cfg_.ip.enabled) apply_ip(s, cfg_.ip);
        } else {
            s.calcium *= exc ? ca_decay_exc_ : ca_decay_inh_;
            if (fired && exc && phase_.ip && cfg_.ip.enabled) apply_ip(s, cfg_.ip);
            if (fired) s.calcium += 1.0;
        }
    }

    pending_fires_ = std::move(fired_now);
    pending_input_spikes_.clear();
    for (uint32_t i = 0; i < input_spikes_now.size(); ++i)
        if (input_spikes_now[i]) pending_input_spikes_.push_back(i);
    ++clock_steps_;
}

BinRecord Network::run_bin(long k, double e_input_mv) {
    BinRecord rec;
    rec.k = k;
    rec.e_input_mv = e_input_mv;
    rec.f_in_hz = ecg_to_rate(e_input_mv, cfg_.encoder.f_poisson_max_hz,
                              cfg_.encoder.rate_ceiling_factor);
    rec.exc_counts.assign(static_cast<size_t>(topo_.cfg.n_excitatory), 0);

    long input_spike_total = 0;
    for (long s = 0; s < steps_per_bin_; ++s) {
        encoder_.step(rec.f_in_hz, cfg_.dt_s, spike_buf_);
        step(spike_buf_);
        for (uint8_t b : spike_buf_) input_spike_total += b;
        for (uint32_t n : pending_fires_)
            if (n < rec.exc_counts.size()) ++rec.exc_counts[n];
    }
    rec.f_in_realized_hz = static_cast<double>(input_spike_total) /
                           (static_cast<double>(encoder_.n_input()) * cfg_.encoder.t_bin_s);
    return rec;
}

uint64_t Network::plasticity_hash() const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (const Edge& e : topo_.edges) mix(e.w.weight);
    for (const NeuronState& s : neurons_) {
        mix(s.v_thr);
        mix(s.v_lthr_up);
        mix(s.v_lthr_down);
    }
    return h;
}

void Network::save_checkpoint(std::ostream& out) const {
    out.precision(17);
    out << "# srnn checkpoint v1\n";
    out << "# dt=" << cfg_.dt_s << " t_bin=" << cfg_.encoder.t_bin_s
        << " f_poisson=" << cfg_.encoder.f_poisson_max_hz
        << " lr_sdsp=" << cfg_.synapse.lr_sdsp << " lr_thr=" << cfg_.ip.threshold_step_v
        << " master_seed=" << cfg_.master_seed << "\n";
    out << "clock " << clock_steps_ << "\n";
    {
        std::ostringstream topo_text;
        save_topology(topo_, topo_text);
        out << "topology_bytes " << topo_text.str().size() << "\n" << topo_text.str();
    }
    out << "neurons " << neurons_.size() << "\n";
    for (const NeuronState& s : neurons_)
        out << s.v_mem << ' ' << s.v_thr << ' ' << s.v_lthr_up << ' ' << s.v_lthr_down
            << ' ' << s.calcium << ' ' << s.refractory_left << '\n';
    out << "currents " << i_syn_.size() << "\n";
    // Exponential decay drives currents into the denormal range; those carry
    // no information and round-trip poorly through text, so flush them.
    for (double c : i_syn_)
        out << (std::abs(c) < std::numeric_limits<double>::min() ? 0.0 : c) << '\n';
    out << "pending_fires " << pending_fires_.size();
    for (uint32_t f : pending_fires_) out << ' ' << f;
    out << "\npending_inputs " << pending_input_spikes_.size();
    for (uint32_t f : pending_input_spikes_) out << ' ' << f;
    out << "\nencoder_streams " << encoder_.streams().size() << "\n";
    for (const auto& rng : encoder_.streams()) out << rng << '\n';
}

Network Network::load_checkpoint(std::istream& in, const SimConfig& cfg) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# srnn checkpoint", 0) != 0)
        throw std::runtime_error("checkpoint: missing header");
    std::getline(in, line); // config echo, informational
    if (!std::getline(in, line) || line.rfind("clock ", 0) != 0)
        throw std::runtime_error("checkpoint: missing clock");
    const long clock = std::stol(line.substr(6));
    if (!std::getline(in, line) || line.rfind("topology_bytes ", 0) != 0)
        throw std::runtime_error("checkpoint: missing topology");
    const size_t n_bytes = std::stoull(line.substr(15));
    std::string topo_text(n_bytes, '\0');
    in.read(topo_text.data(), static_cast<std::streamsize>(n_bytes));
    std::istringstream topo_in(topo_text);
    Network net(load_topology(topo_in), cfg);
    net.clock_steps_ = clock;

    auto expect_count = [&](const char* key) -> size_t {
        if (!std::getline(in, line) || line.rfind(key, 0) != 0)
            throw std::runtime_error(std::string("checkpoint: expected ") + key);
        std::istringstream ss(line.substr(std::strlen(key)));
        size_t n;
        ss >> n;
        return n;
    };

    const size_t n_neurons = expect_count("neurons ");
    if (n_neurons != net.neurons_.size())
        throw std::runtime_error("checkpoint: neuron count mismatch");
    for (NeuronState& s : net.neurons_) {
        if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated neurons");
        std::istringstream ss(line);
        if (!(ss >> s.v_mem >> s.v_thr >> s.v_lthr_up >> s.v_lthr_down >> s.calcium >>
              s.refractory_left))
            throw std::runtime_error("checkpoint: bad neuron line");
    }
    const size_t n_cur = expect_count("currents ");
    if (n_cur != net.i_syn_.size())
        throw std::runtime_error("checkpoint: current count mismatch");
    for (double& c : net.i_syn_) {
        if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated currents");
        // strtod instead of stod: a denormal current must load as itself (or
        // zero), not raise an out-of-range error.
        char* end = nullptr;
        c = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) throw std::runtime_error("checkpoint: bad current line");
    }
    {
        if (!std::getline(in, line) || line.rfind("pending_fires ", 0) != 0)
            throw std::runtime_error("checkpoint: missing pending fires");
        std::istringstream ss(line.substr(14));
        size_t n;
        ss >> n;
        net.pending_fires_.resize(n);
        for (uint32_t& f : net.pending_fires_) ss >> f;
    }
    {
        if (!std::getline(in, line) || line.rfind("pending_inputs ", 0) != 0)
            throw std::runtime_error("checkpoint: missing pending inputs");
        std::istringstream ss(line.substr(15));
        size_t n;
        ss >> n;
        net.pending_input_spikes_.resize(n);
        for (uint32_t& f : net.pending_input_spikes_) ss >> f;
    }
    const size_t n_streams = expect_count("encoder_streams ");
    if (n_streams != net.encoder_.streams().size())
        throw std::runtime_error("checkpoint: encoder stream count mismatch");
    for (auto& rng : net.encoder_.streams()) {
        if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated rng state");
        std::istringstream ss(line);
        ss >> rng;
        if (ss.fail()) throw std::runtime_error("checkpoint: bad rng state");
    }
    return net;
}

void run_phase1(Network& net, const EcgSeries& train, int passes) {
    long k = 0;
    for (int pass = 0; pass < passes; ++pass)
        for (double v : train.values_mv) net.run_bin(k++, v);
}

std::vector<BinRecord> run_frozen(Network& net, const EcgSeries& series) {
    std::vector<BinRecord> records;
    records.reserve(series.size());
    for (size_t k = 0; k < series.size(); ++k)
        records.push_back(net.run_bin(static_cast<long>(k), series.values_mv[k]));
    return records;
}

ReadoutModel fit_readout_from_records(const std::vector<BinRecord>& records,
                                      double t_bin_s, double lambda) {
    if (records.size() < 2)
        throw std::invalid_argument("fit_readout_from_records: need at least 2 bins");
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(records.size() - 1);
    for (size_t k = 0; k + 1 < records.size(); ++k) {
        std::vector<double> rates(records[k].exc_counts.size());
        for (size_t i = 0; i < rates.size(); ++i)
            rates[i] = static_cast<double>(records[k].exc_counts[i]) / t_bin_s;
        x.push_back(std::move(rates));
        y.push_back(records[k + 1].f_in_hz);
    }
    return fit_readout(x, y, lambda);
}

std::vector<BinRecord> run_phase3(Network& net, const EcgSeries& test,
                                  const ReadoutModel& readout) {
    if (test.size() < 2)
        throw std::invalid_argument("run_phase3: test series must have at least 2 samples");
    auto records = run_frozen(net, test);
    const double t_bin = net.config().encoder.t_bin_s;
    std::vector<double> rates(records[0].exc_counts.size());
    for (auto& rec : records) {
        for (size_t i = 0; i < rates.size(); ++i)
            rates[i] = static_cast<double>(rec.exc_counts[i]) / t_bin;
        rec.f_out_hz = predict(readout, rates);
    }
    const bool realized = net.config().d_metric_input == DMetricInput::Realized;
    for (size_t k = 0; k + 1 < records.size(); ++k) {
        const double f_in_next =
            realized ? records[k + 1].f_in_realized_hz : records[k + 1].f_in_hz;
        records[k + 1].d_hz = deviation(records[k].f_out_hz, f_in_next);
    }
    return records;
}

} // namespace srnn
