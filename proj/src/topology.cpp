#include "srnn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "srnn/rng.hpp"

namespace srnn {

namespace {

const char* const kClassNames[kNumEdgeClasses] = {
    "input_to_exc", "exc_to_exc", "exc_to_inh", "inh_to_exc", "exc_to_output"};

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string("TopologyConfig: ") + name +
                                    " must lie in [0, 1]");
    }
}

} // namespace

const char* edge_class_name(EdgeClass c) { return kClassNames[static_cast<int>(c)]; }

EdgeClass edge_class_from_name(const std::string& name) {
    for (int i = 0; i < kNumEdgeClasses; ++i)
        if (name == kClassNames[i]) return static_cast<EdgeClass>(i);
    throw std::invalid_argument("unknown edge class: " + name);
}

void TopologyConfig::validate() const {
    if (n_input <= 0 || n_excitatory <= 0 || n_inhibitory < 0 || n_output <= 0)
        throw std::invalid_argument("TopologyConfig: population sizes must be positive");
    check_probability(p_in, "p_in");
    check_probability(p_ee, "p_ee");
    check_probability(p_ei, "p_ei");
    check_probability(p_ie, "p_ie");
    if (p_ii != 0.0)
        throw std::invalid_argument("TopologyConfig: p_ii must be 0");
    if (!(w_max > 0.0))
        throw std::invalid_argument("TopologyConfig: w_max must be positive");
}

size_t Topology::count(EdgeClass c) const {
    size_t n = 0;
    for (const Edge& e : edges)
        if (e.cls == c) ++n;
    return n;
}

Topology build_network(const TopologyConfig& cfg) {
    cfg.validate();
    Topology t;
    t.cfg = cfg;

    std::mt19937_64 rng(derive_seed(cfg.seed, {0x746f706fu}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Uniform on (0, w_max]: 1 - unit() excludes 0.
    auto random_weight = [&]() { return cfg.w_max * (1.0 - unit(rng)); };

    const uint32_t n_e = static_cast<uint32_t>(cfg.n_excitatory);
    const uint32_t n_i = static_cast<uint32_t>(cfg.n_inhibitory);

    // Fixed sampling order per class keeps the edge list a pure function of
    // the config and seed.
    for (uint32_t s = 0; s < static_cast<uint32_t>(cfg.n_input); ++s)
        for (uint32_t d = 0; d < n_e; ++d)
            if (unit(rng) < cfg.p_in)
                t.edges.push_back({s, d, {random_weight(), false, +1}, EdgeClass::InputToExc});

    for (uint32_t s = 0; s < n_e; ++s)
        for (uint32_t d = 0; d < n_e; ++d) {
            if (s == d && !cfg.allow_self_loops) continue;
            if (unit(rng) < cfg.p_ee)
                t.edges.push_back({s, d, {cfg.initial_plastic_weight, true, +1}, EdgeClass::ExcToExc});
        }

    for (uint32_t s = 0; s < n_e; ++s)
        for (uint32_t d = n_e; d < n_e + n_i; ++d)
            if (unit(rng) < cfg.p_ei)
                t.edges.push_back({s, d, {random_weight(), false, +1}, EdgeClass::ExcToInh});

    for (uint32_t s = n_e; s < n_e + n_i; ++s)
        for (uint32_t d = 0; d < n_e; ++d)
            if (unit(rng) < cfg.p_ie)
                t.edges.push_back({s, d, {random_weight(), false, -1}, EdgeClass::InhToExc});

    // Readout layer: complete, weights fitted later.
    for (uint32_t s = 0; s < n_e; ++s)
        for (uint32_t d = 0; d < static_cast<uint32_t>(cfg.n_output); ++d)
            t.edges.push_back({s, d, {0.0, false, +1}, EdgeClass::ExcToOutput});

    return t;
}

DegreeReport degree_report(const Topology& t) {
    DegreeReport r;
    const int n_e = t.cfg.n_excitatory;
    const int n_i = t.cfg.n_inhibitory;
    std::vector<int> total_in(static_cast<size_t>(n_e), 0);

    for (int ci = 0; ci < kNumEdgeClasses; ++ci) {
        const EdgeClass cls = static_cast<EdgeClass>(ci);
        int src_n, dst_n;
        switch (cls) {
            case EdgeClass::InputToExc: src_n = t.cfg.n_input; dst_n = n_e; break;
            case EdgeClass::ExcToExc: src_n = n_e; dst_n = n_e; break;
            case EdgeClass::ExcToInh: src_n = n_e; dst_n = n_i; break;
            case EdgeClass::InhToExc: src_n = n_i; dst_n = n_e; break;
            case EdgeClass::ExcToOutput: src_n = n_e; dst_n = t.cfg.n_output; break;
            default: continue;
        }
        std::vector<int> out_deg(static_cast<size_t>(src_n), 0);
        std::vector<int> in_deg(static_cast<size_t>(dst_n), 0);
        size_t count = 0;
        for (const Edge& e : t.edges) {
            if (e.cls != cls) continue;
            ++count;
            uint32_t s = e.src;
            if (cls == EdgeClass::InhToExc) s -= static_cast<uint32_t>(n_e);
            uint32_t d = e.dst;
            if (cls == EdgeClass::ExcToInh) d -= static_cast<uint32_t>(n_e);
            ++out_deg[s];
            ++in_deg[d];
            if (cls != EdgeClass::ExcToOutput && e.dst < static_cast<uint32_t>(n_e))
                ++total_in[e.dst];
        }
        ClassDegreeStats st;
        st.cls = cls;
        st.edge_count = count;
        auto summarize = [](const std::vector<int>& v, int& mn, int& mx, double& mean) {
            mn = mx = v.empty() ? 0 : v[0];
            long sum = 0;
            for (int x : v) { mn = std::min(mn, x); mx = std::max(mx, x); sum += x; }
            mean = v.empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(v.size());
        };
        summarize(in_deg, st.in_min, st.in_max, st.in_mean);
        summarize(out_deg, st.out_min, st.out_max, st.out_mean);
        r.per_class.push_back(st);
    }

    for (int i = 0; i < n_e; ++i)
        if (total_in[static_cast<size_t>(i)] == 0)
            r.isolated_excitatory.push_back(static_cast<uint32_t>(i));
    return r;
}

void save_topology(const Topology& t, std::ostream& out) {
    const TopologyConfig& c = t.cfg;
    out.precision(17);
    out << "# srnn topology v1\n";
    out << "config n_input=" << c.n_input << " n_excitatory=" << c.n_excitatory
        << " n_inhibitory=" << c.n_inhibitory << " n_output=" << c.n_output
        << " p_in=" << c.p_in << " p_ee=" << c.p_ee << " p_ei=" << c.p_ei
        << " p_ie=" << c.p_ie << " p_ii=" << c.p_ii << " w_max=" << c.w_max
        << " initial_plastic_weight=" << c.initial_plastic_weight
        << " seed=" << c.seed << " allow_self_loops=" << (c.allow_self_loops ? 1 : 0)
        << "\n";
    out << "edges " << t.edges.size() << "\n";
    for (const Edge& e : t.edges) {
        out << edge_class_name(e.cls) << ' ' << e.src << ' ' << e.dst << ' '
            << e.w.weight << ' ' << (e.w.plastic ? 1 : 0) << '\n';
    }
}

Topology load_topology(std::istream& in) {
    Topology t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# srnn topology", 0) != 0)
        throw std::runtime_error("topology file: missing header");
    if (!std::getline(in, line) || line.rfind("config ", 0) != 0)
        throw std::runtime_error("topology file: missing config line");
    {
        std::istringstream ss(line.substr(7));
        std::string tok;
        while (ss >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("topology file: bad config token " + tok);
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            TopologyConfig& c = t.cfg;
            if (key == "n_input") c.n_input = std::stoi(val);
            else if (key == "n_excitatory") c.n_excitatory = std::stoi(val);
            else if (key == "n_inhibitory") c.n_inhibitory = std::stoi(val);
            else if (key == "n_output") c.n_output = std::stoi(val);
            else if (key == "p_in") c.p_in = std::stod(val);
            else if (key == "p_ee") c.p_ee = std::stod(val);
            else if (key == "p_ei") c.p_ei = std::stod(val);
            else if (key == "p_ie") c.p_ie = std::stod(val);
            else if (key == "p_ii") c.p_ii = std::stod(val);
            else if (key == "w_max") c.w_max = std::stod(val);
            else if (key == "initial_plastic_weight") c.initial_plastic_weight = std::stod(val);
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "allow_self_loops") c.allow_self_loops = (val != "0");
            else throw std::runtime_error("topology file: unknown config key " + key);
        }
    }
    if (!std::getline(in, line) || line.rfind("edges ", 0) != 0)
        throw std::runtime_error("topology file: missing edge count");
    const size_t n_edges = std::stoull(line.substr(6));
    t.edges.reserve(n_edges);
    for (size_t i = 0; i < n_edges; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("topology file: truncated edge list");
        std::istringstream ss(line);
        std::string cls;
        Edge e;
        int plastic = 0;
        if (!(ss >> cls >> e.src >> e.dst >> e.w.weight >> plastic))
            throw std::runtime_error("topology file: bad edge line: " + line);
        e.cls = edge_class_from_name(cls);
        e.w.plastic = plastic != 0;
        e.w.sign = (e.cls == EdgeClass::InhToExc) ? int8_t{-1} : int8_t{+1};
        t.edges.push_back(e);
    }
    return t;
}

std::vector<double> dense_weight_matrix(const Topology& t) {
    const size_t n = static_cast<size_t>(t.n_neurons());
    std::vector<double> m(n * n, 0.0);
    for (const Edge& e : t.edges) {
        if (e.cls == EdgeClass::InputToExc || e.cls == EdgeClass::ExcToOutput) continue;
        m[static_cast<size_t>(e.dst) * n + e.src] =
            static_cast<double>(e.w.sign) * e.w.weight;
    }
    return m;
}

} // namespace srnn
