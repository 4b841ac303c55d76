#include "srnn/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "srnn/rng.hpp"

namespace srnn {

Plasticity plasticity_from_name(const std::string& name) {
    if (name == "none") return Plasticity::None;
    if (name == "sdsp_only") return Plasticity::SdspOnly;
    if (name == "sdsp_plus_ip") return Plasticity::SdspPlusIp;
    throw std::invalid_argument("unknown plasticity mode: " + name);
}

const char* plasticity_name(Plasticity p) {
    switch (p) {
        case Plasticity::None: return "none";
        case Plasticity::SdspOnly: return "sdsp_only";
        case Plasticity::SdspPlusIp: return "sdsp_plus_ip";
    }
    return "?";
}

std::vector<SampleLabel> labels_from_annotations(const AnnotationSet& ann,
                                                 size_t series_len, size_t guard_band) {
    std::vector<SampleLabel> labels(series_len, SampleLabel::Unlabeled);
    for (const AnnotationRange& r : ann.ranges) {
        for (size_t k = r.begin; k <= r.end && k < series_len; ++k)
            labels[k] = r.abnormal ? SampleLabel::Abnormal : SampleLabel::Normal;
    }
    if (guard_band > 0) {
        for (const AnnotationRange& r : ann.ranges) {
            if (!r.abnormal) continue;
            const size_t lo = r.begin > guard_band ? r.begin - guard_band : 0;
            const size_t hi = std::min(series_len - 1, r.end + guard_band);
            for (size_t k = lo; k < r.begin; ++k)
                if (labels[k] == SampleLabel::Normal) labels[k] = SampleLabel::Unlabeled;
            for (size_t k = r.end + 1; k <= hi; ++k)
                if (labels[k] == SampleLabel::Normal) labels[k] = SampleLabel::Unlabeled;
        }
    }
    return labels;
}

ExperimentResult run_experiment(const SimConfig& cfg_in, const EcgSeries& train,
                                const EcgSeries& test, const AnnotationSet& test_ann,
                                const Ablation& ablation, size_t guard_band) {
    SimConfig cfg = cfg_in;
    cfg.ip.sync_learning_thresholds = ablation.threshold_sync;
    cfg.topology.seed = derive_seed(cfg.master_seed, {0x746f70u});
    cfg.encoder.seed = derive_seed(cfg.master_seed, {0x656e63u});
    cfg.validate();

    Network net(build_network(cfg.topology), cfg);

    if (ablation.plasticity != Plasticity::None) {
        net.set_phase({true, ablation.plasticity == Plasticity::SdspPlusIp});
        run_phase1(net, train, cfg.phase1_passes);
    }
    net.set_phase({false, false});

    const auto train_records = run_frozen(net, train);
    ExperimentResult result;
    result.readout =
        fit_readout_from_records(train_records, cfg.encoder.t_bin_s, cfg.ridge_lambda);

    result.test_records = run_phase3(net, test, result.readout);
    result.final_plasticity_hash = net.plasticity_hash();

    const auto labels = labels_from_annotations(test_ann, test.size(), guard_band);
    // d is defined from bin 1 on; bin 0 has no prediction and stays unlabeled.
    result.d_series.d_hz.assign(test.size(), 0.0);
    result.d_series.labels.assign(test.size(), SampleLabel::Unlabeled);
    for (size_t k = 1; k < result.test_records.size(); ++k) {
        result.d_series.d_hz[k] = result.test_records[k].d_hz;
        result.d_series.labels[k] = labels[k];
    }
    try {
        result.margin = margin(result.d_series);
    } catch (const std::runtime_error&) {
        result.margin.reset();
    }
    return result;
}

void SweepSpec::validate() const {
    if (lr_sdsp.empty() || lr_thr_v.empty() || t_bin_s.empty() || n_input.empty() ||
        f_poisson_hz.empty())
        throw std::invalid_argument("SweepSpec: every value list must be nonempty");
    if (repeats < 1) throw std::invalid_argument("SweepSpec: repeats must be >= 1");
}

SimConfig apply_cell(const SimConfig& base, double lr_sdsp, double lr_thr_v,
                     double t_bin_s, int n_input, double f_poisson_hz, uint64_t seed) {
    SimConfig cfg = base;
    cfg.synapse.lr_sdsp = lr_sdsp;
    cfg.ip.threshold_step_v = lr_thr_v;
    cfg.ip.learning_step_v = lr_thr_v / 2.0;
    cfg.encoder.t_bin_s = t_bin_s;
    cfg.encoder.n_input = n_input;
    cfg.topology.n_input = n_input;
    cfg.encoder.f_poisson_max_hz = f_poisson_hz;
    cfg.master_seed = seed;
    return cfg;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SimConfig& base_cfg,
                                const EcgSeries& train, const EcgSeries& test,
                                const AnnotationSet& test_ann, int jobs) {
    spec.validate();
    if (jobs < 1) jobs = 1;

    struct Task {
        SweepRow row;
        size_t coords[5];
        int repeat;
    };
    std::vector<Task> tasks;
    for (size_t a = 0; a < spec.lr_sdsp.size(); ++a)
        for (size_t b = 0; b < spec.lr_thr_v.size(); ++b)
            for (size_t c = 0; c < spec.t_bin_s.size(); ++c)
                for (size_t d = 0; d < spec.n_input.size(); ++d)
                    for (size_t e = 0; e < spec.f_poisson_hz.size(); ++e)
                        for (int r = 0; r < spec.repeats; ++r) {
                            Task t;
                            t.coords[0] = a; t.coords[1] = b; t.coords[2] = c;
                            t.coords[3] = d; t.coords[4] = e;
                            t.repeat = r;
                            t.row.lr_sdsp = spec.lr_sdsp[a];
                            t.row.lr_thr_v = spec.lr_thr_v[b];
                            t.row.t_bin_s = spec.t_bin_s[c];
                            t.row.n_input = spec.n_input[d];
                            t.row.f_poisson_hz = spec.f_poisson_hz[e];
                            t.row.seed = derive_seed(
                                base_cfg.master_seed,
                                {t.coords[0], t.coords[1], t.coords[2], t.coords[3],
                                 t.coords[4], static_cast<uint64_t>(r)});
                            tasks.push_back(t);
                        }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            Task& t = tasks[i];
            try {
                const SimConfig cfg =
                    apply_cell(base_cfg, t.row.lr_sdsp, t.row.lr_thr_v, t.row.t_bin_s,
                               t.row.n_input, t.row.f_poisson_hz, t.row.seed);
                auto res = run_experiment(cfg, train, test, test_ann, spec.ablation);
                if (res.margin) t.row.margin = *res.margin;
                else t.row.error = "missing_label_class";
            } catch (const std::exception& ex) {
                t.row.error = ex.what();
            }
        }
    };

    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(tasks.size()));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::vector<SweepRow> rows;
    rows.reserve(tasks.size());
    for (Task& t : tasks) rows.push_back(std::move(t.row));
    return rows;
}

namespace {

void write_csv_number(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out << buf;
}

} // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "lr_sdsp,lr_thr,t_bin,n_input,f_poisson,seed,w_thr,d_no_max,d_ab_min,error\n";
    for (const SweepRow& r : rows) {
        write_csv_number(out, r.lr_sdsp); out << ',';
        write_csv_number(out, r.lr_thr_v); out << ',';
        write_csv_number(out, r.t_bin_s); out << ',';
        out << r.n_input << ',';
        write_csv_number(out, r.f_poisson_hz); out << ',';
        out << r.seed << ',';
        if (r.margin) {
            write_csv_number(out, r.margin->w_thr_hz); out << ',';
            write_csv_number(out, r.margin->d_no_max_hz); out << ',';
            write_csv_number(out, r.margin->d_ab_min_hz); out << ',';
        } else {
            out << ",,,";
        }
        out << r.error << '\n';
    }
}

void write_sweep_cell_means(const std::vector<SweepRow>& rows, std::ostream& out) {
    using Key = std::tuple<double, double, double, int, double>;
    std::map<Key, std::pair<double, int>> cells;
    for (const SweepRow& r : rows) {
        if (!r.margin) continue;
        auto& [sum, n] = cells[{r.lr_sdsp, r.lr_thr_v, r.t_bin_s, r.n_input, r.f_poisson_hz}];
        sum += r.margin->w_thr_hz;
        ++n;
    }
    out << "lr_sdsp,lr_thr,t_bin,n_input,f_poisson,mean_w_thr,n_ok\n";
    for (const auto& [key, val] : cells) {
        write_csv_number(out, std::get<0>(key)); out << ',';
        write_csv_number(out, std::get<1>(key)); out << ',';
        write_csv_number(out, std::get<2>(key)); out << ',';
        out << std::get<3>(key) << ',';
        write_csv_number(out, std::get<4>(key)); out << ',';
        write_csv_number(out, val.first / val.second); out << ',' << val.second << '\n';
    }
}

void write_dk_trace(const AnnotatedSeries& s, std::ostream& out) {
    out << "k,d_hz,label\n";
    for (size_t k = 0; k < s.d_hz.size(); ++k) {
        out << k << ',';
        write_csv_number(out, s.d_hz[k]);
        const char* label = s.labels[k] == SampleLabel::Normal ? "normal"
                            : s.labels[k] == SampleLabel::Abnormal ? "abnormal"
                                                                   : "unlabeled";
        out << ',' << label << '\n';
    }
}

} // namespace srnn
