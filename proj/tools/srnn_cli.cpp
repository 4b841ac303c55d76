#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "srnn/config.hpp"
#include "srnn/rng.hpp"
#include "srnn/engine.hpp"
#include "srnn/experiment.hpp"
#include "srnn/ingestion.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "srnn 1.0.0";

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    uint64_t seed = 0;
    bool seed_set = false;
};

srnn::RunConfig load_run_config(const CommonOpts& opts) {
    srnn::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = srnn::parse_config_file(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + kv + "'");
        srnn::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.seed_set) cfg.sim.master_seed = opts.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
    cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set t_bin=0.007");
    cmd->add_option("--seed", opts.seed, "Master seed (overrides config)")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

template <typename T>
T read_with(const std::string& path, T (*parser)(std::istream&)) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return parser(in);
}

srnn::EcgSeries read_ecg(const std::string& path) {
    return read_with(path, srnn::parse_ecg_csv);
}

void write_manifest(const srnn::RunConfig& cfg, const fs::path& dir,
                    const std::string& command) {
    auto out = open_out(dir / "run_manifest.txt");
    out << "# " << kVersion << "\n# command: " << command << "\n";
    srnn::write_config(cfg, out);
}

srnn::SyntheticEcgConfig synth_cfg(const srnn::RunConfig& cfg, int beats,
                                   std::vector<int> anomalies, uint64_t seed) {
    srnn::SyntheticEcgConfig sc;
    sc.n_beats = beats;
    sc.anomaly_beats = std::move(anomalies);
    sc.seed = seed;
    sc.anomaly.qrs_amplitude_mv = cfg.anomaly_qrs_amplitude_mv;
    sc.anomaly.qrs_width_s = cfg.anomaly_qrs_width_s;
    sc.samples_per_beat = cfg.samples_per_beat;
    sc.amplitude_jitter = cfg.data_jitter;
    sc.noise_mv = cfg.data_noise_mv;
    return sc;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int run_report(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open: " + csv_path);
    std::string line;
    std::getline(in, line); // header
    struct Row { double lr_sdsp, lr_thr, t_bin, f_poisson, w_thr; int n_input; bool ok; };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string f[10];
        for (int i = 0; i < 10 && std::getline(ss, f[i], ','); ++i) {}
        Row r{};
        r.lr_sdsp = std::stod(f[0]);
        r.lr_thr = std::stod(f[1]);
        r.t_bin = std::stod(f[2]);
        r.n_input = std::stoi(f[3]);
        r.f_poisson = std::stod(f[4]);
        r.ok = !f[6].empty();
        r.w_thr = r.ok ? std::stod(f[6]) : 0.0;
        rows.push_back(r);
    }
    auto medians_by = [&](auto key) {
        std::map<double, std::vector<double>> groups;
        for (const Row& r : rows)
            if (r.ok) groups[key(r)].push_back(r.w_thr);
        return groups;
    };
    auto print_trend = [&](const char* name, auto key) {
        auto groups = medians_by(key);
        if (groups.size() < 2) return;
        std::cout << "w_thr medians by " << name << ":";
        std::vector<double> meds;
        for (auto& [k, v] : groups) {
            meds.push_back(median(v));
            std::cout << ' ' << k << "->" << meds.back();
        }
        const bool nondec = std::is_sorted(meds.begin(), meds.end());
        std::cout << "  (non-decreasing: " << (nondec ? "yes" : "no") << ")\n";
    };
    std::cout << "rows: " << rows.size() << ", failed: "
              << std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.ok; })
              << "\n";
    print_trend("t_bin", [](const Row& r) { return r.t_bin; });
    print_trend("n_input", [](const Row& r) { return static_cast<double>(r.n_input); });
    print_trend("f_poisson", [](const Row& r) { return r.f_poisson; });
    print_trend("lr_sdsp", [](const Row& r) { return r.lr_sdsp; });
    print_trend("lr_thr", [](const Row& r) { return r.lr_thr; });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiking recurrent network simulator with synaptic and intrinsic "
                 "plasticity, plus an ECG anomaly-detection experiment harness"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string out_dir = "out";
    std::string data_path, topo_path, checkpoint_path, readout_path, ann_path, csv_path;
    std::string out_path, out_state_path, plasticity = "sdsp_plus_ip";
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    bool no_sync = false;

    CommonOpts gen_o, build_o, train_o, fit_o, test_o, sweep_o;

    auto* gen = app.add_subcommand("gen-data", "Generate synthetic ECG train/test data");
    add_common(gen, gen_o);
    gen->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* build = app.add_subcommand("build-net", "Build and save a random topology");
    add_common(build, build_o);
    build->add_option("--out", out_path, "Topology output file")->required();

    auto* train = app.add_subcommand("train", "Unsupervised reconstruction (phase 1)");
    add_common(train, train_o);
    train->add_option("--topology", topo_path, "Topology file")->required();
    train->add_option("--data", data_path, "Training ECG CSV")->required();
    train->add_option("--out", out_path, "Checkpoint output file")->required();
    train->add_option("--plasticity", plasticity, "none | sdsp_only | sdsp_plus_ip");
    train->add_flag("--no-threshold-sync", no_sync,
                    "Keep learning thresholds fixed while thresholds move");

    auto* fit = app.add_subcommand("fit-readout", "Fit the linear readout (phase 2)");
    add_common(fit, fit_o);
    fit->add_option("--checkpoint", checkpoint_path, "Checkpoint from train")->required();
    fit->add_option("--data", data_path, "Training ECG CSV")->required();
    fit->add_option("--out", out_path, "Readout model output file")->required();
    fit->add_option("--out-state", out_state_path, "Post-fit checkpoint output");

    auto* test = app.add_subcommand("test", "Anomaly detection on test data (phase 3)");
    add_common(test, test_o);
    test->add_option("--checkpoint", checkpoint_path, "Checkpoint")->required();
    test->add_option("--readout", readout_path, "Readout model file")->required();
    test->add_option("--data", data_path, "Test ECG CSV")->required();
    test->add_option("--annotations", ann_path, "Annotation file")->required();
    test->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "Run the parameter sweep grid");
    add_common(sweep, sweep_o);
    sweep->add_option("--out-dir", out_dir, "Output directory")->required();
    sweep->add_option("--jobs", jobs, "Worker threads (default: available parallelism)");

    auto* report = app.add_subcommand("report", "Summarize a sweep CSV");
    report->add_option("--sweep-csv", csv_path, "Long-form sweep CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto cfg = load_run_config(gen_o);
            fs::create_directories(out_dir);
            auto [train_s, train_a] = srnn::make_synthetic_ecg(
                synth_cfg(cfg, cfg.train_beats, {}, cfg.sim.master_seed));
            auto [test_s, test_a] = srnn::make_synthetic_ecg(
                synth_cfg(cfg, cfg.test_beats, cfg.test_anomaly_beats, cfg.sim.master_seed + 1));
            { auto o = open_out(fs::path(out_dir) / "train_ecg.csv"); srnn::write_ecg_csv(train_s, o); }
            { auto o = open_out(fs::path(out_dir) / "test_ecg.csv"); srnn::write_ecg_csv(test_s, o); }
            { auto o = open_out(fs::path(out_dir) / "test_annotations.csv"); srnn::write_annotations(test_a, o); }
            write_manifest(cfg, out_dir, "gen-data");
            std::cout << "wrote " << train_s.size() << " train and " << test_s.size()
                      << " test samples to " << out_dir << "\n";
        } else if (*build) {
            auto cfg = load_run_config(build_o);
            cfg.sim.topology.seed = cfg.sim.master_seed;
            auto topo = srnn::build_network(cfg.sim.topology);
            auto o = open_out(out_path);
            srnn::save_topology(topo, o);
            auto rep = srnn::degree_report(topo);
            std::cout << "edges: " << topo.edges.size() << ", isolated excitatory: "
                      << rep.isolated_excitatory.size() << "\n";
        } else if (*train) {
            auto cfg = load_run_config(train_o);
            std::ifstream ti(topo_path);
            if (!ti) throw std::runtime_error("cannot open: " + topo_path);
            auto topo = srnn::load_topology(ti);
            cfg.sim.topology = topo.cfg;
            cfg.sim.encoder.n_input = topo.cfg.n_input;
            cfg.sim.encoder.seed = srnn::derive_seed(cfg.sim.master_seed, {0x656e63u});
            const auto mode = srnn::plasticity_from_name(plasticity);
            cfg.sim.ip.sync_learning_thresholds = !no_sync;
            srnn::Network net(std::move(topo), cfg.sim);
            if (mode != srnn::Plasticity::None) {
                net.set_phase({true, mode == srnn::Plasticity::SdspPlusIp});
                srnn::run_phase1(net, read_ecg(data_path), cfg.sim.phase1_passes);
            }
            net.set_phase({false, false});
            auto o = open_out(out_path);
            net.save_checkpoint(o);
            std::cout << "trained checkpoint written to " << out_path << "\n";
        } else if (*fit) {
            auto cfg = load_run_config(fit_o);
            std::ifstream ci(checkpoint_path);
            if (!ci) throw std::runtime_error("cannot open: " + checkpoint_path);
            cfg.sim.encoder.seed = srnn::derive_seed(cfg.sim.master_seed, {0x656e63u});
            auto net = srnn::Network::load_checkpoint(ci, cfg.sim);
            auto records = srnn::run_frozen(net, read_ecg(data_path));
            auto model = srnn::fit_readout_from_records(records, cfg.sim.encoder.t_bin_s,
                                                        cfg.sim.ridge_lambda);
            auto o = open_out(out_path);
            srnn::save_readout(model, o);
            if (!out_state_path.empty()) {
                auto so = open_out(out_state_path);
                net.save_checkpoint(so);
            }
            std::cout << "readout fit, rms residual " << model.training_rms_residual_hz
                      << " Hz\n";
        } else if (*test) {
            auto cfg = load_run_config(test_o);
            std::ifstream ci(checkpoint_path);
            if (!ci) throw std::runtime_error("cannot open: " + checkpoint_path);
            cfg.sim.encoder.seed = srnn::derive_seed(cfg.sim.master_seed, {0x656e63u});
            auto net = srnn::Network::load_checkpoint(ci, cfg.sim);
            std::ifstream ri(readout_path);
            if (!ri) throw std::runtime_error("cannot open: " + readout_path);
            const auto model = srnn::load_readout(ri);
            const auto series = read_ecg(data_path);
            std::ifstream ai(ann_path);
            if (!ai) throw std::runtime_error("cannot open: " + ann_path);
            const auto ann = srnn::parse_annotations(ai, series.size());
            const auto records = srnn::run_phase3(net, series, model);
            const auto labels =
                srnn::labels_from_annotations(ann, series.size(), cfg.guard_band);
            srnn::AnnotatedSeries d;
            d.d_hz.assign(series.size(), 0.0);
            d.labels.assign(series.size(), srnn::SampleLabel::Unlabeled);
            for (size_t k = 1; k < records.size(); ++k) {
                d.d_hz[k] = records[k].d_hz;
                d.labels[k] = labels[k];
            }
            fs::create_directories(out_dir);
            { auto o = open_out(fs::path(out_dir) / "dk_trace.csv"); srnn::write_dk_trace(d, o); }
            auto mo = open_out(fs::path(out_dir) / "margin.txt");
            const auto m = srnn::margin(d);
            mo.precision(9);
            mo << "d_no_max_hz " << m.d_no_max_hz << "\nd_ab_min_hz " << m.d_ab_min_hz
               << "\nw_thr_hz " << m.w_thr_hz << "\n";
            if (m.f_thr_hz) mo << "f_thr_hz " << *m.f_thr_hz << "\n";
            write_manifest(cfg, out_dir, "test");
            std::cout << "w_thr = " << m.w_thr_hz << " Hz\n";
        } else if (*sweep) {
            auto cfg = load_run_config(sweep_o);
            fs::create_directories(out_dir);
            auto [train_s, train_a] = srnn::make_synthetic_ecg(
                synth_cfg(cfg, cfg.train_beats, {}, cfg.sim.master_seed));
            auto [test_s, test_a] = srnn::make_synthetic_ecg(
                synth_cfg(cfg, cfg.test_beats, cfg.test_anomaly_beats, cfg.sim.master_seed + 1));
            const auto rows =
                srnn::run_sweep(cfg.sweep, cfg.sim, train_s, test_s, test_a, jobs);
            { auto o = open_out(fs::path(out_dir) / "sweep.csv"); srnn::write_sweep_csv(rows, o); }
            { auto o = open_out(fs::path(out_dir) / "sweep_cell_means.csv"); srnn::write_sweep_cell_means(rows, o); }
            write_manifest(cfg, out_dir, "sweep");
            std::cout << "sweep complete: " << rows.size() << " rows in " << out_dir << "\n";
        } else if (*report) {
            return run_report(csv_path);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
