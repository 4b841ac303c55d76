#include <doctest.h>

#include <sstream>

#include "srnn/experiment.hpp"
#include "srnn/ingestion.hpp"

using namespace srnn;

namespace {

SimConfig small_cfg() {
    SimConfig cfg;
    cfg.encoder.n_input = 10;
    cfg.encoder.t_bin_s = 0.01;
    cfg.topology.n_input = 10;
    cfg.topology.n_excitatory = 40;
    cfg.topology.n_inhibitory = 10;
    cfg.phase1_passes = 1;
    return cfg;
}

std::pair<EcgSeries, AnnotationSet> small_data(int n_beats, std::vector<int> anomalies) {
    SyntheticEcgConfig dc;
    dc.n_beats = n_beats;
    dc.samples_per_beat = 16;
    dc.anomaly_beats = std::move(anomalies);
    return make_synthetic_ecg(dc);
}

} // namespace

TEST_CASE("plasticity ablation names") {
    CHECK(plasticity_from_name("none") == Plasticity::None);
    CHECK(plasticity_from_name("sdsp_only") == Plasticity::SdspOnly);
    CHECK(plasticity_from_name("sdsp_plus_ip") == Plasticity::SdspPlusIp);
    CHECK(plasticity_name(Plasticity::SdspOnly) == std::string("sdsp_only"));
    CHECK_THROWS_AS(plasticity_from_name("what"), std::invalid_argument);
}

TEST_CASE("guard band demotes normal samples near abnormal ranges") {
    AnnotationSet ann;
    ann.ranges = {{0, 9, false}, {10, 14, true}, {15, 29, false}};
    auto labels = labels_from_annotations(ann, 30, 2);
    REQUIRE(labels.size() == 30);
    CHECK(labels[7] == SampleLabel::Normal);
    CHECK(labels[8] == SampleLabel::Unlabeled);
    CHECK(labels[9] == SampleLabel::Unlabeled);
    CHECK(labels[10] == SampleLabel::Abnormal);
    CHECK(labels[14] == SampleLabel::Abnormal);
    CHECK(labels[15] == SampleLabel::Unlabeled);
    CHECK(labels[16] == SampleLabel::Unlabeled);
    CHECK(labels[17] == SampleLabel::Normal);
    CHECK(labels[29] == SampleLabel::Normal);
}

TEST_CASE("zero guard band keeps every annotated sample") {
    AnnotationSet ann;
    ann.ranges = {{0, 4, false}, {5, 9, true}};
    auto labels = labels_from_annotations(ann, 12, 0);
    CHECK(labels[4] == SampleLabel::Normal);
    CHECK(labels[5] == SampleLabel::Abnormal);
    CHECK(labels[10] == SampleLabel::Unlabeled); // outside all ranges
}

TEST_CASE("three-phase experiment produces an aligned deviation series") {
    SimConfig cfg = small_cfg();
    auto [train, train_ann] = small_data(2, {});
    auto [test, test_ann] = small_data(2, {1});

    auto res = run_experiment(cfg, train, test, test_ann, Ablation{}, 1);
    REQUIRE(res.test_records.size() == test.size());
    REQUIRE(res.d_series.d_hz.size() == test.size());
    CHECK(res.d_series.labels[0] == SampleLabel::Unlabeled); // no D at the first bin
    for (size_t k = 1; k < res.d_series.d_hz.size(); ++k) {
        CHECK(res.d_series.d_hz[k] == doctest::Approx(res.test_records[k].d_hz));
        CHECK(res.d_series.d_hz[k] >= 0.0);
    }
    REQUIRE(res.margin.has_value());
    CHECK(res.margin->w_thr_hz ==
          doctest::Approx(res.margin->d_ab_min_hz - res.margin->d_no_max_hz));
    CHECK(res.readout.weights.size() == 40);
}

TEST_CASE("experiments are reproducible for a fixed seed") {
    SimConfig cfg = small_cfg();
    auto [train, train_ann] = small_data(2, {});
    auto [test, test_ann] = small_data(2, {1});
    auto a = run_experiment(cfg, train, test, test_ann, Ablation{}, 1);
    auto b = run_experiment(cfg, train, test, test_ann, Ablation{}, 1);
    CHECK(a.final_plasticity_hash == b.final_plasticity_hash);
    CHECK(a.d_series.d_hz == b.d_series.d_hz);

    cfg.master_seed = 2;
    auto c = run_experiment(cfg, train, test, test_ann, Ablation{}, 1);
    CHECK(c.final_plasticity_hash != a.final_plasticity_hash);
}

TEST_CASE("plasticity ablation changes the trained state") {
    SimConfig cfg = small_cfg();
    cfg.synapse.alpha_amp = 2e-9; // enough drive for the small net to fire
    auto [train, train_ann] = small_data(2, {});
    auto [test, test_ann] = small_data(2, {1});
    auto none = run_experiment(cfg, train, test, test_ann,
                               Ablation{Plasticity::None, true}, 1);
    auto full = run_experiment(cfg, train, test, test_ann,
                               Ablation{Plasticity::SdspPlusIp, true}, 1);
    CHECK(none.final_plasticity_hash != full.final_plasticity_hash);
}

TEST_CASE("apply_cell writes every sweep coordinate") {
    SimConfig base = small_cfg();
    auto cfg = apply_cell(base, 0.5, 0.1, 0.02, 20, 300.0, 42);
    CHECK(cfg.synapse.lr_sdsp == 0.5);
    CHECK(cfg.ip.threshold_step_v == 0.1);
    CHECK(cfg.ip.learning_step_v == doctest::Approx(0.05));
    CHECK(cfg.encoder.t_bin_s == 0.02);
    CHECK(cfg.encoder.n_input == 20);
    CHECK(cfg.topology.n_input == 20);
    CHECK(cfg.encoder.f_poisson_max_hz == 300.0);
    CHECK(cfg.master_seed == 42);
    cfg.validate();
}

TEST_CASE("sweep output is identical regardless of worker count") {
    SimConfig cfg = small_cfg();
    auto [train, train_ann] = small_data(2, {});
    auto [test, test_ann] = small_data(2, {1});

    SweepSpec spec;
    spec.lr_sdsp = {0.1, 2.0};
    spec.lr_thr_v = {0.05};
    spec.t_bin_s = {0.01};
    spec.n_input = {10};
    spec.f_poisson_hz = {150.0};
    spec.repeats = 2;

    auto rows1 = run_sweep(spec, cfg, train, test, test_ann, 1);
    auto rows4 = run_sweep(spec, cfg, train, test, test_ann, 4);
    std::stringstream a, b;
    write_sweep_csv(rows1, a);
    write_sweep_csv(rows4, b);
    CHECK(a.str() == b.str());
    REQUIRE(rows1.size() == 4);
    CHECK(rows1[0].seed != rows1[1].seed);
}

TEST_CASE("sweep csv carries one row per cell and repeat") {
    std::vector<SweepRow> rows(1);
    rows[0].lr_sdsp = 0.1;
    rows[0].lr_thr_v = 0.05;
    rows[0].t_bin_s = 0.15;
    rows[0].n_input = 100;
    rows[0].f_poisson_hz = 150.0;
    rows[0].seed = 7;
    MarginResult m;
    m.d_no_max_hz = 10.0;
    m.d_ab_min_hz = 25.0;
    m.w_thr_hz = 15.0;
    rows[0].margin = m;
    std::stringstream ss;
    write_sweep_csv(rows, ss);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    CHECK(header == "lr_sdsp,lr_thr,t_bin,n_input,f_poisson,seed,w_thr,d_no_max,d_ab_min,error");
    CHECK(row.find("0.1,0.05,0.15,100,150,7,15,10,25,") == 0);
}

TEST_CASE("dk trace format") {
    AnnotatedSeries s;
    s.d_hz = {0.0, 12.5};
    s.labels = {SampleLabel::Unlabeled, SampleLabel::Abnormal};
    std::stringstream ss;
    write_dk_trace(s, ss);
    std::string header, l0, l1;
    std::getline(ss, header);
    std::getline(ss, l0);
    std::getline(ss, l1);
    CHECK(header == "k,d_hz,label");
    CHECK(l1 == "1,12.5,abnormal");
}
