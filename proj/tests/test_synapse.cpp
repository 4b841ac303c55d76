#include <doctest.h>

#include <cmath>
#include <random>

#include "srnn/synapse.hpp"

using namespace srnn;

TEST_CASE("current decay closed form and semigroup") {
    SynapseParams p;
    SynapticCurrent s{1e-10};
    decay_current(s, p, p.tau_syn_s);
    CHECK(s.amps == doctest::Approx(1e-10 * std::exp(-1.0)).epsilon(1e-12));

    SynapticCurrent a{3e-11}, b{3e-11};
    decay_current(a, p, 2e-3);
    decay_current(b, p, 1e-3);
    decay_current(b, p, 1e-3);
    CHECK(a.amps == doctest::Approx(b.amps).epsilon(1e-12));

    SynapticCurrent z{0.0};
    decay_current(z, p, 1e-3);
    CHECK(z.amps == 0.0);
}

TEST_CASE("spike injection respects weight and sign") {
    SynapseParams p;
    SynapticCurrent s{0.0};
    inject_spike(s, EdgeWeight{1.0, false, +1}, p);
    CHECK(s.amps == doctest::Approx(p.alpha_amp));
    inject_spike(s, EdgeWeight{0.0, false, +1}, p);
    CHECK(s.amps == doctest::Approx(p.alpha_amp));
    inject_spike(s, EdgeWeight{1.0, false, -1}, p);
    CHECK(s.amps == doctest::Approx(0.0));
}

TEST_CASE("weight update branches") {
    SynapseParams p;
    p.lr_sdsp = 0.1;

    EdgeWeight e{1.0, true, +1};
    apply_sdsp(e, 0.15, 0.1, 0.1, p); // above the upper learning threshold
    CHECK(e.weight == doctest::Approx(1.1));

    e.weight = 1.0;
    apply_sdsp(e, 0.05, 0.1, 0.1, p); // below the lower one
    CHECK(e.weight == doctest::Approx(0.9));

    e.weight = 1.0;
    apply_sdsp(e, 0.1, 0.15, 0.05, p); // dead zone
    CHECK(e.weight == doctest::Approx(1.0));

    e.weight = 2.0;
    apply_sdsp(e, 0.5, 0.1, 0.1, p); // ceiling clamp
    CHECK(e.weight == doctest::Approx(2.0));

    e.weight = 0.0;
    apply_sdsp(e, 0.0, 0.2, 0.1, p); // floor clamp
    CHECK(e.weight == doctest::Approx(0.0));
}

TEST_CASE("binary regime flips between 0 and w_max") {
    SynapseParams p;
    p.lr_sdsp = 2.0;
    EdgeWeight e{0.0, true, +1};
    apply_sdsp(e, 0.5, 0.1, 0.1, p);
    CHECK(e.weight == doctest::Approx(2.0));
    apply_sdsp(e, 0.0, 0.2, 0.1, p);
    CHECK(e.weight == doctest::Approx(0.0));
}

TEST_CASE("weight bounds and grid closure under random drive") {
    for (double lr : {0.1, 0.2, 0.5, 1.0, 2.0}) {
        SynapseParams p;
        p.lr_sdsp = lr;
        p.validate();
        EdgeWeight e{0.0, true, +1};
        // grid-aligned start
        const long levels = std::lround(p.w_max / lr);
        e.weight = static_cast<double>(levels / 2) * lr;

        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> v(-0.1, 0.5);
        for (int i = 0; i < 20000; ++i) {
            apply_sdsp(e, v(rng), 0.2, 0.1, p);
            REQUIRE(e.weight >= 0.0);
            REQUIRE(e.weight <= p.w_max);
            const double n = e.weight / lr;
            REQUIRE(std::abs(n - std::round(n)) < 1e-9);
        }
    }
}

TEST_CASE("weight update is a pure function of its inputs") {
    SynapseParams p;
    EdgeWeight a{1.0, true, +1}, b{1.0, true, +1};
    apply_sdsp(a, 0.17, 0.1, 0.1, p);
    apply_sdsp(b, 0.17, 0.1, 0.1, p);
    CHECK(a.weight == b.weight);
}

TEST_CASE("parameter validation") {
    SynapseParams p;
    p.lr_sdsp = 0.3; // does not divide 2.0
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = SynapseParams{};
    p.tau_syn_s = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
