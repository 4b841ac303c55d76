#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "srnn/readout.hpp"

using namespace srnn;

namespace {

// Full-batch gradient descent on the same ridge objective, used as an
// independent reference for the closed-form solver.
ReadoutModel fit_by_gradient_descent(const std::vector<std::vector<double>>& x,
                                     const std::vector<double>& y, double lambda,
                                     int iters, double step) {
    const size_t n = x.size(), p = x[0].size();
    double scale = 0.0;
    for (const auto& row : x)
        for (double v : row) scale += v * v;
    const double lambda_abs = lambda * scale / static_cast<double>(p);

    std::vector<double> w(p, 0.0);
    double b = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<double> gw(p, 0.0);
        double gb = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double pred = b;
            for (size_t j = 0; j < p; ++j) pred += w[j] * x[i][j];
            const double r = pred - y[i];
            for (size_t j = 0; j < p; ++j) gw[j] += r * x[i][j];
            gb += r;
        }
        for (size_t j = 0; j < p; ++j) w[j] = w[j] - step * (gw[j] + lambda_abs * w[j]);
        b -= step * gb;
    }
    ReadoutModel m;
    m.weights = w;
    m.bias = b;
    m.lambda = lambda;
    return m;
}

} // namespace

TEST_CASE("exact recovery of a planted linear map with lambda = 0") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    const std::vector<double> truth = {2.0, -1.5, 0.25};
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> row = {u(rng), u(rng), u(rng)};
        double t = 7.0;
        for (size_t j = 0; j < 3; ++j) t += truth[j] * row[j];
        x.push_back(row);
        y.push_back(t);
    }
    auto m = fit_readout(x, y, 0.0);
    for (size_t j = 0; j < 3; ++j) CHECK(m.weights[j] == doctest::Approx(truth[j]).epsilon(1e-9));
    CHECK(m.bias == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(m.training_rms_residual_hz < 1e-8);
}

TEST_CASE("rank-deficient system with lambda = 0 is reported") {
    std::vector<std::vector<double>> x = {{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
    std::vector<double> y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_readout(x, y, 0.0), std::runtime_error);
    // the same system solves fine with a ridge term
    auto m = fit_readout(x, y, 1e-3);
    CHECK(std::isfinite(m.weights[0]));
}

TEST_CASE("ridge solution matches a gradient-descent oracle") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> row = {u(rng), u(rng), u(rng), u(rng)};
        x.push_back(row);
        y.push_back(3.0 + row[0] - 0.5 * row[2] + noise(rng));
    }
    const double lambda = 1e-2;
    auto closed = fit_readout(x, y, lambda);
    auto gd = fit_by_gradient_descent(x, y, lambda, 400000, 1e-5);
    for (size_t j = 0; j < 4; ++j)
        CHECK(std::abs(closed.weights[j] - gd.weights[j]) < 1e-6);
    CHECK(std::abs(closed.bias - gd.bias) < 1e-6);
}

TEST_CASE("ridge shrinks weights monotonically") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> row = {u(rng), u(rng)};
        x.push_back(row);
        y.push_back(2.0 * row[0] + row[1]);
    }
    double prev = 1e300;
    for (double lambda : {1e-4, 1e-2, 1.0, 100.0}) {
        auto m = fit_readout(x, y, lambda);
        double norm = 0.0;
        for (double w : m.weights) norm += w * w;
        CHECK(norm < prev);
        prev = norm;
    }
}

TEST_CASE("bias is not penalized") {
    // constant target: weights should stay near zero even with huge lambda
    std::vector<std::vector<double>> x = {{1.0}, {2.0}, {3.0}, {4.0}};
    std::vector<double> y = {5.0, 5.0, 5.0, 5.0};
    auto m = fit_readout(x, y, 1e6);
    CHECK(std::abs(m.weights[0]) < 1e-3);
    CHECK(m.bias == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("prediction clamps at zero") {
    ReadoutModel m;
    m.weights = {-1.0};
    m.bias = 0.5;
    const double r1[] = {0.1};
    CHECK(predict(m, r1) == doctest::Approx(0.4));
    const double r2[] = {10.0};
    CHECK(predict(m, r2) == 0.0);
}

TEST_CASE("model round trips through save/load") {
    ReadoutModel m;
    m.weights = {0.123456789012345, -2.5, 0.0};
    m.bias = -0.75;
    m.lambda = 1e-3;
    std::stringstream ss;
    save_readout(m, ss);
    auto n = load_readout(ss);
    REQUIRE(n.weights.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(n.weights[i] == m.weights[i]);
    CHECK(n.bias == m.bias);
    CHECK(n.lambda == m.lambda);
}

TEST_CASE("input validation") {
    std::vector<std::vector<double>> x = {{1.0}, {2.0}};
    std::vector<double> y = {1.0};
    CHECK_THROWS_AS(fit_readout(x, y, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(fit_readout({}, {}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(fit_readout({{1.0}}, {1.0}, -1.0), std::invalid_argument);
}
