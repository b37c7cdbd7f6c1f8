#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "declip/error.hpp"
#include "declip/metrics.hpp"
#include "declip/rng.hpp"
#include "oracles.hpp"

using namespace declip;

TEST_CASE("identical sequences correlate perfectly") {
    const std::vector<double> x = {1, 2, 3, 4};
    CHECK(*srcc(x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(*plcc(x, x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("reversed ranks give srcc = -1") {
    CHECK(*srcc({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("ties use average ranks, matching the counting oracle") {
    const std::vector<double> x = {1, 2, 2, 4};
    const std::vector<double> y = {10, 20, 30, 40};
    CHECK(average_ranks(x) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    CHECK(*srcc(x, y) == doctest::Approx(oracle::spearman(x, y)).epsilon(1e-15));
}

TEST_CASE("srcc/plcc match brute-force oracles on random tied data") {
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng::at(50, t) % 49;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid forces plenty of ties
            x[i] = static_cast<double>(rng::at(51, t * 64 + i) % 7);
            y[i] = 0.5 * static_cast<double>(rng::at(52, t * 64 + i) % 9);
        }
        const auto sx = srcc(x, y);
        const auto px = plcc(x, y);
        const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
        const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
        if (x_const || y_const) {
            CHECK(!sx.has_value());
            CHECK(!px.has_value());
            continue;
        }
        CHECK(std::fabs(*sx - oracle::spearman(x, y)) < 1e-12);
        CHECK(std::fabs(*px - oracle::pearson(x, y)) < 1e-12);
    }
}

TEST_CASE("constant inputs yield the explicit undefined marker") {
    CHECK(!plcc({1, 1, 1}, {1, 2, 3}).has_value());
    CHECK(!plcc({1, 2, 3}, {5, 5, 5}).has_value());
    CHECK(!srcc({2, 2, 2}, {1, 2, 3}).has_value());
}

TEST_CASE("length mismatches and short inputs are errors") {
    CHECK_THROWS_AS(plcc({1, 2}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(srcc({1}, {1}), Error);
}

TEST_CASE("srcc is invariant under strictly increasing transforms") {
    std::vector<double> x(40), y(40);
    for (int i = 0; i < 40; ++i) {
        x[i] = rng::uniform01(rng::at(60, i));
        y[i] = rng::uniform01(rng::at(61, i));
    }
    const double base = *srcc(x, y);
    std::vector<double> xt(40), yt(40);
    for (int i = 0; i < 40; ++i) {
        xt[i] = std::exp(3.0 * x[i]);          // strictly increasing
        yt[i] = std::atan(5.0 * (y[i] - 0.5)); // strictly increasing
    }
    CHECK(*srcc(xt, yt) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("plcc is invariant under positive affine transforms") {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
        x[i] = rng::uniform01(rng::at(62, i));
        y[i] = x[i] * 0.5 + rng::uniform01(rng::at(63, i));
    }
    const double base = *plcc(x, y);
    std::vector<double> xt(30), yt(30);
    for (int i = 0; i < 30; ++i) {
        xt[i] = 7.0 * x[i] + 3.0;
        yt[i] = 0.25 * y[i] - 11.0;
    }
    CHECK(*plcc(xt, yt) == doctest::Approx(base).epsilon(1e-12));
    // negative scaling flips the sign
    for (int i = 0; i < 30; ++i) xt[i] = -xt[i];
    CHECK(*plcc(xt, yt) == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("linear probe separates linearly separable classes") {
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<int> train_y, test_y;
    for (int i = 0; i < 120; ++i) {
        const int c = i % 3;
        std::vector<double> v(4);
        for (int k = 0; k < 4; ++k) v[k] = 0.25 * rng::gaussian(70, std::uint64_t(i) * 4 + k);
        v[c] += 2.0;
        if (i < 90) {
            train_x.push_back(v);
            train_y.push_back(c);
        } else {
            test_x.push_back(v);
            test_y.push_back(c);
        }
    }
    const double acc = linear_probe_accuracy(train_x, train_y, test_x, test_y, 3);
    CHECK(acc > 0.9);
    // deterministic
    CHECK(acc == linear_probe_accuracy(train_x, train_y, test_x, test_y, 3));
}

TEST_CASE("logistic remap improves plcc on a saturating monotone relation") {
    std::vector<double> score(60), mos(60);
    for (int i = 0; i < 60; ++i) {
        score[i] = -3.0 + 6.0 * i / 59.0;
        mos[i] = 1.0 / (1.0 + std::exp(-2.5 * score[i])); // heavily nonlinear but monotone
    }
    const double raw = *plcc(score, mos);
    const auto params = fit_logistic_remap(score, mos);
    std::vector<double> remapped(60);
    for (int i = 0; i < 60; ++i) remapped[i] = apply_logistic_remap(params, score[i]);
    const double mapped = *plcc(remapped, mos);
    CHECK(mapped >= raw - 1e-9);
    CHECK(mapped > 0.99);
}
