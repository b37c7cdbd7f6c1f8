#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "declip/embedding.hpp"
#include "declip/error.hpp"
#include "declip/loss.hpp"
#include "declip/resmlp.hpp"
#include "declip/rng.hpp"
#include "oracles.hpp"

using namespace declip;

namespace {

std::vector<double> random_unit(std::uint64_t seed, std::uint64_t idx, int dim) {
    std::vector<double> v(dim);
    for (int k = 0; k < dim; ++k) v[k] = rng::gaussian(rng::stream_seed(seed, "unit"), idx * dim + k);
    normalize_in_place(v);
    return v;
}

ResMlpParams random_params(std::uint64_t seed, int dim, int hidden, double scale = 0.6) {
    ResMlpParams p = init_resmlp(dim, hidden, seed, "test");
    const std::uint64_t s = rng::stream_seed(seed, "rand-params");
    std::uint64_t c = 0;
    for (auto* arr : {&p.w1, &p.b1, &p.w2})
        for (double& v : *arr) v = rng::uniform_range(s, c++, -scale, scale);
    return p;
}

} // namespace

TEST_CASE("freshly initialized projector is an exact identity on unit vectors") {
    const ResMlpParams p = init_resmlp(16, 32, 7, "proj-perceptual");
    for (double v : p.w2) CHECK(v == 0.0);
    CHECK(p.b1.size() == 32);
    for (int t = 0; t < 50; ++t) {
        const std::vector<double> x = random_unit(5, t, 16);
        const std::vector<double> y = resmlp_forward(p, x);
        CHECK(y == x); // bitwise
    }
}

TEST_CASE("hand-computed forward: padded identity W1, single W2 entry") {
    ResMlpParams p;
    p.dim = 4;
    p.hidden = 6;
    p.w1.assign(6 * 4, 0.0);
    for (int i = 0; i < 4; ++i) p.w1[std::size_t(i) * 4 + i] = 1.0; // I padded with two zero rows
    p.b1.assign(6, 0.0);
    p.w2.assign(4 * 6, 0.0);
    p.w2[std::size_t(1) * 6 + 0] = 0.1; // r = x + [0, 0.1*silu(z_0), 0, 0]

    const std::vector<double> x = {1.0, 0.0, 0.0, 0.0};
    const std::vector<double> y = resmlp_forward(p, x);

    const double silu1 = 1.0 / (1.0 + std::exp(-1.0));
    const double r1 = 0.1 * silu1;
    const double norm = std::sqrt(1.0 + r1 * r1);
    CHECK(y[0] == doctest::Approx(1.0 / norm).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(r1 / norm).epsilon(1e-14));
    CHECK(y[2] == 0.0);
    CHECK(y[3] == 0.0);
    CHECK(y[1] / y[0] == doctest::Approx(0.1 * silu1).epsilon(1e-14));

    const auto expect = oracle::resmlp(p.w1, p.b1, p.w2, x);
    for (int k = 0; k < 4; ++k) CHECK(y[k] == doctest::Approx(expect[k]).epsilon(1e-15));
}

TEST_CASE("random projector output is unit-norm and matches the oracle") {
    for (int t = 0; t < 10; ++t) {
        const ResMlpParams p = random_params(100 + t, 12, 20);
        std::vector<double> x(12);
        for (int k = 0; k < 12; ++k) x[k] = rng::uniform_range(200 + t, k, -1.0, 1.0);
        const auto y = resmlp_forward(p, x);
        CHECK(std::fabs(l2_norm(y) - 1.0) <= 1e-6);
        const auto expect = oracle::resmlp(p.w1, p.b1, p.w2, x);
        for (int k = 0; k < 12; ++k) CHECK(y[k] == doctest::Approx(expect[k]).epsilon(1e-12));
    }
}

TEST_CASE("resmlp analytic gradients match central finite differences") {
    const int dim = 8, hidden = 12;
    const double h = 1e-4;
    for (int t = 0; t < 10; ++t) {
        ResMlpParams p = random_params(300 + t, dim, hidden);
        std::vector<double> x(dim);
        for (int k = 0; k < dim; ++k) x[k] = rng::uniform_range(400 + t, k, -1.0, 1.0);
        const std::vector<double> probe = random_unit(500 + t, 0, dim);

        ResMlpTrace trace;
        resmlp_forward(p, x, &trace);
        ResMlpGrads grads;
        grads.resize_like(p);
        std::vector<double> d_input;
        resmlp_backward(p, trace, probe, grads, &d_input);

        const auto scalar = [&]() { return dot(probe, resmlp_forward(p, x)); };
        CHECK(oracle::relative_error(grads.w1, oracle::central_differences(p.w1, h, scalar)) < 1e-4);
        CHECK(oracle::relative_error(grads.b1, oracle::central_differences(p.b1, h, scalar)) < 1e-4);
        CHECK(oracle::relative_error(grads.w2, oracle::central_differences(p.w2, h, scalar)) < 1e-4);
        CHECK(oracle::relative_error(d_input, oracle::central_differences(x, h, scalar)) < 1e-4);
    }
}

TEST_CASE("contrastive loss: orthogonal pair at tau=1 gives log(1+e^-1)") {
    EmbeddingBatch img = make_batch(2, 4);
    img.row(0)[0] = 1.0;
    img.row(1)[1] = 1.0;
    const EmbeddingBatch txt = img;
    const double loss = contrastive_loss(img, txt, 1.0);
    CHECK(loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(std::fabs(loss - 0.313261687518223) < 1e-9);
}

TEST_CASE("contrastive loss: identical rows give log B") {
    for (int b : {2, 5, 32}) {
        EmbeddingBatch img = make_batch(b, 6);
        const auto v = random_unit(9, b, 6);
        for (int i = 0; i < b; ++i) std::copy(v.begin(), v.end(), img.row(i));
        const double loss = contrastive_loss(img, img, 0.07);
        CHECK(loss == doctest::Approx(std::log(double(b))).epsilon(1e-12));
    }
}

TEST_CASE("contrastive loss is within [0, log B + 2/tau] and matches the oracle") {
    for (int t = 0; t < 20; ++t) {
        const int b = 2 + static_cast<int>(rng::at(600 + t, 0) % 7);
        const int d = 4 + static_cast<int>(rng::at(600 + t, 1) % 12);
        const double tau = 0.07 + 0.5 * rng::uniform01(rng::at(600 + t, 2));
        EmbeddingBatch img = make_batch(b, d), txt = make_batch(b, d);
        std::vector<std::vector<double>> vi, vt;
        for (int i = 0; i < b; ++i) {
            const auto a = random_unit(700 + t, 2 * i, d);
            const auto c = random_unit(700 + t, 2 * i + 1, d);
            std::copy(a.begin(), a.end(), img.row(i));
            std::copy(c.begin(), c.end(), txt.row(i));
            vi.push_back(a);
            vt.push_back(c);
        }
        const double loss = contrastive_loss(img, txt, tau);
        CHECK(loss >= 0.0);
        CHECK(loss <= std::log(double(b)) + 2.0 / tau);
        CHECK(loss == doctest::Approx(oracle::infonce(vi, vt, tau)).epsilon(1e-12));
    }
}

TEST_CASE("contrastive loss gradients match central finite differences") {
    const int b = 4, d = 8;
    const double h = 1e-4;
    for (int t = 0; t < 10; ++t) {
        EmbeddingBatch img = make_batch(b, d), txt = make_batch(b, d);
        for (int i = 0; i < b; ++i) {
            const auto a = random_unit(800 + t, 2 * i, d);
            const auto c = random_unit(800 + t, 2 * i + 1, d);
            std::copy(a.begin(), a.end(), img.row(i));
            std::copy(c.begin(), c.end(), txt.row(i));
        }
        EmbeddingBatch d_img, d_txt;
        contrastive_loss(img, txt, 0.07, &d_img, &d_txt);

        const auto loss_fn = [&]() { return contrastive_loss(img, txt, 0.07); };
        CHECK(oracle::relative_error(d_img.data, oracle::central_differences(img.data, h, loss_fn)) < 1e-4);
        CHECK(oracle::relative_error(d_txt.data, oracle::central_differences(txt.data, h, loss_fn)) < 1e-4);
    }
}

TEST_CASE("batch order does not change the loss") {
    const int b = 6, d = 8;
    EmbeddingBatch img = make_batch(b, d), txt = make_batch(b, d);
    for (int i = 0; i < b; ++i) {
        const auto a = random_unit(900, 2 * i, d);
        const auto c = random_unit(900, 2 * i + 1, d);
        std::copy(a.begin(), a.end(), img.row(i));
        std::copy(c.begin(), c.end(), txt.row(i));
    }
    const double base = contrastive_loss(img, txt, 0.07);
    const auto perm = rng::permutation(31, b);
    EmbeddingBatch img2 = make_batch(b, d), txt2 = make_batch(b, d);
    for (int i = 0; i < b; ++i) {
        std::copy(img.row(perm[i]), img.row(perm[i]) + d, img2.row(i));
        std::copy(txt.row(perm[i]), txt.row(perm[i]) + d, txt2.row(i));
    }
    CHECK(contrastive_loss(img2, txt2, 0.07) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("degenerate batches and bad inputs are rejected") {
    EmbeddingBatch one = make_batch(1, 4);
    one.row(0)[0] = 1.0;
    CHECK_THROWS_AS(contrastive_loss(one, one, 0.07), Error);

    EmbeddingBatch img = make_batch(2, 4);
    img.row(0)[0] = 1.0;
    img.row(1)[1] = 1.0;
    CHECK_THROWS_AS(contrastive_loss(img, img, 0.0), Error);
    CHECK_THROWS_AS(contrastive_loss(img, img, -1.0), Error);

    EmbeddingBatch nan_batch = img;
    nan_batch.row(0)[2] = std::nan("");
    CHECK_THROWS_AS(contrastive_loss(nan_batch, img, 0.07), Error);

    const ResMlpParams p = init_resmlp(4, 8, 0, "x");
    CHECK_THROWS_AS(resmlp_forward(p, {1.0, 0.0}), Error);
}
