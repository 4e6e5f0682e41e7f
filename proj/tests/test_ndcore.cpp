#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "rollcall/nd/checkpoint.hpp"
#include "rollcall/nd/gradcheck.hpp"
#include "rollcall/nd/ops.hpp"
#include "rollcall/nd/optim.hpp"
#include "rollcall/nd/rng.hpp"
#include "rollcall/nd/tensor.hpp"
#include "rollcall/util/io.hpp"

using namespace rollcall;
using nd::Tensor;

namespace {

// Brute-force reference for the convolution: explicit loops over windows,
// filters and positions, independent of the production implementation.
Tensor naive_conv(const Tensor& emb, const Tensor& filters, const Tensor& bias,
                  std::size_t window) {
    const std::size_t n = emb.rows(), d = emb.cols(), F = filters.rows();
    const std::size_t eff_n = n < window ? window : n;
    Tensor out({F});
    for (std::size_t f = 0; f < F; ++f) {
        double best = -1e300;
        for (std::size_t pos = 0; pos + window <= eff_n; ++pos) {
            double pre = bias[f];
            for (std::size_t k = 0; k < window; ++k) {
                for (std::size_t c = 0; c < d; ++c) {
                    const double x = (pos + k) < n ? emb.at(pos + k, c) : 0.0;
                    pre += filters.at(f, k * d + c) * x;
                }
            }
            best = std::max(best, pre);
        }
        out[f] = std::max(0.0, best);
    }
    return out;
}

Tensor random_tensor(std::vector<std::size_t> shape, nd::Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

}  // namespace

TEST_CASE("rng matches the fixed xoshiro256++/splitmix64 reference streams") {
    nd::Rng r(42);
    CHECK(r.next_u64() == 0xd0764d4f4476689fULL);
    CHECK(r.next_u64() == 0x519e4174576f3791ULL);
    CHECK(r.next_u64() == 0xfbe07cfb0c24ed8cULL);
    CHECK(r.next_u64() == 0xb37d9f600cd835b8ULL);
    CHECK(r.next_u64() == 0xcb231c3874846a73ULL);
    CHECK(r.next_u64() == 0x968d9f004e50de7dULL);
    CHECK(r.uniform01() == doctest::Approx(0.1253524420627421).epsilon(1e-15));
    CHECK(r.uniform01() == doctest::Approx(0.6051224486571726).epsilon(1e-15));

    nd::Rng zero(0);
    CHECK(zero.next_u64() == 0x53175d61490b23dfULL);

    CHECK(nd::Rng(42).derive(0).seed() == 0xca0d9b69c5df7139ULL);
    CHECK(nd::Rng(42).derive(1).seed() == 0x83dd51bb703ec03cULL);
}

TEST_CASE("rng determinism and helpers") {
    nd::Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    nd::Rng r(11);
    for (int i = 0; i < 1000; ++i) {
        const auto v = r.below(13);
        CHECK(v < 13);
    }
    std::vector<int> xs{1, 2, 3, 4, 5, 6};
    std::vector<int> ys = xs;
    nd::Rng s1(3), s2(3);
    s1.shuffle(xs);
    s2.shuffle(ys);
    CHECK(xs == ys);
}

TEST_CASE("glorot uniform bounds and moments") {
    nd::Rng rng(17);
    SUBCASE("fan 3/3 gives bound 1") {
        Tensor t = nd::glorot_uniform(3, 3, {3, 3}, rng);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(t[i]) <= 1.0);
    }
    SUBCASE("fan 2/4 gives bound 1") {
        Tensor t = nd::glorot_uniform(2, 4, {2, 4}, rng);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(t[i]) <= 1.0);
    }
    SUBCASE("empirical moments at 1e5 samples") {
        const std::size_t n = 100000;
        Tensor t = nd::glorot_uniform(3, 3, {n}, rng);
        double sum = 0.0, max_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += t[i];
            max_abs = std::max(max_abs, std::abs(t[i]));
        }
        CHECK(max_abs <= 1.0);
        // 3 sigma of the sample mean for U(-1,1): 3 / sqrt(3 n)
        const double band = 3.0 / std::sqrt(3.0 * static_cast<double>(n));
        CHECK(std::abs(sum / static_cast<double>(n)) < band);
    }
    SUBCASE("zero fans rejected") {
        CHECK_THROWS(nd::glorot_uniform(0, 3, {3}, rng));
    }
}

TEST_CASE("affine forward examples") {
    SUBCASE("identity") {
        Tensor W({2, 2}, {1, 0, 0, 1});
        Tensor x = Tensor::vec({3.5, -2.0});
        Tensor b({2});
        Tensor y = nd::affine(W, x, b);
        CHECK(y[0] == 3.5);
        CHECK(y[1] == -2.0);
    }
    SUBCASE("hand multiply") {
        Tensor W({2, 2}, {1, 1, 0, 1});
        Tensor x = Tensor::vec({1, 2});
        Tensor b = Tensor::vec({0, 1});
        Tensor y = nd::affine(W, x, b);
        CHECK(y[0] == 3.0);
        CHECK(y[1] == 3.0);
    }
    SUBCASE("shape mismatch") {
        Tensor W({2, 3});
        CHECK_THROWS(nd::affine(W, Tensor::vec({1, 2}), Tensor({2})));
    }
}

TEST_CASE("affine backward bias gradient is upstream gradient") {
    Tensor W({3, 2}, {1, 2, 3, 4, 5, 6});
    Tensor x = Tensor::vec({0.5, -1.0});
    Tensor g = Tensor::vec({1.0, -2.0, 0.25});
    Tensor gW(W.shape()), gx(x.shape()), gb({3});
    nd::affine_backward(W, x, g, gW, gx, gb);
    for (std::size_t i = 0; i < 3; ++i) CHECK(gb[i] == g[i]);
    // grad_x = W^T g
    CHECK(gx[0] == doctest::Approx(1 * 1.0 + 3 * -2.0 + 5 * 0.25));
    CHECK(gx[1] == doctest::Approx(2 * 1.0 + 4 * -2.0 + 6 * 0.25));
}

TEST_CASE("elementwise_mul examples and commutativity") {
    Tensor a = Tensor::vec({2, 3});
    Tensor b = Tensor::vec({4, -1});
    Tensor c = nd::elementwise_mul(a, b);
    CHECK(c[0] == 8.0);
    CHECK(c[1] == -3.0);

    Tensor ones = Tensor::full({2}, 1.0);
    Tensor same = nd::elementwise_mul(a, ones);
    CHECK(same[0] == a[0]);
    CHECK(same[1] == a[1]);

    nd::Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Tensor u = random_tensor({7}, rng), v = random_tensor({7}, rng);
        Tensor uv = nd::elementwise_mul(u, v), vu = nd::elementwise_mul(v, u);
        for (std::size_t j = 0; j < 7; ++j) CHECK(uv[j] == vu[j]);
    }
    CHECK_THROWS(nd::elementwise_mul(Tensor({2}), Tensor({3})));
}

TEST_CASE("mean_pool") {
    SUBCASE("single row is identity") {
        Tensor rows({1, 3}, {1, 2, 3});
        Tensor m = nd::mean_pool(rows);
        CHECK(m[0] == 1.0);
        CHECK(m[1] == 2.0);
        CHECK(m[2] == 3.0);
    }
    SUBCASE("two rows") {
        Tensor rows({2, 2}, {1, 3, 3, 1});
        Tensor m = nd::mean_pool(rows);
        CHECK(m[0] == 2.0);
        CHECK(m[1] == 2.0);
    }
    SUBCASE("empty input gives zero vector") {
        Tensor rows({0, 4});
        Tensor m = nd::mean_pool(rows);
        CHECK(m.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(m[i] == 0.0);
    }
    SUBCASE("backward distributes g/n") {
        Tensor g = Tensor::vec({2.0, -4.0});
        Tensor grows({4, 2});
        nd::mean_pool_backward(4, g, grows);
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(grows.at(r, 0) == doctest::Approx(0.5));
            CHECK(grows.at(r, 1) == doctest::Approx(-1.0));
        }
    }
}

TEST_CASE("conv1d_ngram examples") {
    nd::Rng rng(23);
    SUBCASE("zero filter, zero bias gives zero output") {
        Tensor emb = random_tensor({6, 3}, rng);
        Tensor filters({1, 12});
        Tensor bias({1});
        auto out = nd::conv1d_ngram(emb, filters, bias, 4);
        CHECK(out.pooled[0] == 0.0);
    }
    SUBCASE("n == window gives single position") {
        Tensor emb = random_tensor({4, 2}, rng);
        Tensor filters = random_tensor({3, 8}, rng);
        Tensor bias = random_tensor({3}, rng);
        auto out = nd::conv1d_ngram(emb, filters, bias, 4);
        for (std::size_t f = 0; f < 3; ++f) {
            double pre = bias[f];
            for (std::size_t k = 0; k < 4; ++k)
                for (std::size_t c = 0; c < 2; ++c) pre += filters.at(f, k * 2 + c) * emb.at(k, c);
            CHECK(out.pooled[f] == doctest::Approx(std::max(0.0, pre)).epsilon(1e-12));
        }
    }
    SUBCASE("matches naive reference on random input") {
        Tensor emb = random_tensor({6, 4}, rng);
        Tensor filters = random_tensor({3, 16}, rng);
        Tensor bias = random_tensor({3}, rng);
        auto out = nd::conv1d_ngram(emb, filters, bias, 4);
        Tensor ref = naive_conv(emb, filters, bias, 4);
        for (std::size_t f = 0; f < 3; ++f) CHECK(out.pooled[f] == doctest::Approx(ref[f]));
    }
    SUBCASE("filter width mismatch rejected") {
        CHECK_THROWS(nd::conv1d_ngram(Tensor({5, 3}), Tensor({2, 8}), Tensor({2}), 4));
    }
}

TEST_CASE("conv1d_ngram equals naive reference over all small shapes") {
    nd::Rng rng(29);
    const std::size_t window = 4, d = 3;
    for (std::size_t n = 4; n <= 10; ++n) {
        for (std::size_t F = 1; F <= 5; ++F) {
            Tensor emb = random_tensor({n, d}, rng);
            Tensor filters = random_tensor({F, window * d}, rng);
            Tensor bias = random_tensor({F}, rng);
            auto out = nd::conv1d_ngram(emb, filters, bias, window);
            Tensor ref = naive_conv(emb, filters, bias, window);
            for (std::size_t f = 0; f < F; ++f)
                CHECK(out.pooled[f] == doctest::Approx(ref[f]).epsilon(1e-12));
        }
    }
}

TEST_CASE("conv1d_ngram pads short inputs with zero rows") {
    nd::Rng rng(31);
    Tensor emb = random_tensor({2, 3}, rng);
    Tensor filters = random_tensor({2, 12}, rng);
    Tensor bias = random_tensor({2}, rng);
    auto out = nd::conv1d_ngram(emb, filters, bias, 4);
    Tensor ref = naive_conv(emb, filters, bias, 4);
    for (std::size_t f = 0; f < 2; ++f) CHECK(out.pooled[f] == doctest::Approx(ref[f]));

    // Empty input: one all-padding window, output relu(bias).
    Tensor empty({0, 3});
    auto out0 = nd::conv1d_ngram(empty, filters, bias, 4);
    for (std::size_t f = 0; f < 2; ++f)
        CHECK(out0.pooled[f] == doctest::Approx(std::max(0.0, bias[f])));
}

TEST_CASE("sigmoid_bce") {
    SUBCASE("logit 0") {
        auto r = nd::sigmoid_bce(0.0, 1.0);
        CHECK(r.prob == 0.5);
        CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(nd::sigmoid_bce_backward(0.0, 1.0) == doctest::Approx(-0.5));
    }
    SUBCASE("large logit stays finite") {
        auto r = nd::sigmoid_bce(20.0, 1.0);
        CHECK(r.loss == doctest::Approx(2.0611536181902037e-9).epsilon(1e-9));
        for (double z : {-500.0, -250.0, 250.0, 500.0}) {
            for (double y : {0.0, 1.0}) {
                auto v = nd::sigmoid_bce(z, y);
                CHECK(std::isfinite(v.loss));
                CHECK(std::isfinite(v.prob));
            }
        }
    }
    SUBCASE("label validated") {
        CHECK_THROWS(nd::sigmoid_bce(0.0, 0.5));
    }
}

TEST_CASE("adamax single hand-computed step") {
    nd::ParamStore params;
    params.add("theta", Tensor::scalar(1.0));
    auto state = nd::AdaMaxState::init(params);
    nd::TensorMap grads;
    grads.emplace("theta", Tensor::scalar(1.0));
    nd::AdaMaxConfig cfg;  // alpha=0.002, beta1=0.9
    nd::adamax_step(params, grads, state, cfg);
    // m = 0.1, u = 1, rate = 0.002/0.1 = 0.02, step = 0.02*0.1/(1+1e-8)
    CHECK(params.at("theta")[0] == doctest::Approx(1.0 - 0.002).epsilon(1e-7));
    CHECK(state.t == 1);
}

TEST_CASE("adamax zero gradient on fresh state leaves params unchanged") {
    nd::ParamStore params;
    params.add("w", Tensor::vec({1.0, -2.0, 3.0}));
    auto state = nd::AdaMaxState::init(params);
    auto grads = params.zero_grads();
    nd::adamax_step(params, grads, state, {});
    CHECK(params.at("w")[0] == 1.0);
    CHECK(params.at("w")[1] == -2.0);
    CHECK(params.at("w")[2] == 3.0);
}

TEST_CASE("adamax masked entries never move") {
    nd::Rng rng(41);
    nd::ParamStore params;
    Tensor table({4, 3});
    Tensor mask = Tensor::full({4, 3}, 1.0);
    for (std::size_t c = 0; c < 3; ++c) {
        mask.at(0, c) = 0.0;  // pinned padding row
        for (std::size_t r = 1; r < 4; ++r) table.at(r, c) = rng.uniform(-1, 1);
    }
    params.add_masked("emb", table, mask);
    auto state = nd::AdaMaxState::init(params);
    for (int step = 0; step < 100; ++step) {
        nd::TensorMap grads;
        grads.emplace("emb", random_tensor({4, 3}, rng));
        nd::adamax_step(params, grads, state, {});
    }
    for (std::size_t c = 0; c < 3; ++c) CHECK(params.at("emb").at(0, c) == 0.0);
}

TEST_CASE("adamax deterministic across identical runs") {
    auto run = [] {
        nd::Rng rng(4242);
        nd::ParamStore params;
        params.add("w", random_tensor({10}, rng));
        auto state = nd::AdaMaxState::init(params);
        for (int step = 0; step < 10; ++step) {
            nd::TensorMap grads;
            grads.emplace("w", random_tensor({10}, rng));
            nd::adamax_step(params, grads, state, {});
        }
        return params.at("w");
    };
    Tensor a = run(), b = run();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("adamax rejects non-finite gradients") {
    nd::ParamStore params;
    params.add("w", Tensor::vec({1.0}));
    auto state = nd::AdaMaxState::init(params);
    nd::TensorMap grads;
    grads.emplace("w", Tensor::vec({std::nan("")}));
    CHECK_THROWS_WITH_AS(nd::adamax_step(params, grads, state, {}),
                         doctest::Contains("non-finite gradient"), std::runtime_error);
}

TEST_CASE("grad_check on a quadratic") {
    nd::ParamStore params;
    params.add("theta", Tensor::scalar(3.0));
    auto loss = [](const nd::ParamStore& p) {
        const double t = p.at("theta")[0];
        return t * t;
    };
    nd::TensorMap analytic;
    analytic.emplace("theta", Tensor::scalar(6.0));
    auto report = nd::grad_check(loss, params, analytic, 1e-4, 1e-3);
    CHECK(report.pass());
    CHECK(report.max_rel_err < 1e-8);
    CHECK(report.worst.numeric == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("grad_check flags wrong gradients and skips masked coords") {
    nd::ParamStore params;
    Tensor w = Tensor::vec({2.0, 5.0});
    Tensor mask = Tensor::vec({1.0, 0.0});
    params.add_masked("w", w, mask);
    auto loss = [](const nd::ParamStore& p) {
        const auto& t = p.at("w");
        return t[0] * t[0] + t[1] * t[1];
    };
    nd::TensorMap analytic;
    analytic.emplace("w", Tensor::vec({4.0, 123.0}));  // second entry wrong but masked
    auto ok = nd::grad_check(loss, params, analytic, 1e-4, 1e-3);
    CHECK(ok.pass());
    CHECK(ok.coords_checked == 1);

    nd::TensorMap wrong;
    wrong.emplace("w", Tensor::vec({4.5, 123.0}));
    auto bad = nd::grad_check(loss, params, wrong, 1e-4, 1e-3);
    CHECK_FALSE(bad.pass());
    CHECK(bad.failures.size() == 1);
    CHECK(bad.failures[0].param == "w");
}

TEST_CASE("grad_check constant loss reports zero gradients") {
    nd::ParamStore params;
    params.add("w", Tensor::vec({1.0, 2.0, 3.0}));
    auto loss = [](const nd::ParamStore&) { return 7.0; };
    auto report = nd::grad_check(loss, params, params.zero_grads(), 1e-4, 1e-8);
    CHECK(report.pass());
    CHECK(report.max_rel_err <= 1e-8);
}

TEST_CASE("primitive backwards agree with finite differences") {
    nd::Rng rng(59);
    const double eps = 1e-4, tol = 1e-3;

    SUBCASE("affine") {
        nd::ParamStore params;
        params.add("W", random_tensor({3, 4}, rng));
        params.add("x", random_tensor({4}, rng));
        params.add("b", random_tensor({3}, rng));
        Tensor probe = random_tensor({3}, rng);
        auto loss = [&probe](const nd::ParamStore& p) {
            return nd::dot(nd::affine(p.at("W"), p.at("x"), p.at("b")), probe);
        };
        auto grads = params.zero_grads();
        nd::affine_backward(params.at("W"), params.at("x"), probe, grads.at("W"), grads.at("x"),
                            grads.at("b"));
        auto report = nd::grad_check(loss, params, grads, eps, tol);
        CHECK(report.pass());
    }

    SUBCASE("conv1d_ngram") {
        nd::ParamStore params;
        params.add("emb", random_tensor({6, 3}, rng));
        params.add("filters", random_tensor({4, 12}, rng));
        params.add("bias", random_tensor({4}, rng));
        Tensor probe = random_tensor({4}, rng);
        auto loss = [&probe](const nd::ParamStore& p) {
            auto out = nd::conv1d_ngram(p.at("emb"), p.at("filters"), p.at("bias"), 4);
            return nd::dot(out.pooled, probe);
        };
        auto cache = nd::conv1d_ngram(params.at("emb"), params.at("filters"), params.at("bias"), 4);
        auto grads = params.zero_grads();
        nd::conv1d_ngram_backward(params.at("emb"), params.at("filters"), 4, cache, probe,
                                  grads.at("emb"), grads.at("filters"), grads.at("bias"));
        auto report = nd::grad_check(loss, params, grads, eps, tol);
        CHECK(report.pass());
    }

    SUBCASE("mean_pool and elementwise_mul") {
        nd::ParamStore params;
        params.add("rows", random_tensor({5, 4}, rng));
        params.add("gate", random_tensor({4}, rng));
        Tensor probe = random_tensor({4}, rng);
        auto loss = [&probe](const nd::ParamStore& p) {
            Tensor pooled = nd::mean_pool(p.at("rows"));
            return nd::dot(nd::elementwise_mul(pooled, p.at("gate")), probe);
        };
        Tensor pooled = nd::mean_pool(params.at("rows"));
        auto grads = params.zero_grads();
        Tensor gpooled({4});
        nd::elementwise_mul_backward(pooled, params.at("gate"), probe, gpooled, grads.at("gate"));
        nd::mean_pool_backward(5, gpooled, grads.at("rows"));
        auto report = nd::grad_check(loss, params, grads, eps, tol);
        CHECK(report.pass());
    }

    SUBCASE("sigmoid_bce") {
        for (double label : {0.0, 1.0}) {
            nd::ParamStore params;
            params.add("z", Tensor::scalar(rng.uniform(-3, 3)));
            auto loss = [label](const nd::ParamStore& p) {
                return nd::sigmoid_bce(p.at("z")[0], label).loss;
            };
            nd::TensorMap grads;
            grads.emplace("z", Tensor::scalar(nd::sigmoid_bce_backward(params.at("z")[0], label)));
            auto report = nd::grad_check(loss, params, grads, eps, tol);
            CHECK(report.pass());
        }
    }
}

TEST_CASE("checkpoint round trip is exact and byte stable") {
    nd::Rng rng(61);
    nd::ParamStore params;
    params.add("b.second", random_tensor({3, 2}, rng));
    params.add("a.first", random_tensor({5}, rng));
    params.add("c.third", Tensor::scalar(-0.125));

    const auto dir = std::filesystem::temp_directory_path() / "rollcall_ckpt_test";
    std::filesystem::create_directories(dir);
    const auto prefix = dir / "model";
    nlohmann::json meta{{"note", "test"}};
    nd::save_checkpoint(params, prefix, meta);

    nlohmann::json meta_out;
    auto loaded = nd::load_checkpoint(prefix, &meta_out);
    CHECK(meta_out.at("note") == "test");
    for (const auto& [name, t] : params.tensors()) {
        const auto& l = loaded.at(name);
        REQUIRE(l.same_shape(t));
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(l[i] == t[i]);
    }

    // Re-saving produces identical bytes.
    const auto prefix2 = dir / "model2";
    nd::save_checkpoint(params, prefix2, meta);
    auto bytes = [](const std::filesystem::path& p) { return util::read_file(p); };
    CHECK(bytes(dir / "model.bin") == bytes(dir / "model2.bin"));
    std::filesystem::remove_all(dir);
}
