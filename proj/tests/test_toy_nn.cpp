#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eoslab/toy_nn.hpp"

using namespace eoslab;

namespace {

NetworkConfig tiny(LossKind loss, Activation act, bool bn, int depth) {
    NetworkConfig c;
    c.N0 = 3;
    c.N1 = 4;
    c.N2 = 2;
    c.loss = loss;
    c.activation = act;
    c.batch_norm = bn;
    c.depth = depth;
    c.init.frob_W1 = 1.5;
    c.init.frob_W2 = 2.0;
    return c;
}

// Kinks (ReLU at 0, Huber at |d| = delta) break finite differences; such draws are rejected.
bool near_kink(const NetworkConfig& c, const NetworkState& st, const Dataset& d) {
    const Matrix z = pre_activations(c, st, d.inputs);
    const bool relu_like = c.activation.kind != Activation::Kind::Tanh;
    if (relu_like)
        for (double v : z.flat())
            if (std::abs(v) < 1e-4) return true;
    if (c.loss == LossKind::Huber) {
        const Matrix out = network_output(c, st, d.inputs);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (std::abs(std::abs(out.flat()[i] - d.targets.flat()[i]) - c.huber_delta) < 1e-4) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("toy_nn") {
    TEST_CASE("initialization") {
        NetworkConfig c;
        const NetworkState a = init_network(c), b = init_network(c);
        CHECK(std::abs(a.W1.frobenius() - 6.0) < 1e-10);
        CHECK(std::abs(a.W2.frobenius() - 20.0) < 1e-10);
        CHECK(a.W1 == b.W1);
        CHECK(a.W2 == b.W2);
        CHECK(a.balancing_gap_sq() == doctest::Approx(196.0).epsilon(1e-12));
        c.init.seed = 2;
        CHECK_FALSE(init_network(c).W1 == a.W1);
        c.depth = 3;
        const NetworkState t = init_network(c);
        for (double v : t.W3.flat()) CHECK(std::abs(v) == 1.0);
    }

    TEST_CASE("config validation") {
        NetworkConfig c;
        c.depth = 4;
        CHECK_THROWS(c.validate());
        c = NetworkConfig{};
        c.init.frob_W1 = 0.0;
        CHECK_THROWS(c.validate());
        c = NetworkConfig{};
        c.loss = LossKind::Huber;
        c.huber_delta = -1.0;
        CHECK_THROWS(c.validate());
        c = NetworkConfig{};
        c.activation = Activation::relu_k(1);
        CHECK_THROWS(c.validate());
    }

    TEST_CASE("flatten round-trip") {
        const NetworkConfig c;
        NetworkState st = init_network(c);
        const auto theta = st.flatten();
        CHECK(theta.size() == c.N0 * c.N1 + c.N1 * c.N2);
        NetworkState copy = st;
        copy.unflatten(theta);
        CHECK(copy.W1 == st.W1);
        CHECK(copy.W2 == st.W2);
        CHECK_THROWS(copy.unflatten(std::vector<double>(3)));
    }

    TEST_CASE("loss with zero output") {
        NetworkConfig c;
        c.N2 = 10;
        NetworkState st = init_network(c);
        for (auto& v : st.W2.flat()) v = 0.0;
        const Dataset d = synthetic_dataset(7, c.N0, c.N2, 3);
        for (std::size_t i = 0; i < 7; ++i) {
            double row = 0;
            for (std::size_t j = 0; j < 10; ++j) row += d.targets(i, j);
            CHECK(row == 1.0);
        }
        CHECK(forward_loss(c, st, d) == doctest::Approx(0.05).epsilon(1e-15));
    }

    TEST_CASE("batch norm output is standardized") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g(3.0, 2.0);
        Matrix z(50, 4);
        for (auto& v : z.flat()) v = g(rng);
        const double eps = 1e-5;
        const Matrix n = batch_normalize(z, eps);
        for (std::size_t j = 0; j < 4; ++j) {
            double mu = 0, var = 0;
            for (std::size_t i = 0; i < 50; ++i) mu += n(i, j);
            mu /= 50;
            for (std::size_t i = 0; i < 50; ++i) var += (n(i, j) - mu) * (n(i, j) - mu);
            var /= 50;
            CHECK(std::abs(mu) <= 1e-10);
            CHECK(var >= 1.0 - 10 * eps);
            CHECK(var <= 1.0);
        }
    }

    TEST_CASE("gradient matches central differences") {
        std::mt19937_64 rng(11);
        for (LossKind loss : {LossKind::L2, LossKind::Huber})
            for (Activation act : {Activation::tanh(), Activation::relu(), Activation::leaky_relu(), Activation::relu_k(3)})
                for (bool bn : {false, true})
                    for (int depth : {2, 3}) {
                        NetworkConfig c = tiny(loss, act, bn, depth);
                        CAPTURE(static_cast<int>(loss));
                        CAPTURE(static_cast<int>(act.kind));
                        CAPTURE(bn);
                        CAPTURE(depth);
                        NetworkState st;
                        Dataset d;
                        int tries = 0;
                        do {
                            c.init.seed = rng();
                            st = init_network(c);
                            d = synthetic_dataset(5, c.N0, c.N2, rng());
                        } while (near_kink(c, st, d) && ++tries < 200);
                        REQUIRE(tries < 200);
                        const auto g = loss_grad(c, st, d);
                        const auto theta = st.flatten();
                        double gmax = 0;
                        for (double v : g) gmax = std::max(gmax, std::abs(v));
                        // 200 coordinates, drawn with replacement on these small nets
                        std::uniform_int_distribution<std::size_t> pick(0, theta.size() - 1);
                        double worst = 0;
                        for (int n = 0; n < 200; ++n) {
                            const std::size_t i = pick(rng);
                            const double step = 1e-6 * std::max(1.0, std::abs(theta[i]));
                            auto tp = theta, tm = theta;
                            tp[i] += step;
                            tm[i] -= step;
                            NetworkState sp = st, sm = st;
                            sp.unflatten(tp);
                            sm.unflatten(tm);
                            const double fd = (forward_loss(c, sp, d) - forward_loss(c, sm, d)) / (2 * step);
                            worst = std::max(worst, std::abs(fd - g[i]) / std::max(std::abs(g[i]), 1e-3 * gmax));
                        }
                        CHECK(worst <= 1e-5);
                    }
    }

    TEST_CASE("Lanczos on a known spectrum") {
        const LinearOperator op = [](std::span<const double> in, std::span<double> out) {
            for (std::size_t i = 0; i < 3; ++i) out[i] = (i + 1.0) * in[i];
        };
        const LanczosResult r = lanczos_top(op, 3, 20, 1);
        CHECK(std::abs(r.top - 3.0) <= 1e-6);
        CHECK(r.iterations <= 3);
    }

    TEST_CASE("Lanczos agrees with the dense Hessian, HVP is symmetric") {
        for (LossKind loss : {LossKind::L2, LossKind::Huber})
            for (Activation act : {Activation::tanh(), Activation::relu_k(3)})
                for (bool bn : {false, true}) {
                    NetworkConfig c;
                    c.N0 = 5;
                    c.N1 = 8;
                    c.N2 = 3;
                    c.loss = loss;
                    c.activation = act;
                    c.batch_norm = bn;
                    c.init.frob_W1 = 2.0;
                    c.init.frob_W2 = 3.0;
                    const NetworkState st = init_network(c);
                    const Dataset d = synthetic_dataset(12, c.N0, c.N2, 4);
                    REQUIRE(st.parameter_count() <= 200);
                    const Matrix H = dense_hessian(c, st, d);
                    const double dense_top = symmetric_eigenvalues(H).back();
                    const double lz = sharpness_lanczos(c, st, d, 40, 9);
                    CAPTURE(dense_top);
                    CHECK(std::abs(lz - dense_top) <= 1e-3 * std::abs(dense_top));

                    std::mt19937_64 rng(3);
                    std::normal_distribution<double> g;
                    std::vector<double> u(st.parameter_count()), v(st.parameter_count());
                    for (auto& e : u) e = g(rng);
                    for (auto& e : v) e = g(rng);
                    const double vhu = dot(v, hvp(c, st, d, u)), uhv = dot(u, hvp(c, st, d, v));
                    CHECK(std::abs(vhu - uhv) <= 1e-4 * std::max(std::abs(vhu), std::abs(uhv)));
                }
    }

    TEST_CASE("training is deterministic and leaves the fixed layer alone") {
        NetworkConfig c;
        c.depth = 3;
        c.loss = LossKind::Huber;
        c.activation = Activation::relu_k(3);
        c.init.frob_W1 = 3;
        c.init.frob_W2 = 10;
        const Dataset d = synthetic_dataset(32, c.N0, c.N2, 2);
        TrainOptions opt;
        opt.h = 1e-3;
        opt.epochs = 60;
        opt.record_stride = 7;
        NetworkState a = init_network(c), b = init_network(c);
        const Matrix w3 = a.W3;
        const NNTrajectory ta = train_full_batch(c, a, d, opt), tb = train_full_batch(c, b, d, opt);
        REQUIRE(ta.records.size() == tb.records.size());
        for (std::size_t i = 0; i < ta.records.size(); ++i) {
            CHECK(ta.records[i].loss == tb.records[i].loss);
            CHECK(ta.records[i].sharpness == tb.records[i].sharpness);
        }
        CHECK(a.W1 == b.W1);
        CHECK(a.W3 == w3);
        CHECK(a.epoch == 60);
        CHECK(ta.records.front().epoch == 0);
        CHECK(ta.records.back().epoch == 60);
    }

    TEST_CASE("parallel products give the same training run") {
        NetworkConfig c;
        const Dataset d = synthetic_dataset(32, c.N0, c.N2, 2);
        TrainOptions opt;
        opt.epochs = 20;
        NetworkState a = init_network(c);
        const auto ta = train_full_batch(c, a, d, opt);
        c.parallel_matmul = true;
        NetworkState b = init_network(c);
        const auto tb = train_full_batch(c, b, d, opt);
        CHECK(a.W1 == b.W1);
        CHECK(ta.records.back().sharpness == tb.records.back().sharpness);
    }

    TEST_CASE("non-finite loss stops training") {
        NetworkConfig c;
        c.activation = Activation::relu_k(3);
        const Dataset d = synthetic_dataset(16, c.N0, c.N2, 2);
        NetworkState st = init_network(c);
        TrainOptions opt;
        opt.h = 10.0;
        opt.epochs = 200;
        const NNTrajectory t = train_full_batch(c, st, d, opt);
        CHECK(t.diverged);
        CHECK_FALSE(classify_nn(t).eos);
        opt.h = -1;
        CHECK_THROWS(train_full_batch(c, st, d, opt));
    }

    TEST_CASE("batch norm flattens output growth") {
        const Dataset d = synthetic_dataset(64, 20, 5, 1);
        for (int k : {2, 3}) {
            NetworkConfig c;
            c.activation = Activation::relu_k(k);
            const NetworkState st = init_network(c);
            CHECK(output_growth_slope(c, st, d.inputs) >= k - 0.5);
            c.batch_norm = true;
            CHECK(output_growth_slope(c, st, d.inputs) <= 0.1);
        }
    }
}
