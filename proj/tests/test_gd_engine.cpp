#include <doctest.h>

#include <cmath>

#include "eoslab/gd_engine.hpp"
#include "eoslab/parallel.hpp"

using namespace eoslab;

namespace {
RunConfig cfg(const Objective& f, double x0, double y0, double h) {
    RunConfig c;
    c.spec = f;
    c.x0 = x0;
    c.y0 = y0;
    c.learning_rate = h;
    return c;
}
const RunConfig kFig1 = cfg(Objective::good(1.0), 0.2, 10.0, 4.0 / 100.04);
const RunConfig kFig2 = cfg(Objective::bad(3), 0.15, 10.0, 4.0 / 100.0225 / std::pow(1.5, 4));
}  // namespace

TEST_SUITE("gd_engine") {
    TEST_CASE("single steps") {
        const auto p = gd_step(Objective::bad(1), Point2D(2, 1), 0.1);
        REQUIRE(p);
        CHECK(p->x() == doctest::Approx(1.9));
        CHECK(p->y() == doctest::Approx(0.8));
        for (const Objective& f : {Objective::good(0.5), Objective::bad(3)}) {
            const auto q = gd_step(f, Point2D(4.0, 0.25), 0.3);
            REQUIRE(q);
            CHECK(q->x() == 4.0);
            CHECK(q->y() == 0.25);
        }
        CHECK_FALSE(gd_step(Objective::bad(9), Point2D(1e30, 1e30), 1.0));
    }

    TEST_CASE("config validation") {
        RunConfig c = kFig1;
        c.learning_rate = -1;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = kFig1;
        c.max_iters = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = kFig1;
        c.x0 = std::nan("");
        CHECK_THROWS(c.validate());
        CHECK(RunConfig{}.effective_stride() == 1);
        c = kFig1;
        c.max_iters = 2'000'000;
        CHECK(c.effective_stride() == 10);
    }

    TEST_CASE("Fig. 1 start converges at the edge of stability") {
        const Trajectory t = run(kFig1);
        REQUIRE(t.status == RunStatus::Converged);
        REQUIRE(t.limit);
        const double S = t.limit->norm_sq();
        CHECK(S > 0.95 * 2.0 / t.h());
        CHECK(S <= 2.0 / t.h() + 10 * kFig1.convergence_tol);
        CHECK(std::abs(t.last().delta) < kFig1.convergence_tol);
    }

    TEST_CASE("Fig. 2 start converges below 1/h") {
        const Trajectory t = run(kFig2);
        REQUIRE(t.converged());
        CHECK(t.limit->norm_sq() <= 1.0 / t.h());
    }

    TEST_CASE("small step size stays near the start") {
        const Trajectory t = run(cfg(Objective::bad(1), 2.0, 0.5, 1e-3));
        REQUIRE(t.converged());
        CHECK(t.limit->x() == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(t.limit->y() == doctest::Approx(0.5).epsilon(1e-6));
    }

    TEST_CASE("divergence is reported") {
        const Trajectory t = run(cfg(Objective::bad(3), 6.0, 1.0, 8.0 / (37.0 * std::pow(6.0, 4))));
        CHECK(t.status == RunStatus::Diverged);
    }

    TEST_CASE("runs are bit-identical and stride thins records") {
        const Trajectory a = run(kFig1), b = run(kFig1);
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t i = 0; i < a.steps.size(); ++i) {
            CHECK(a.steps[i].x == b.steps[i].x);
            CHECK(a.steps[i].y == b.steps[i].y);
        }
        RunConfig c = kFig1;
        c.record_stride = 10;
        const Trajectory s = run(c);
        CHECK(s.iterations == a.iterations);
        CHECK(s.steps.size() < a.steps.size() / 5);
        CHECK(s.steps[1].k == 10);
    }

    TEST_CASE("per-step identities hold along trajectories") {
        for (const RunConfig& c : {kFig1, kFig2, cfg(Objective::good(0.3), 0.5, 8.0, 4.0 / 64.25),
                                   cfg(Objective::bad(1), 10.0, 1.5, 4.0 / 102.25),
                                   cfg(Objective::bad(5), 6.0, 0.3, 2.0 / (40.09 * std::pow(1.8, 8)))}) {
            CAPTURE(c.spec.name());
            const Trajectory t = run(c);
            const IdentityResiduals r = check_identities(t);
            CHECK(r.checked > 0);
            CHECK(r.product <= 1.0);
            CHECK(r.norm <= 1.0);
            CHECK(r.difference <= 1.0);
            CHECK(r.appendix_form <= 1.0);
        }
    }

    TEST_CASE("phase boundary") {
        const auto k = phase_boundary(run(kFig1));
        REQUIRE(k);
        CHECK(*k >= 1);
        // uu0 = 104 starts at twice 2/h, so the boundary comes later
        const Trajectory td = run(cfg(Objective::good(1.0), 2.0, 10.0, 4.0 / 104.0));
        const auto d = phase_boundary(td);
        REQUIRE(d);
        CHECK(*d >= 1);
        for (const StepRecord& r : td.steps)
            if (r.k >= *d) CHECK((r.uu <= 2.0 / td.h() && std::abs(r.r) < 1.0));
        RunConfig c = kFig1;
        c.max_iters = 5;
        CHECK_FALSE(phase_boundary(run(c)));
    }

    TEST_CASE("fixed-point stability") {
        const Objective f = Objective::bad(1);
        CHECK(fixed_point_stability(f, Point2D(2, 0.5), 0.1) == Stability::Stable);
        CHECK(fixed_point_stability(f, Point2D(2, 0.5), 0.5) == Stability::Unstable);
        CHECK(fixed_point_stability(f, Point2D(1, 1), 1.0) == Stability::Marginal);
        CHECK_THROWS(fixed_point_stability(f, Point2D(2, 2), 0.1));
    }

    TEST_CASE("b = 1 converges below the global step limit") {
        // h < 2/L for every start in the tested region
        for (double x0 : {0.5, 1.0, 1.5, 2.0})
            for (double y0 : {0.3, 1.0, 2.0}) {
                if (x0 * x0 + y0 * y0 > 8.0) continue;
                CAPTURE(x0);
                CAPTURE(y0);
                CHECK(run(cfg(Objective::bad(1), x0, y0, 0.2)).converged());
            }
    }

    TEST_CASE("batch runs match serial runs") {
        std::vector<RunConfig> cs{kFig1, kFig2, cfg(Objective::good(0.5), 1.0, 5.0, 4.0 / 26.0)};
        const auto par = run_batch(cs, Exec::Parallel);
        const auto ser = run_batch(cs, Exec::Serial);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            CHECK(par[i].iterations == ser[i].iterations);
            CHECK(par[i].last().x == ser[i].last().x);
        }
    }
}
