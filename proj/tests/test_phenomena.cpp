#include <doctest.h>

#include <cmath>

#include "eoslab/phenomena.hpp"
#include "eoslab/theorem_verifier.hpp"

using namespace eoslab;

namespace {
Trajectory run_at(const Objective& f, double x0, double y0, double h) {
    RunConfig c;
    c.spec = f;
    c.x0 = x0;
    c.y0 = y0;
    c.learning_rate = h;
    return run(c);
}
Trajectory fig1c() { return run_at(Objective::good(1.0), 0.2, 10.0, 4.0 / 100.04); }
Trajectory fig1d() { return run_at(Objective::good(1.0), 2.0, 10.0, 4.0 / 104.0); }
Trajectory fig2() { return run_at(Objective::bad(3), 0.15, 10.0, 4.0 / 100.0225 / std::pow(1.5, 4)); }
}  // namespace

TEST_SUITE("phenomena") {
    TEST_CASE("catapult") {
        CHECK(detect_catapult(fig1c()).detected);
        CHECK_FALSE(detect_catapult(fig2()).detected);

        // hand-built run whose loss only decreases
        Trajectory t;
        t.config.learning_rate = 0.1;
        for (long k = 0; k < 50; ++k) {
            StepRecord r{};
            r.k = k;
            r.loss = 1.0 / (1.0 + k);
            r.sharpness = 1.0;
            t.steps.push_back(r);
        }
        CHECK_FALSE(detect_catapult(t).detected);
    }

    TEST_CASE("balancing") {
        const BalancingResult b = detect_balancing(fig1c());
        CHECK(b.detected);
        CHECK(b.initial_gap == doctest::Approx(96.04));
        CHECK(b.final_gap == doctest::Approx(2.0 / (4.0 / 100.04) - 2.0).epsilon(0.02));
        CHECK_FALSE(detect_balancing(fig2()).detected);
        const BalancingResult z = detect_balancing(run_at(Objective::good(1.0), 1.0, 1.0, 0.5));
        CHECK_FALSE(z.detected);
        CHECK(z.final_gap == 0.0);
    }

    TEST_CASE("EoS stages") {
        const EosResult c = detect_eos_stages(fig1c());
        CHECK(c.de_sharpening);
        CHECK(c.progressive_sharpening);
        CHECK(c.limiting);
        const EosResult d = detect_eos_stages(fig1d());
        CHECK_FALSE(d.de_sharpening);
        CHECK(d.progressive_sharpening);
        CHECK(d.limiting);
        const EosResult b = detect_eos_stages(run_at(Objective::bad(3), 6.0, 1.0, 4.0 / (37.0 * std::pow(6.0, 4))));
        CHECK_FALSE(b.limiting);
    }

    TEST_CASE("one-sided convergence") {
        const OneSidedResult s = detect_one_sided(fig2());
        CHECK(s.detected);
        CHECK(s.s_inf <= s.one_over_h);
        CHECK_FALSE(detect_one_sided(fig1c()).detected);

        // a start with r0 < 0: one overshoot, then a single side from k = 1 on
        const Point2D p = point_from_invariants(37.0, 2.0);
        const Objective b3 = Objective::bad(3);
        const double h = 2.5 / lr_denominator(TheoremId::Conv_Bad, b3, p.x(), p.y());
        const Trajectory t = run_at(b3, p.x(), p.y(), h);
        REQUIRE(t.first().r < 0.0);
        const OneSidedResult o = detect_one_sided(t);
        CHECK(o.detected);
        REQUIRE(o.index);
        CHECK(*o.index == 1);
    }

    TEST_CASE("learning-rate regime") {
        CHECK(classify_lr_regime(fig1c()) == LrRegime::LargeLR);
        CHECK(classify_lr_regime(fig2()) == LrRegime::LargeLR);
        CHECK(classify_lr_regime(run_at(Objective::bad(1), 2.0, 0.5, 1e-4)) == LrRegime::RegularLR);
    }

    TEST_CASE("cross-detector consistency") {
        for (const Trajectory& t : {fig1c(), fig1d(), fig2(), run_at(Objective::bad(5), 6.0, 0.3, 1e-6),
                                    run_at(Objective::good(0.5), 0.3, 9.0, 4.0 / 81.09)}) {
            const PhenomenaReport r = analyze(t);
            if (r.eos.limiting) CHECK(r.eos.s_inf <= 2.0 / t.h() + 10 * t.config.convergence_tol);
            if (r.one_sided.detected) CHECK_FALSE(r.eos.limiting);
            const PhenomenaReport again = analyze(t);
            CHECK(again.eos.s_inf == r.eos.s_inf);
            CHECK(again.catapult.detected == r.catapult.detected);
        }
    }
}
