#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eoslab/gd_engine.hpp"

namespace eoslab {

enum class TheoremId {
    EoS_Good,
    NoEoS_Bad,
    Balancing_Good,
    Balancing_b1,
    NoBalancing_Bad,
    Conv_Good,
    Conv_b1,
    Conv_Bad,
    Stability_Necessity,
};
std::string to_string(TheoremId id);
TheoremId theorem_from_string(const std::string& s);

enum class Hypotheses { Satisfied, Marginal, Violated };
std::string to_string(Hypotheses h);

enum class Verdict { Pass, Fail, Skipped, Inconclusive };
std::string to_string(Verdict v);

// Learning rate either as the theorem's multiplier C or as an absolute step size h.
struct LearningRate {
    enum class Kind { Multiplier, Absolute };
    Kind kind = Kind::Multiplier;
    double value = 4.0;
    static LearningRate multiplier(double C) { return {Kind::Multiplier, C}; }
    static LearningRate absolute(double h) { return {Kind::Absolute, h}; }
    bool operator==(const LearningRate&) const = default;
};

// Denominator D with h = C / D in the learning-rate window of a theorem:
// uu0 for the good family, uu0 + 4 for b = 1, (uu0 + 4)(x0 y0)^{2b-2} for odd b >= 3.
double lr_denominator(TheoremId id, const Objective& spec, double x0, double y0);

struct RegimeConstants {
    double M1 = 0.0;       // good family: upper bound on x0 y0
    double M2 = 0.0;       // good family: lower bound on C
    double M2_band = 0.0;  // width of the O(1/uu0^2) correction to M2
    double M3 = 0.0;       // odd b >= 3: upper bound on C
    double c1 = 0.0;
    double c2 = 0.0;
    double eps_M3 = 1e-3;
};

double compute_M1(double a);
double compute_M2(double a);
// (1 + h^2 ell0^2) x0 y0 - h ell0 (x0^2 + y0^2) at h = C / ((uu0 + 4)(x0 y0)^{2b-2});
// this is x1 y1, and M3 keeps it at least eps.
double m3_condition(int b, double x0, double y0, double C);
double compute_M3(int b, double x0, double y0, double eps = 1e-3);
RegimeConstants regime_constants(const Objective& spec, double x0, double y0, double eps_M3 = 1e-3);

struct VerifyOptions {
    long max_iters = 2'000'000;
    double convergence_tol = 1e-12;
    double marginal_band = 0.05;  // relative band for hypotheses stated with "up to log terms"
    double slack_factor = 10.0;   // additive allowance slack_factor * h * log(1/h)
    double eps_M3 = 1e-3;
    double contraction_floor = 1e-10;  // |delta| below this is round-off, excluded from rate checks
};

struct TheoremCheck {
    TheoremId theorem = TheoremId::Conv_Good;
    Objective spec = Objective::good(1.0);
    double x0 = 0.0, y0 = 0.0;
    double C = 0.0;
    double h = 0.0;
    Hypotheses hypotheses = Hypotheses::Satisfied;
    std::vector<std::string> notes;
    double predicted_lo = 0.0;  // -inf when one-sided
    double predicted_hi = 0.0;  // +inf when one-sided
    double measured = 0.0;
    Verdict verdict = Verdict::Skipped;
    double margin = 0.0;  // signed distance from measured to the binding bound (>= 0 when it holds)
    double slack = 0.0;
    RunStatus run_status = RunStatus::MaxIters;
    long iterations = 0;
    std::optional<Stability> limit_stability;
    std::map<std::string, double> extras;
};

struct VerifyOutcome {
    TheoremCheck check;
    Trajectory trajectory;
};

VerifyOutcome verify_with_trajectory(TheoremId id, const Objective& spec, double x0, double y0, LearningRate lr,
                                     const VerifyOptions& opt = {});
TheoremCheck verify(TheoremId id, const Objective& spec, double x0, double y0, LearningRate lr,
                    const VerifyOptions& opt = {});

struct GridCell {
    Objective spec = Objective::good(1.0);
    double x0 = 0.0, y0 = 0.0;
    LearningRate lr;
    bool operator==(const GridCell&) const = default;
};

// Cells run concurrently; results come back in grid order.
std::vector<TheoremCheck> sweep(TheoremId id, std::span<const GridCell> grid, const VerifyOptions& opt = {});

// The point with x^2 + y^2 = uu and xy = p, x >= y (or swapped).
Point2D point_from_invariants(double uu, double p, bool x_larger = true);

}  // namespace eoslab
