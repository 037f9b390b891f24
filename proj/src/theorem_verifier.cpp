#include "eoslab/theorem_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "eoslab/parallel.hpp"
#include "eoslab/phenomena.hpp"
#include "eoslab/propositions.hpp"

namespace eoslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct IdName {
    TheoremId id;
    const char* name;
};
constexpr IdName kNames[] = {
    {TheoremId::EoS_Good, "EoS_Good"},
    {TheoremId::NoEoS_Bad, "NoEoS_Bad"},
    {TheoremId::Balancing_Good, "Balancing_Good"},
    {TheoremId::Balancing_b1, "Balancing_b1"},
    {TheoremId::NoBalancing_Bad, "NoBalancing_Bad"},
    {TheoremId::Conv_Good, "Conv_Good"},
    {TheoremId::Conv_b1, "Conv_b1"},
    {TheoremId::Conv_Bad, "Conv_Bad"},
    {TheoremId::Stability_Necessity, "Stability_Necessity"},
};

enum class Group { Good, B1, Bad, Any };

Group group_of(TheoremId id) {
    switch (id) {
        case TheoremId::EoS_Good:
        case TheoremId::Balancing_Good:
        case TheoremId::Conv_Good: return Group::Good;
        case TheoremId::Balancing_b1:
        case TheoremId::Conv_b1: return Group::B1;
        case TheoremId::NoEoS_Bad:
        case TheoremId::NoBalancing_Bad:
        case TheoremId::Conv_Bad: return Group::Bad;
        case TheoremId::Stability_Necessity: return Group::Any;
    }
    return Group::Any;
}

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Accumulates hypothesis checks; the overall status is the worst individual one.
class HypothesisSet {
public:
    explicit HypothesisSet(double band) : band_(band) {}

    void exact(bool ok, const std::string& what) { add(ok ? Hypotheses::Satisfied : Hypotheses::Violated, what); }
    // value <~ bound
    void approx_upper(double value, double bound, const std::string& what) {
        if (value <= bound) add(Hypotheses::Satisfied, what);
        else if (value <= bound * (1.0 + band_)) add(Hypotheses::Marginal, what);
        else add(Hypotheses::Violated, what);
    }
    // value >~ bound
    void approx_lower(double value, double bound, const std::string& what) {
        if (value >= bound) add(Hypotheses::Satisfied, what);
        else if (value >= bound * (1.0 - band_)) add(Hypotheses::Marginal, what);
        else add(Hypotheses::Violated, what);
    }
    void add(Hypotheses h, const std::string& what) {
        if (static_cast<int>(h) > static_cast<int>(status_)) status_ = h;
        if (h != Hypotheses::Satisfied) notes_.push_back(to_string(h) + ": " + what);
    }
    Hypotheses status() const { return status_; }
    std::vector<std::string>& notes() { return notes_; }

private:
    double band_;
    Hypotheses status_ = Hypotheses::Satisfied;
    std::vector<std::string> notes_;
};

void require_family(TheoremId id, const Objective& spec) {
    const Group g = group_of(id);
    const bool ok = (g == Group::Good && spec.family() == Family::Good) ||
                    (g == Group::B1 && spec.family() == Family::Bad && spec.b() == 1) ||
                    (g == Group::Bad && spec.family() == Family::Bad && spec.b() >= 3) || g == Group::Any;
    if (!ok) throw std::invalid_argument(to_string(id) + " does not apply to " + spec.name());
}

double rate_slack(const VerifyOptions& opt, double h) { return opt.slack_factor * h * std::log(1.0 / h); }

}  // namespace

std::string to_string(TheoremId id) {
    for (const auto& n : kNames)
        if (n.id == id) return n.name;
    return "?";
}

TheoremId theorem_from_string(const std::string& s) {
    for (const auto& n : kNames)
        if (s == n.name) return n.id;
    throw std::invalid_argument("unknown theorem id '" + s + "'");
}

std::string to_string(Hypotheses h) {
    switch (h) {
        case Hypotheses::Satisfied: return "Satisfied";
        case Hypotheses::Marginal: return "Marginal";
        case Hypotheses::Violated: return "Violated";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Skipped: return "skipped";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

double lr_denominator(TheoremId id, const Objective& spec, double x0, double y0) {
    const double uu = x0 * x0 + y0 * y0;
    Group g = group_of(id);
    if (g == Group::Any) {
        if (spec.family() != Family::Bad) g = Group::Good;
        else g = spec.b() == 1 ? Group::B1 : Group::Bad;
    }
    switch (g) {
        case Group::Good: return uu;
        case Group::B1: return uu + 4.0;
        case Group::Bad: return (uu + 4.0) * std::pow(x0 * y0, 2 * spec.b() - 2);
        case Group::Any: break;
    }
    return uu;
}

double compute_M1(double a) {
    const Objective f = Objective::good(a);
    const double target = 0.5 * f.q(1.0);
    if (!(f.q(1.0) > target && f.q(100.0) < target)) throw std::runtime_error("compute_M1: no root in [1, 100]");
    return 1.0 + q_inverse(f, target, 1.0, 100.0);
}

double compute_M2(double a) { return 2.0 / Objective::good(a).q(1.0); }

double m3_condition(int b, double x0, double y0, double C) {
    const Objective f = Objective::bad(b);
    const double p = x0 * y0, uu = x0 * x0 + y0 * y0;
    const double h = C / ((uu + 4.0) * std::pow(p, 2 * b - 2));
    const double l0 = f.dF(p);
    return (1.0 + h * h * l0 * l0) * p - h * l0 * uu;
}

double compute_M3(int b, double x0, double y0, double eps) {
    if (b < 3 || b % 2 == 0) throw std::invalid_argument("compute_M3 needs odd b >= 3");
    auto cond = [&](double C) { return m3_condition(b, x0, y0, C); };
    if (!(cond(2.0) >= eps)) throw domain_error("compute_M3: condition fails at C = 2 (outside the theorem regime)");
    // cond is a convex quadratic in C; the admissible range is the part of [2, 4]
    // before its first crossing of eps.
    const Objective f = Objective::bad(b);
    const double p = x0 * y0, uu = x0 * x0 + y0 * y0;
    const double D = (uu + 4.0) * std::pow(p, 2 * b - 2);
    const double l0 = f.dF(p);
    const double A = l0 * l0 * p / (D * D), B = l0 * uu / D;
    const double vertex = A > 0.0 ? B / (2.0 * A) : kInf;
    const double right = std::clamp(vertex, 2.0, 4.0);
    if (cond(right) >= eps) return 4.0;
    double lo = 2.0, hi = right;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (cond(mid) >= eps ? lo : hi) = mid;
    }
    return lo;
}

RegimeConstants regime_constants(const Objective& spec, double x0, double y0, double eps_M3) {
    RegimeConstants rc;
    rc.eps_M3 = eps_M3;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rc.M1 = rc.M2 = rc.M2_band = rc.M3 = rc.c1 = rc.c2 = nan;
    if (spec.family() == Family::Good) {
        rc.M1 = compute_M1(spec.a());
        rc.M2 = compute_M2(spec.a());
        const double uu = x0 * x0 + y0 * y0;
        rc.M2_band = 10.0 / (uu * uu);
        rc.c1 = c1_constant(spec.a());
        rc.c2 = c2_constant(spec.a());
    } else if (spec.family() == Family::Bad && spec.b() >= 3) {
        rc.M3 = compute_M3(spec.b(), x0, y0, eps_M3);
    }
    return rc;
}

Point2D point_from_invariants(double uu, double p, bool x_larger) {
    const double a = std::sqrt(uu + 2.0 * p), b = std::sqrt(uu - 2.0 * p);
    const double big = 0.5 * (a + b), small = 0.5 * (a - b);
    return x_larger ? Point2D(big, small) : Point2D(small, big);
}

VerifyOutcome verify_with_trajectory(TheoremId id, const Objective& spec, double x0, double y0, LearningRate lr,
                                     const VerifyOptions& opt) {
    require_family(id, spec);
    VerifyOutcome out;
    TheoremCheck& c = out.check;
    c.theorem = id;
    c.spec = spec;
    c.x0 = x0;
    c.y0 = y0;
    const double D = lr_denominator(id, spec, x0, y0);
    if (lr.kind == LearningRate::Kind::Multiplier) {
        c.C = lr.value;
        c.h = lr.value / D;
    } else {
        c.h = lr.value;
        c.C = lr.value * D;
    }
    const double p = x0 * y0, uu = x0 * x0 + y0 * y0, C = c.C, h = c.h;

    HypothesisSet hyp(opt.marginal_band);
    switch (group_of(id)) {
        case Group::Good: {
            const auto rc = regime_constants(spec, x0, y0, opt.eps_M3);
            c.extras["M1"] = rc.M1;
            c.extras["M2"] = rc.M2;
            c.extras["c1"] = rc.c1;
            hyp.exact(p > 1.0, fmt("x0 y0 = %.6g must exceed 1", p));
            if (id == TheoremId::Conv_Good) hyp.approx_upper(p, rc.M1, fmt("x0 y0 = %.6g vs M1 = %.6g", p, rc.M1));
            else hyp.exact(p < rc.M1, fmt("x0 y0 = %.6g vs M1 = %.6g", p, rc.M1));
            const double uu_min = 4.0 * std::pow(rc.c1, -4.0 / 3.0);
            c.extras["uu_min"] = uu_min;
            hyp.approx_lower(uu, uu_min, fmt("x0^2 + y0^2 = %.6g vs 4 c1^(-4/3) = %.6g", uu, uu_min));
            hyp.exact(C <= 4.0, fmt("C = %.6g must be <= 4", C));
            if (C >= rc.M2) hyp.add(Hypotheses::Satisfied, "C >= M2");
            else if (C >= rc.M2 - rc.M2_band || C >= rc.M2 * (1.0 - opt.marginal_band))
                hyp.add(Hypotheses::Marginal, fmt("C = %.6g just below M2 = %.6g", C, rc.M2));
            else hyp.add(Hypotheses::Violated, fmt("C = %.6g below M2 = %.6g", C, rc.M2));
            break;
        }
        case Group::B1:
            if (id == TheoremId::Balancing_b1) hyp.exact(uu > 8.0, fmt("x0^2 + y0^2 = %.6g must exceed 8", uu));
            else hyp.exact(uu >= 8.0, fmt("x0^2 + y0^2 = %.6g must be >= 8", uu));
            hyp.exact(C >= 2.0 && C <= 4.0, fmt("C = %.6g outside [2, 4]", C));
            break;
        case Group::Bad: {
            const int b = spec.b();
            const double threshold = std::pow(2.0, 1.0 / (b - 1));
            c.extras["xy_threshold"] = threshold;
            hyp.exact(p > threshold, fmt("x0 y0 = %.6g must exceed 2^(1/(b-1)) = %.6g", p, threshold));
            hyp.exact(uu >= 4.0, fmt("x0^2 + y0^2 = %.6g must be >= 4", uu));
            hyp.exact(C >= 2.0, fmt("C = %.6g must be >= 2", C));
            try {
                const double M3 = compute_M3(b, x0, y0, opt.eps_M3);
                c.extras["M3"] = M3;
                hyp.exact(C <= M3, fmt("C = %.6g must be <= M3 = %.6g", C, M3));
            } catch (const domain_error& e) {
                hyp.add(Hypotheses::Violated, e.what());
            }
            break;
        }
        case Group::Any: break;
    }
    c.hypotheses = hyp.status();
    c.notes = std::move(hyp.notes());

    RunConfig rc;
    rc.spec = spec;
    rc.x0 = x0;
    rc.y0 = y0;
    rc.learning_rate = h;
    rc.max_iters = opt.max_iters;
    rc.convergence_tol = opt.convergence_tol;
    rc.record_stride = 1;
    rc.divergence_bound = std::max(1e12, 4.0 * uu);
    out.trajectory = run(rc);
    const Trajectory& t = out.trajectory;
    c.run_status = t.status;
    c.iterations = t.iterations;
    if (t.converged()) c.limit_stability = fixed_point_stability(spec, *t.limit, h);

    const bool converged = t.converged();
    const double s_inf = converged ? t.limit_sharpness : t.last().sharpness;
    const auto& last = t.last();
    const double gap = (last.x - last.y) * (last.x - last.y);
    const double gap0 = (x0 - y0) * (x0 - y0);
    c.predicted_lo = -kInf;
    c.predicted_hi = kInf;
    bool holds = converged;

    switch (id) {
        case TheoremId::EoS_Good: {
            c.slack = rate_slack(opt, h);
            const double upper = 2.0 / h + 10.0 * opt.convergence_tol;
            c.predicted_lo = 2.0 / h - c.slack;
            c.predicted_hi = 2.0 / h;
            c.measured = s_inf;
            c.margin = std::min(s_inf - c.predicted_lo, upper - s_inf);
            const double dip = 0.25 * (6.0 - C) * s_inf + c.slack;
            c.extras["dip_bound"] = dip;
            std::optional<long> N;
            for (const auto& r : t.steps)
                if (r.sharpness <= dip) {
                    N = r.k;
                    break;
                }
            if (N) c.extras["N"] = static_cast<double>(*N);
            holds = holds && c.margin >= 0.0 && N.has_value();
            break;
        }
        case TheoremId::NoEoS_Bad:
            c.predicted_hi = 1.0 / h;
            c.measured = s_inf;
            c.margin = 1.0 / h - s_inf;
            holds = holds && c.margin >= 0.0;
            break;
        case TheoremId::Balancing_Good:
            c.predicted_hi = 2.0 / C * gap0 + 2.0 * (p - 1.0);
            c.measured = gap;
            c.margin = c.predicted_hi - gap;
            holds = holds && c.margin >= 0.0;
            break;
        case TheoremId::Balancing_b1:
            c.predicted_hi = 2.0 / C * gap0 + 4.0 / C * (p + 2.0) - 2.0;
            c.measured = gap;
            c.margin = c.predicted_hi - gap;
            holds = holds && c.margin >= 0.0;
            break;
        case TheoremId::NoBalancing_Bad: {
            const double b = spec.b();
            const double informal = gap0 + std::min(2.0 * (p - 1.0) - 2.0 * C / b * p, (2.0 - 8.0 * b / (4.0 * b - C)) * (p - 1.0));
            const double r0 = t.first().r;
            const double formal = r0 > 0.0 ? gap0 - 2.0 * C / (4.0 * b - C) * (p - 1.0)
                                           : gap0 + 2.0 * (p - 1.0) - 2.0 * C / b * p;
            c.extras["bound_informal"] = informal;
            c.extras["bound_formal"] = formal;
            c.extras["r0"] = r0;
            c.predicted_lo = std::max(informal, formal);
            c.measured = gap;
            c.margin = gap - c.predicted_lo;
            holds = holds && c.margin >= 0.0;
            break;
        }
        case TheoremId::Conv_Good:
        case TheoremId::Conv_b1:
            c.measured = static_cast<double>(t.iterations);
            c.margin = converged ? 1.0 : -1.0;
            break;
        case TheoremId::Conv_Bad: {
            if (t.steps.size() < 2) {
                holds = false;
                break;
            }
            const auto& s0 = t.steps[0];
            const auto& s1 = t.steps[1];
            const double S = s0.r > 0.0 ? 1.0 - h * (2.0 - h * s0.ell) : 1.0 - h * (2.0 - h) * s1.q * (s1.x * s1.y);
            c.extras["S"] = S;
            c.extras["r0"] = s0.r;
            c.predicted_hi = S;
            double worst_ratio = 0.0;
            long violations = 0, checked = 0;
            const double d1 = std::abs(s1.delta);
            double cumulative_margin = kInf;
            for (std::size_t k = 1; k + 1 < t.steps.size(); ++k) {
                const double dk = std::abs(t.steps[k].delta), dn = std::abs(t.steps[k + 1].delta);
                if (dn <= opt.contraction_floor || dk <= opt.contraction_floor) break;
                const double ratio = dn / dk;
                ++checked;
                worst_ratio = std::max(worst_ratio, ratio);
                if (ratio > S) ++violations;
                const double bound = d1 * std::pow(S, static_cast<double>(k));
                cumulative_margin = std::min(cumulative_margin, bound - dn);
                if (dn > bound) ++violations;
            }
            c.extras["checked_steps"] = static_cast<double>(checked);
            c.extras["violations"] = static_cast<double>(violations);
            c.extras["cumulative_margin"] = cumulative_margin;
            c.measured = worst_ratio;
            c.margin = S - worst_ratio;
            holds = holds && violations == 0 && S > 0.0 && S < 1.0;
            break;
        }
        case TheoremId::Stability_Necessity:
            c.predicted_hi = 2.0 / h;
            c.measured = s_inf;
            c.margin = 2.0 / h + 10.0 * opt.convergence_tol - s_inf;
            holds = c.limit_stability && *c.limit_stability != Stability::Unstable;
            break;
    }

    if (t.status == RunStatus::DegenerateHit) c.verdict = Verdict::Inconclusive;
    else if (id == TheoremId::Stability_Necessity && !converged) c.verdict = Verdict::Inconclusive;
    else if (c.hypotheses == Hypotheses::Violated) c.verdict = Verdict::Skipped;
    else c.verdict = holds ? Verdict::Pass : Verdict::Fail;
    if (c.verdict == Verdict::Skipped) c.notes.push_back("verdict skipped; conclusion evaluated for information only");
    return out;
}

TheoremCheck verify(TheoremId id, const Objective& spec, double x0, double y0, LearningRate lr, const VerifyOptions& opt) {
    return verify_with_trajectory(id, spec, x0, y0, lr, opt).check;
}

std::vector<TheoremCheck> sweep(TheoremId id, std::span<const GridCell> grid, const VerifyOptions& opt) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<TheoremCheck> out(grid.size());
    for_each_index(grid.size(), Exec::Parallel, [&](std::size_t i) {
        const auto& g = grid[i];
        out[i] = verify(id, g.spec, g.x0, g.y0, g.lr, opt);
    });
    return out;
}

}  // namespace eoslab
