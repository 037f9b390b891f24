#include "eoslab/propositions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace eoslab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFdStep = 1e-6;

// Accumulates a family of inequality samples "slack >= 0".
class Tally {
public:
    explicit Tally(std::string name) { r_.name = std::move(name); r_.worst = std::numeric_limits<double>::infinity(); }

    void slack(double s) {
        ++r_.samples;
        if (!(s >= 0.0)) ++r_.failures;
        if (!(s >= r_.worst)) r_.worst = s;
    }
    // Error samples: pass when err <= 1, worst tracks the largest normalized error.
    void error(double err) {
        ++r_.samples;
        if (!(err <= 1.0)) ++r_.failures;
        if (r_.samples == 1 || !(err <= r_.worst)) r_.worst = err;
    }
    PropertyResult done(std::string detail) {
        r_.passed = r_.failures == 0;
        r_.detail = std::move(detail);
        return r_;
    }

private:
    PropertyResult r_;
};

double sample_coord(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.05, 20.0);
    std::bernoulli_distribution neg(0.5);
    const double m = mag(rng);
    return neg(rng) ? -m : m;
}

std::vector<double> grid(double lo, double hi, long n) {
    std::vector<double> g(n);
    for (long i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

double fd_floor(double fval) { return 100.0 * kEps * std::max(1.0, std::abs(fval)) / kFdStep; }

}  // namespace

double q_inverse(const Objective& f, double target, double lo, double hi) {
    if (!(f.q(lo) > target && f.q(hi) <= target)) throw std::runtime_error("q_inverse: target not bracketed");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (f.q(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

PropertyResult check_gradient_fd(const Objective& f, long points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Tally t("gradient_fd");
    for (long i = 0; i < points; ++i) {
        const double x = sample_coord(rng), y = sample_coord(rng);
        const Gradient g = eval_grad(f, Point2D(x, y));
        const double fx = (f.F((x + kFdStep) * y) - f.F((x - kFdStep) * y)) / (2 * kFdStep);
        const double fy = (f.F(x * (y + kFdStep)) - f.F(x * (y - kFdStep))) / (2 * kFdStep);
        const double err = std::hypot(fx - g.dx, fy - g.dy);
        const double scale = std::hypot(g.dx, g.dy);
        t.error(err / (1e-5 * scale + fd_floor(f.F(x * y))));
    }
    return t.done("central differences, step 1e-6, relative error <= 1e-5 above the FD round-off floor");
}

PropertyResult check_hessian_fd(const Objective& f, long points, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    Tally t("hessian_fd");
    for (long i = 0; i < points; ++i) {
        const double x = sample_coord(rng), y = sample_coord(rng);
        const HessianSummary h = eval_hessian(f, Point2D(x, y));
        const Gradient gxp = eval_grad(f, Point2D(x + kFdStep, y));
        const Gradient gxm = eval_grad(f, Point2D(x - kFdStep, y));
        const Gradient gyp = eval_grad(f, Point2D(x, y + kFdStep));
        const Gradient gym = eval_grad(f, Point2D(x, y - kFdStep));
        const double hxx = (gxp.dx - gxm.dx) / (2 * kFdStep);
        const double hxy = 0.5 * ((gxp.dy - gxm.dy) + (gyp.dx - gym.dx)) / (2 * kFdStep);
        const double hyy = (gyp.dy - gym.dy) / (2 * kFdStep);
        const double err = std::sqrt((hxx - h.hxx) * (hxx - h.hxx) + 2 * (hxy - h.hxy) * (hxy - h.hxy) +
                                     (hyy - h.hyy) * (hyy - h.hyy));
        const double scale = std::sqrt(h.hxx * h.hxx + 2 * h.hxy * h.hxy + h.hyy * h.hyy);
        const Gradient g = eval_grad(f, Point2D(x, y));
        t.error(err / (1e-4 * scale + fd_floor(std::hypot(g.dx, g.dy))));
        // closed-form eigenvalues are roots of the characteristic polynomial
        const double res = h.eig_max * h.eig_max - h.trace * h.eig_max + h.determinant;
        const double mag = std::max(1.0, h.eig_max_magnitude);
        t.error(std::abs(res) / (1e-10 * mag * mag));
    }
    return t.done("FD Hessian of the analytic gradient, relative error <= 1e-4");
}

PropertyResult check_normalization(const Objective& f, long points) {
    Tally t("normalization_sharpness_at_minimizer");
    const auto xs = grid(0.05, 20.0, points);
    for (double x : xs) {
        const double y = 1.0 / x;
        const double want = x * x + y * y;
        const double got = eval_hessian(f, Point2D(x, y)).eig_max_magnitude;
        t.error(std::abs(got - want) / (1e-10 * want));
    }
    return t.done("sharpness at (x, 1/x) equals x^2 + 1/x^2 to 1e-10");
}

PropertyResult check_growth_slope(const Objective& f) {
    Tally t("growth_slope_matches_dor");
    const double slope = growth_slope(f);
    t.slack(0.05 - std::abs(slope - f.dor()));
    char buf[96];
    std::snprintf(buf, sizeof buf, "log-log slope on [1e3,1e6] = %.6f, dor = %g", slope, f.dor());
    return t.done(buf);
}

std::vector<PropertyResult> property_suite(const Objective& f, const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    out.push_back(check_gradient_fd(f, opt.fd_points, opt.seed));
    out.push_back(check_hessian_fd(f, opt.fd_points, opt.seed));
    if (f.family() != Family::Perturbed) out.push_back(check_normalization(f, opt.grid_points));
    out.push_back(check_growth_slope(f));
    if (f.family() != Family::Good) return out;

    const long n = opt.grid_points;
    const double tol = 8 * kEps;
    const auto rc = regularity_constants(f);

    {
        Tally odd("ell_odd"), pos("ell_positive"), bound("ell_bounded_by_3");
        for (double d : grid(1e-4, 100.0, n)) {
            const double l = f.ell(d);
            odd.slack(tol * std::abs(l) - std::abs(l + f.ell(-d)));
            pos.slack(l);
            bound.slack(3.0 - std::abs(l));
        }
        out.push_back(odd.done("ell(-d) = -ell(d), d in (0,100]"));
        out.push_back(pos.done("ell(d) > 0 for d in (0,100]"));
        out.push_back(bound.done("|ell(d)| <= 3 for d in (0,100]"));
    }
    {
        Tally even("q_even"), mono("q_nonincreasing"), lower("q_lower_bound_c1"), upper("q_at_most_1"),
            upper2("q_upper_bound_c2");
        double prev = f.q(0.0);
        for (double d : grid(0.0, 10.0, n)) {
            const double v = f.q(d);
            mono.slack(prev + tol - v);
            prev = v;
        }
        for (double d : grid(-100.0, 100.0, n)) {
            const double v = f.q(d);
            even.slack(tol - std::abs(v - f.q(-d)));
            const double lb = 1.0 - rc.c1 * d * d;
            lower.slack(v - lb + tol * std::max(1.0, std::abs(lb)));
            upper.slack(1.0 + tol - v);
        }
        for (double d : grid(-1.0, 1.0, n)) upper2.slack(1.0 - rc.c2 * d * d + tol - f.q(d));
        out.push_back(even.done("q(-d) = q(d), d in [-100,100]"));
        out.push_back(mono.done("q non-increasing on [0,10]"));
        out.push_back(lower.done("q(d) >= 1 - c1 d^2, d in [-100,100]"));
        out.push_back(upper.done("q(d) <= 1, d in [-100,100]"));
        out.push_back(upper2.done("q(d) <= 1 - c2 d^2 for |d| <= 1"));
    }
    {
        Tally inv("q_inverse_bound");
        for (double C : grid(2.0, 4.0, 101)) inv.slack((1.0 + f.a()) * C - q_inverse(f, 1.0 / C));
        out.push_back(inv.done("q^{-1}(1/C) <= (1+a) C for C in [2,4]"));
    }
    {
        Tally mono("L_nondecreasing"), sym("L_symmetric_sum_nonnegative"), lin("L_linear_lower_bound");
        double prev = f.L_cap(0.0);
        for (double d : grid(0.0, 50.0, n)) {
            const double v = f.L_cap(d);
            mono.slack(v - prev + tol * std::max(1.0, std::abs(v)));
            prev = v;
        }
        for (double d : grid(-50.0, 50.0, n)) {
            const double a = f.L_cap(d), b = f.L_cap(-d);
            sym.slack(a + b + tol * (std::abs(a) + std::abs(b)));
        }
        const long side = std::max(2L, static_cast<long>(std::sqrt(static_cast<double>(n))));
        for (long i = 1; i <= side; ++i) {
            const double d = 50.0 * static_cast<double>(i) / static_cast<double>(side);
            for (long j = 1; j < side + 1; ++j) {
                const double r = -static_cast<double>(j) / static_cast<double>(side + 1);
                lin.slack(f.L_cap(d) + f.L_cap(r * d) - 0.8 * (1.0 + r) * d);
            }
        }
        out.push_back(mono.done("L non-decreasing on [0,50]"));
        out.push_back(sym.done("L(d) + L(-d) >= 0, d in [-50,50]"));
        out.push_back(lin.done("L(d) + L(r d) >= 0.8 (1+r) d, d in (0,50], r in (-1,0)"));
    }
    return out;
}

}  // namespace eoslab
