#include "eoslab/function_family.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace eoslab {

namespace {

constexpr double kLog2 = std::numbers::ln2;
constexpr double kTaylorBand = 1e-6;

// softplus(d) + softplus(-d) = |d| + 2 log(1 + e^{-|d|})
double sym_softplus(double d) {
    const double ad = std::abs(d);
    return ad + 2.0 * std::log1p(std::exp(-ad));
}

double sech_sq(double z) {
    const double c = std::cosh(z);
    return 1.0 / (c * c);
}

struct Bump {
    double weight, width, centre;
};
constexpr Bump kBumps[] = {{1.0, 10.0, 2.0}, {2.0, 100.0, 1.5}, {5.0, 100.0, 0.5}};

double bumps(double s) {
    double v = 0.0;
    for (const auto& b : kBumps) v += b.weight * std::exp(-b.width * (s - b.centre) * (s - b.centre));
    return v;
}
double bumps_d1(double s) {
    double v = 0.0;
    for (const auto& b : kBumps) {
        const double u = s - b.centre;
        v += b.weight * std::exp(-b.width * u * u) * (-2.0 * b.width * u);
    }
    return v;
}
double bumps_d2(double s) {
    double v = 0.0;
    for (const auto& b : kBumps) {
        const double u = s - b.centre;
        v += b.weight * std::exp(-b.width * u * u) * (4.0 * b.width * b.width * u * u - 2.0 * b.width);
    }
    return v;
}

double ipow(double s, int n) {
    double r = 1.0;
    double base = s;
    while (n > 0) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

}  // namespace

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double p_poly(int b, double s) {
    double acc = 0.0;
    for (int i = b - 1; i >= 0; --i) acc = acc * s + 1.0;
    return acc;
}

Objective::Objective(Family f, double a, int b) : family_(f), a_(a), b_(b) {
    if (f == Family::Bad) {
        norm_ = 1.0 / (2.0 * b * b);
        return;
    }
    norm_ = 1.0 / (a * std::pow(2.0, a - 2.0) * std::pow(kLog2, a - 1.0));
    s_star_ = 1.0;
    if (f == Family::Perturbed) {
        double s = 1.0;
        for (int i = 0; i < 100; ++i) {
            const double step = dF(s) / d2F(s);
            s -= step;
            if (std::abs(step) < 1e-17) break;
        }
        s_star_ = s;
    }
    f_min_ = F(s_star_);
}

Objective Objective::good(double a) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("good-regularity exponent a must satisfy 0 < a <= 1");
    return Objective(Family::Good, a, 0);
}

Objective Objective::bad(int b) {
    if (b < 1 || b % 2 == 0) throw std::invalid_argument("bad-regularity exponent b must be odd and >= 1");
    return Objective(Family::Bad, 1.0, b);
}

Objective Objective::perturbed() { return Objective(Family::Perturbed, 1.0, 0); }

double Objective::dor() const { return family_ == Family::Bad ? 2.0 * b_ : a_; }

std::string Objective::name() const {
    char buf[64];
    switch (family_) {
        case Family::Good: std::snprintf(buf, sizeof buf, "good(a=%g)", a_); break;
        case Family::Bad: std::snprintf(buf, sizeof buf, "bad(b=%d)", b_); break;
        case Family::Perturbed: std::snprintf(buf, sizeof buf, "perturbed"); break;
    }
    return buf;
}

double Objective::good_dF(double d) const {
    return norm_ * a_ * std::pow(sym_softplus(d), a_ - 1.0) * std::tanh(0.5 * d);
}

double Objective::good_d2F(double d) const {
    const double g = sym_softplus(d);
    const double t = std::tanh(0.5 * d);
    return norm_ * a_ * ((a_ - 1.0) * std::pow(g, a_ - 2.0) * t * t + std::pow(g, a_ - 1.0) * 0.5 * sech_sq(0.5 * d));
}

double Objective::F(double s) const {
    switch (family_) {
        case Family::Bad: {
            const double u = 1.0 - ipow(s, b_);
            return norm_ * u * u;
        }
        case Family::Good: return norm_ * std::pow(sym_softplus(s - 1.0), a_);
        case Family::Perturbed: return bumps(s) + norm_ * std::pow(sym_softplus(s - 1.0), a_);
    }
    return 0.0;
}

double Objective::dF(double s) const {
    switch (family_) {
        case Family::Bad: return ipow(s, b_ - 1) * (ipow(s, b_) - 1.0) / b_;
        case Family::Good: return good_dF(s - 1.0);
        case Family::Perturbed: return bumps_d1(s) + good_dF(s - 1.0);
    }
    return 0.0;
}

double Objective::d2F(double s) const {
    switch (family_) {
        case Family::Bad: {
            if (b_ == 1) return 1.0;
            const double sb = ipow(s, b_);
            return ((b_ - 1) * ipow(s, b_ - 2) * (sb - 1.0) + b_ * ipow(s, 2 * b_ - 2)) / b_;
        }
        case Family::Good: return good_d2F(s - 1.0);
        case Family::Perturbed: return bumps_d2(s) + good_d2F(s - 1.0);
    }
    return 0.0;
}

double Objective::ell(double delta) const {
    switch (family_) {
        case Family::Good: return good_dF(delta);
        case Family::Perturbed: return bumps_d1(1.0 + delta) + good_dF(delta);
        case Family::Bad: return dF(1.0 + delta);
    }
    return 0.0;
}

double Objective::q(double delta) const {
    switch (family_) {
        case Family::Good:
            if (std::abs(delta) < kTaylorBand) return 1.0 - c1_constant(a_) * delta * delta;
            return good_dF(delta) / delta;
        case Family::Bad: {
            const double s = 1.0 + delta;
            return ipow(s, b_ - 1) * p_poly(b_, s) / b_;
        }
        case Family::Perturbed:
            // F'(1) != 0 here, so q has a pole at 0; the exact zero reports the local slope instead.
            if (delta == 0.0) return d2F(1.0);
            return ell(delta) / delta;
    }
    return 1.0;
}

double Objective::L_cap(double delta) const {
    const double l = ell(delta);
    return l * (delta + 1.0 - l);
}

Point2D::Point2D(double x, double y) : x_(x), y_(y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("Point2D requires finite coordinates");
}

double eval_F(const Objective& f, double s) { return f.F(s); }

double eval_f(const Objective& f, const Point2D& p) { return f.F(p.product()); }

Gradient eval_grad(const Objective& f, const Point2D& p) {
    const double d = f.dF(p.product());
    return {d * p.y(), d * p.x()};
}

HessianSummary eval_hessian(const Objective& f, const Point2D& p) {
    const double x = p.x(), y = p.y(), s = x * y;
    const double d1 = f.dF(s);
    const double d2 = f.d2F(s);
    HessianSummary h{};
    h.hxx = d2 * y * y;
    h.hyy = d2 * x * x;
    h.hxy = d2 * s + d1;
    h.trace = d2 * (x * x + y * y);
    h.determinant = -2.0 * d2 * d1 * s - d1 * d1;
    const double half = 0.5 * h.trace;
    const double disc = std::hypot(0.5 * (h.hxx - h.hyy), h.hxy);
    const double big = half >= 0.0 ? half + disc : half - disc;
    const double small = big != 0.0 ? h.determinant / big : 0.0;
    h.eig_max = std::max(big, small);
    h.eig_min = std::min(big, small);
    h.eig_max_magnitude = std::max(std::abs(big), std::abs(small));
    return h;
}

double sharpness(const Objective& f, double x, double y) {
    const double s = x * y;
    const double d1 = f.dF(s);
    const double d2 = f.d2F(s);
    const double hxx = d2 * y * y, hyy = d2 * x * x, hxy = d2 * s + d1;
    const double half = 0.5 * (hxx + hyy);
    const double disc = std::hypot(0.5 * (hxx - hyy), hxy);
    return std::abs(half) + disc;
}

double c1_constant(double a) { return (3.0 - 3.0 * a + 2.0 * kLog2) / (24.0 * kLog2); }
double c2_constant(double a) { return (3.0 - 3.0 * a + 2.0 * kLog2) / (30.0 * kLog2); }

RegularityConstants regularity_constants(const Objective& f) {
    if (f.family() == Family::Bad) throw domain_error("c1/c2 are defined only for the good-regularity family");
    return {c1_constant(f.a()), c2_constant(f.a()), f.dor()};
}

double dor_of(LossKind loss) { return loss == LossKind::L2 ? 2.0 : 1.0; }

double dor_of(const Activation& act) {
    switch (act.kind) {
        case Activation::Kind::Tanh: return 0.0;
        case Activation::Kind::ReLU:
        case Activation::Kind::LeakyReLU: return 1.0;
        case Activation::Kind::ReLUk: return act.power;
    }
    return 0.0;
}

double dor_compose(LossKind loss, const Activation& act, bool batch_norm) {
    return dor_of(loss) * (batch_norm ? 0.0 : dor_of(act));
}

double growth_slope(const Objective& f, double s_lo, double s_hi, int points) {
    std::vector<double> lx, ly;
    const double l0 = std::log(s_lo), l1 = std::log(s_hi);
    for (int i = 0; i < points; ++i) {
        const double ls = l0 + (l1 - l0) * i / (points - 1);
        lx.push_back(ls);
        ly.push_back(std::log(std::abs(f.F(std::exp(ls)))));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < points; ++i) mx += lx[i], my += ly[i];
    mx /= points;
    my /= points;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < points; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace eoslab
