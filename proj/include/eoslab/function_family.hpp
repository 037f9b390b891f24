#pragma once

#include <stdexcept>
#include <string>

namespace eoslab {

enum class Family { Good, Bad, Perturbed };

// f(x, y) = F(xy) with F one of
//   good:      C_a * (softplus(s-1) + softplus(1-s))^a,  0 < a <= 1
//   bad:       (1 - s^b)^2 / (2 b^2),                   b odd
//   perturbed: three Gaussian bumps on top of good(a = 1)
// Every member has F''(minimizer) = 1, so the sharpness at a minimizer is x^2 + y^2.
class Objective {
public:
    static Objective good(double a);
    static Objective bad(int b);
    static Objective perturbed();

    Family family() const { return family_; }
    double a() const { return a_; }
    int b() const { return b_; }
    // C_a for good/perturbed, C_b = 1/(2b^2) for bad.
    double normalization() const { return norm_; }
    double dor() const;
    std::string name() const;

    double F(double s) const;
    double dF(double s) const;
    double d2F(double s) const;

    // Location and value of the global minimum of F. Equal to (1, F(1)) except for
    // the perturbed member, whose bumps shift the minimizer slightly.
    double argmin_product() const { return s_star_; }
    double min_value() const { return f_min_; }

    // Same quantities parametrized by delta = s - 1; avoids the rounding of (1 + delta) - 1.
    double ell(double delta) const;
    double q(double delta) const;
    double L_cap(double delta) const;

    bool operator==(const Objective& o) const {
        return family_ == o.family_ && a_ == o.a_ && b_ == o.b_;
    }

private:
    Objective(Family f, double a, int b);
    double good_dF(double delta) const;
    double good_d2F(double delta) const;

    Family family_;
    double a_ = 1.0;
    int b_ = 0;
    double norm_ = 1.0;
    double s_star_ = 1.0;
    double f_min_ = 0.0;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

class Point2D {
public:
    Point2D(double x, double y);
    double x() const { return x_; }
    double y() const { return y_; }
    double product() const { return x_ * y_; }
    double norm_sq() const { return x_ * x_ + y_ * y_; }
    bool operator==(const Point2D&) const = default;

private:
    double x_;
    double y_;
};

struct Gradient {
    double dx;
    double dy;
};

struct HessianSummary {
    double hxx, hxy, hyy;
    double trace;
    double determinant;
    double eig_max;            // algebraically larger root
    double eig_min;            // algebraically smaller root
    double eig_max_magnitude;  // sharpness
};

double eval_F(const Objective& f, double s);
double eval_f(const Objective& f, const Point2D& p);
Gradient eval_grad(const Objective& f, const Point2D& p);
HessianSummary eval_hessian(const Objective& f, const Point2D& p);
double sharpness(const Objective& f, double x, double y);

double softplus(double z);
// sum_{i<b} s^i
double p_poly(int b, double s);

struct RegularityConstants {
    double c1;
    double c2;
    double dor;
};
// c1, c2 exist only for the good family; asking for them on bad throws domain_error.
RegularityConstants regularity_constants(const Objective& f);
double c1_constant(double a);
double c2_constant(double a);

enum class LossKind { L2, Huber };

struct Activation {
    enum class Kind { Tanh, ReLU, LeakyReLU, ReLUk };
    Kind kind = Kind::Tanh;
    int power = 1;  // only for ReLUk

    static Activation tanh() { return {Kind::Tanh, 1}; }
    static Activation relu() { return {Kind::ReLU, 1}; }
    static Activation leaky_relu() { return {Kind::LeakyReLU, 1}; }
    static Activation relu_k(int k) { return {Kind::ReLUk, k}; }
    bool operator==(const Activation&) const = default;
};

double dor_of(LossKind loss);
double dor_of(const Activation& act);
// Product rule dor(loss) * dor(activation); a batch-normalized activation counts as dor 0.
double dor_compose(LossKind loss, const Activation& act, bool batch_norm = false);

// Least-squares slope of log|F(s)| against log s on a geometric grid.
double growth_slope(const Objective& f, double s_lo = 1e3, double s_hi = 1e6, int points = 31);

}  // namespace eoslab
