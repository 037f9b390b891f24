#include "eoslab/gd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eoslab {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kConfirmSteps = 10;
constexpr double kRevisitTol = 1e-14;
}  // namespace

void RunConfig::validate() const {
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw std::invalid_argument("x0, y0 must be finite");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning rate must be > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be > 0");
    const double m = std::max(std::abs(x0), std::abs(y0));
    if (!(divergence_bound > m * m)) throw std::invalid_argument("divergence_bound must exceed max(|x0|,|y0|)^2");
    if (record_stride < 0) throw std::invalid_argument("record_stride must be >= 1 (or 0 for automatic)");
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return "Converged";
        case RunStatus::Diverged: return "Diverged";
        case RunStatus::MaxIters: return "MaxIters";
        case RunStatus::DegenerateHit: return "DegenerateHit";
    }
    return "?";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "Stable";
        case Stability::Unstable: return "Unstable";
        case Stability::Marginal: return "Marginal";
    }
    return "?";
}

std::optional<Point2D> gd_step(const Objective& spec, const Point2D& p, double h) {
    const double l = spec.dF(p.product());
    const double nx = p.x() - h * l * p.y();
    const double ny = p.y() - h * l * p.x();
    if (!std::isfinite(nx) || !std::isfinite(ny)) return std::nullopt;
    return Point2D(nx, ny);
}

StepRecord make_record(const Objective& spec, long k, double x, double y, double h) {
    StepRecord r{};
    r.k = k;
    r.x = x;
    r.y = y;
    const double s = x * y;
    r.delta = s - 1.0;
    r.ell = spec.dF(s);
    r.q = spec.q(r.delta);
    r.uu = x * x + y * y;
    r.r = 1.0 - h * r.q * (r.uu - h * r.ell * s);
    r.loss = spec.F(s) - spec.min_value();
    r.sharpness = sharpness(spec, x, y);
    return r;
}

Trajectory run(const RunConfig& c) {
    c.validate();
    Trajectory t;
    t.config = c;
    const Objective& spec = c.spec;
    const double h = c.learning_rate;
    const long stride = c.effective_stride();
    const double s_star = spec.argmin_product();

    double x = c.x0, y = c.y0;
    double px = std::numeric_limits<double>::quiet_NaN(), py = px;
    int confirmed = 0;

    auto push = [&](const StepRecord& rec) {
        if (t.steps.empty() || t.steps.back().k != rec.k) t.steps.push_back(rec);
    };
    auto finish = [&](RunStatus st, const StepRecord& rec, std::string note = {}) {
        push(rec);
        t.status = st;
        t.iterations = rec.k;
        t.note = std::move(note);
        if (st == RunStatus::Converged) {
            t.limit = Point2D(rec.x, rec.y);
            t.limit_sharpness = rec.sharpness;
        }
    };

    for (long k = 0;; ++k) {
        const StepRecord rec = make_record(spec, k, x, y, h);
        if (!std::isfinite(rec.uu) || rec.uu > c.divergence_bound || !std::isfinite(rec.ell)) {
            finish(RunStatus::Diverged, rec, "iterate left the divergence bound");
            break;
        }
        if (k % stride == 0) push(rec);

        const double dist = std::abs(x * y - s_star);
        const double gnorm = std::abs(rec.ell) * std::sqrt(rec.uu);
        if (dist < c.convergence_tol && gnorm < c.convergence_tol) {
            if (++confirmed >= kConfirmSteps) {
                finish(RunStatus::Converged, rec);
                break;
            }
        } else {
            confirmed = 0;
        }
        if (k >= c.max_iters) {
            finish(RunStatus::MaxIters, rec);
            break;
        }

        const double nx = x - h * rec.ell * y;
        const double ny = y - h * rec.ell * x;
        if (!std::isfinite(nx) || !std::isfinite(ny)) {
            finish(RunStatus::Diverged, rec, "non-finite update");
            break;
        }
        if (nx == x && ny == y) {
            if (dist <= c.stall_tol) {
                t.stalled = true;
                finish(RunStatus::Converged, rec, "update below floating-point resolution");
            } else {
                finish(RunStatus::DegenerateHit, rec, "fixed point of the update away from the minimum");
            }
            break;
        }
        if (dist > c.stall_tol && k >= 1 && std::abs(nx - px) <= kRevisitTol * std::max(1.0, std::abs(px)) &&
            std::abs(ny - py) <= kRevisitTol * std::max(1.0, std::abs(py))) {
            finish(RunStatus::DegenerateHit, rec, "period-2 revisit");
            break;
        }
        if (dist > c.stall_tol && nx * ny == s_star) {
            push(rec);
            finish(RunStatus::DegenerateHit, make_record(spec, k + 1, nx, ny, h), "landed exactly on the minimum set");
            break;
        }
        px = x;
        py = y;
        x = nx;
        y = ny;
    }
    return t;
}

IdentityResiduals check_identities(const Trajectory& traj) {
    IdentityResiduals out;
    const double h = traj.h();
    const Objective& spec = traj.config.spec;
    auto upd = [](double& m, double v) {
        if (!(v <= m)) m = v;
    };
    for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i) {
        const StepRecord& a = traj.steps[i];
        const StepRecord& b = traj.steps[i + 1];
        if (b.k != a.k + 1) continue;
        ++out.checked;
        const double s = a.x * a.y;
        const double hl = h * a.ell;
        const double floor = 64.0 * kEps * (a.uu + b.uu + 1.0) * (1.0 + std::abs(hl));

        const double rhs_p = a.r * a.delta;
        upd(out.product, std::abs(b.delta - rhs_p) / (1e-10 * std::abs(b.delta) + floor));

        const double rhs_n = (1.0 + hl * hl) * a.uu - 4.0 * hl * s;
        upd(out.norm, std::abs(b.uu - rhs_n) / (1e-10 * std::abs(b.uu) + floor));

        const double lhs_d = b.x * b.x - b.y * b.y;
        const double rhs_d = (a.x * a.x - a.y * a.y) * (1.0 - hl * hl);
        upd(out.difference, std::abs(lhs_d - rhs_d) / (1e-10 * std::abs(lhs_d) + floor * (1.0 + hl * hl)));

        if (spec.family() == Family::Bad) {
            const int bb = spec.b();
            const double r_alt = 1.0 - h / bb * std::pow(s, bb - 1) * p_poly(bb, s) * (a.uu - hl * s);
            upd(out.appendix_form, std::abs(r_alt - a.r) / (1e-10 * std::abs(a.r) + floor));
        }
    }
    return out;
}

std::optional<long> phase_boundary(const Trajectory& traj) {
    if (!traj.converged() || traj.steps.empty()) return std::nullopt;
    const double limit = 2.0 / traj.h();
    long idx = static_cast<long>(traj.steps.size());
    for (long i = idx - 1; i >= 0; --i) {
        const StepRecord& r = traj.steps[i];
        if (r.uu <= limit && std::abs(r.r) < 1.0) {
            idx = i;
        } else {
            break;
        }
    }
    if (idx == static_cast<long>(traj.steps.size())) return std::nullopt;
    return traj.steps[idx].k;
}

Stability fixed_point_stability(const Objective& spec, const Point2D& p, double h) {
    if (!(std::abs(p.product() - spec.argmin_product()) < 1e-8))
        throw domain_error("fixed_point_stability: point is not a minimizer (|xy - 1| >= 1e-8)");
    const HessianSummary hs = eval_hessian(spec, p);
    const double transverse = std::abs(hs.eig_max) >= std::abs(hs.eig_min) ? hs.eig_max : hs.eig_min;
    const double mu = std::abs(1.0 - h * transverse);
    if (mu < 1.0 - 1e-12) return Stability::Stable;
    if (mu > 1.0 + 1e-12) return Stability::Unstable;
    return Stability::Marginal;
}

}  // namespace eoslab
