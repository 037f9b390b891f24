#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eoslab/function_family.hpp"

namespace eoslab {

struct RunConfig {
    Objective spec = Objective::good(1.0);
    double x0 = 1.0;
    double y0 = 1.0;
    double learning_rate = 0.1;
    long max_iters = 1'000'000;
    double convergence_tol = 1e-12;
    double divergence_bound = 1e12;
    // 0 picks 1 for runs up to 1e6 iterations and 10 beyond.
    long record_stride = 0;
    // A bitwise fixed point of the update closer than this to the minimum counts as converged:
    // the step h*ell*y has dropped below the spacing of doubles near x.
    double stall_tol = 1e-6;

    long effective_stride() const { return record_stride > 0 ? record_stride : (max_iters <= 1'000'000 ? 1 : 10); }
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

enum class RunStatus { Converged, Diverged, MaxIters, DegenerateHit };
std::string to_string(RunStatus s);

struct StepRecord {
    long k;
    double x, y;
    double loss;   // f - min f
    double delta;  // xy - 1
    double ell;    // F'(xy)
    double q;
    double r;      // delta_{k+1} = r * delta_k
    double uu;     // x^2 + y^2
    double sharpness;
};

struct Trajectory {
    RunConfig config;
    std::vector<StepRecord> steps;
    RunStatus status = RunStatus::MaxIters;
    long iterations = 0;
    bool stalled = false;
    std::string note;
    std::optional<Point2D> limit;
    double limit_sharpness = 0.0;

    bool converged() const { return status == RunStatus::Converged; }
    double h() const { return config.learning_rate; }
    const StepRecord& first() const { return steps.front(); }
    const StepRecord& last() const { return steps.back(); }
};

// One GD step on f(x,y) = F(xy); nullopt when the result is not finite.
std::optional<Point2D> gd_step(const Objective& spec, const Point2D& p, double h);

StepRecord make_record(const Objective& spec, long k, double x, double y, double h);

Trajectory run(const RunConfig& config);

// Largest residual of the exact per-step identities, each normalized by its tolerance
// (1e-10 relative plus a round-off floor); <= 1 means all identities hold.
struct IdentityResiduals {
    double product = 0.0;      // delta_{k+1} = r_k delta_k
    double norm = 0.0;         // uu_{k+1} = (1 + h^2 ell^2) uu - 4 h ell xy
    double difference = 0.0;   // x^2 - y^2 scales by (1 - h^2 ell^2)
    double appendix_form = 0.0;  // bad family: r_k via (1/b) s^{b-1} p(s)
    long checked = 0;
};
IdentityResiduals check_identities(const Trajectory& traj);

// First k from which uu_k <= 2/h and |r_k| < 1 hold for every later record.
std::optional<long> phase_boundary(const Trajectory& traj);

enum class Stability { Stable, Unstable, Marginal };
std::string to_string(Stability s);

// Linear stability of the GD map at a minimizer. The direction along the valley of
// minima has Hessian eigenvalue 0 (map eigenvalue exactly 1) and is neutral by
// construction, so only the transverse eigenvalue 1 - h*S decides.
Stability fixed_point_stability(const Objective& spec, const Point2D& minimizer, double h);

}  // namespace eoslab
