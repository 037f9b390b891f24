#pragma once

#include <optional>
#include <string>

#include "eoslab/gd_engine.hpp"

namespace eoslab {

// Thresholds of the phenomenon detectors. "Progressive" and "de-sharpening" have no
// canonical quantitative definition, so these are conventions and stay tunable.
struct DetectorConfig {
    double catapult_rise = 1e-3;        // peak must exceed loss0 * (1 + this)
    double balancing_shrink = 1e-6;     // final gap < initial gap * (1 - this)
    double desharpen_ratio = 0.75;      // min S over first quarter <= ratio * S0
    double desharpen_window = 0.25;     // fraction of iterations searched for the dip
    int smoothing_window = 21;          // running-median width for progressive sharpening
    double progressive_rise = 0.20;     // rise >= this * (S_inf - S_min)
    double progressive_fraction = 0.9;  // share of non-falling smoothed increments in the trend
    double progressive_reach = 0.95;    // trend window ends when smoothed S reaches this share of the rise
    double progressive_min_gain = 1e-3; // S_inf - S_min must exceed this * S_inf
    double limiting_rel = 0.05;         // S_inf >= (1 - this) * 2/h
    double limiting_abs_factor = 10.0;  // S_inf <= 2/h + this * convergence_tol
    double one_sided_floor = 1e-10;     // |delta| at or below this is treated as converged noise
    int one_sided_min_tail = 3;         // records needed after the last side change
    double regime_slack = 1e-3;         // LargeLR iff h >= 2/L * (1 - this)
};

struct CatapultResult {
    bool detected = false;
    double peak_loss = 0.0;
    long peak_index = 0;
};

struct BalancingResult {
    bool detected = false;
    double initial_gap = 0.0;
    double final_gap = 0.0;
};

struct EosResult {
    bool de_sharpening = false;
    bool progressive_sharpening = false;
    bool limiting = false;
    double s0 = 0.0;
    double s_min = 0.0;
    long s_min_index = 0;
    double s_inf = 0.0;
    double two_over_h = 0.0;
    double rising_fraction = 0.0;
};

struct OneSidedResult {
    bool detected = false;
    std::optional<long> index;  // first k after which sign(delta) is fixed and |delta| non-increasing
    double s_inf = 0.0;
    double one_over_h = 0.0;
};

enum class LrRegime { RegularLR, LargeLR };
std::string to_string(LrRegime r);

struct PhenomenaReport {
    bool converged = false;
    CatapultResult catapult;
    BalancingResult balancing;
    EosResult eos;
    OneSidedResult one_sided;
    LrRegime regime = LrRegime::RegularLR;
    double max_sharpness = 0.0;
    std::optional<long> phase_boundary;
};

CatapultResult detect_catapult(const Trajectory& traj, const DetectorConfig& cfg = {});
BalancingResult detect_balancing(const Trajectory& traj, const DetectorConfig& cfg = {});
EosResult detect_eos_stages(const Trajectory& traj, const DetectorConfig& cfg = {});
OneSidedResult detect_one_sided(const Trajectory& traj, const DetectorConfig& cfg = {});
LrRegime classify_lr_regime(const Trajectory& traj, const DetectorConfig& cfg = {});
PhenomenaReport analyze(const Trajectory& traj, const DetectorConfig& cfg = {});

}  // namespace eoslab
