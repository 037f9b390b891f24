#include "eoslab/phenomena.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace eoslab {

namespace {

double limit_sharpness(const Trajectory& t) { return t.converged() ? t.limit_sharpness : t.last().sharpness; }

std::vector<double> running_median(const std::vector<double>& v, int width) {
    const long n = static_cast<long>(v.size());
    const long half = width / 2;
    std::vector<double> out(n), buf;
    for (long i = 0; i < n; ++i) {
        const long lo = std::max(0L, i - half), hi = std::min(n - 1, i + half);
        buf.assign(v.begin() + lo, v.begin() + hi + 1);
        auto mid = buf.begin() + static_cast<long>(buf.size()) / 2;
        std::nth_element(buf.begin(), mid, buf.end());
        if (buf.size() % 2 == 1) {
            out[i] = *mid;
        } else {
            const double upper = *mid;
            const double lower = *std::max_element(buf.begin(), mid);
            out[i] = 0.5 * (lower + upper);
        }
    }
    return out;
}

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::string to_string(LrRegime r) { return r == LrRegime::LargeLR ? "LargeLR" : "RegularLR"; }

CatapultResult detect_catapult(const Trajectory& t, const DetectorConfig& cfg) {
    CatapultResult res;
    if (t.steps.empty()) return res;
    const double loss0 = t.first().loss;
    const auto boundary = phase_boundary(t);
    const long K = boundary ? *boundary : t.last().k;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < t.steps.size() && t.steps[i].k <= K; ++i)
        if (peak == 0 || t.steps[i].loss > t.steps[peak].loss) peak = i;
    if (peak == 0) return res;
    res.peak_loss = t.steps[peak].loss;
    res.peak_index = t.steps[peak].k;
    if (!(res.peak_loss > loss0 * (1.0 + cfg.catapult_rise))) return res;
    for (std::size_t i = peak + 1; i < t.steps.size(); ++i)
        if (t.steps[i].loss < loss0) {
            res.detected = true;
            break;
        }
    return res;
}

BalancingResult detect_balancing(const Trajectory& t, const DetectorConfig& cfg) {
    BalancingResult res;
    if (t.steps.empty()) return res;
    const auto& a = t.first();
    const auto& b = t.last();
    res.initial_gap = (a.x - a.y) * (a.x - a.y);
    res.final_gap = (b.x - b.y) * (b.x - b.y);
    res.detected = res.final_gap < res.initial_gap * (1.0 - cfg.balancing_shrink);
    return res;
}

EosResult detect_eos_stages(const Trajectory& t, const DetectorConfig& cfg) {
    EosResult res;
    if (t.steps.empty()) return res;
    const double h = t.h();
    res.two_over_h = 2.0 / h;
    res.s0 = t.first().sharpness;
    res.s_inf = limit_sharpness(t);

    std::vector<double> S;
    S.reserve(t.steps.size());
    for (const auto& r : t.steps) S.push_back(r.sharpness);
    const std::size_t imin = static_cast<std::size_t>(std::min_element(S.begin(), S.end()) - S.begin());
    res.s_min = S[imin];
    res.s_min_index = t.steps[imin].k;

    const long window_end = std::max(1L, static_cast<long>(cfg.desharpen_window * static_cast<double>(t.last().k)));
    double early_min = res.s0;
    for (const auto& r : t.steps) {
        if (r.k > window_end) break;
        early_min = std::min(early_min, r.sharpness);
    }
    res.de_sharpening = early_min <= cfg.desharpen_ratio * res.s0;

    const double gain = res.s_inf - res.s_min;
    if (gain > cfg.progressive_min_gain * std::abs(res.s_inf)) {
        const auto sm = running_median(S, cfg.smoothing_window);
        const double target = res.s_min + cfg.progressive_reach * gain;
        std::size_t end = imin;
        while (end < sm.size() && sm[end] < target) ++end;
        if (end < sm.size() && end > imin) {
            long rising = 0;
            for (std::size_t i = imin; i < end; ++i) rising += sm[i + 1] >= sm[i];
            res.rising_fraction = static_cast<double>(rising) / static_cast<double>(end - imin);
            const bool rise_ok = sm[end] - res.s_min >= cfg.progressive_rise * gain;
            res.progressive_sharpening = rise_ok && res.rising_fraction >= cfg.progressive_fraction;
        }
    }

    const double eps_abs = cfg.limiting_abs_factor * t.config.convergence_tol;
    res.limiting = t.converged() && res.s_inf >= (1.0 - cfg.limiting_rel) * res.two_over_h &&
                   res.s_inf <= res.two_over_h + eps_abs;
    return res;
}

OneSidedResult detect_one_sided(const Trajectory& t, const DetectorConfig& cfg) {
    OneSidedResult res;
    if (t.steps.empty()) return res;
    res.s_inf = limit_sharpness(t);
    res.one_over_h = 1.0 / t.h();
    const double s_star = t.config.spec.argmin_product();

    std::vector<const StepRecord*> live;
    for (const auto& r : t.steps)
        if (std::abs(r.x * r.y - s_star) > cfg.one_sided_floor) live.push_back(&r);
    if (live.empty()) return res;

    std::size_t start = 0;
    for (std::size_t i = 1; i < live.size(); ++i) {
        const double prev = live[i - 1]->x * live[i - 1]->y - s_star;
        const double cur = live[i]->x * live[i]->y - s_star;
        if (sign(prev) != sign(cur) || std::abs(cur) > std::abs(prev)) start = i;
    }
    const long tail = static_cast<long>(live.size() - start);
    res.index = live[start]->k;
    res.detected = t.converged() && tail >= cfg.one_sided_min_tail && res.s_inf <= res.one_over_h;
    return res;
}

LrRegime classify_lr_regime(const Trajectory& t, const DetectorConfig& cfg) {
    double L = 0.0;
    for (const auto& r : t.steps)
        if (std::isfinite(r.sharpness)) L = std::max(L, r.sharpness);
    if (L <= 0.0) return LrRegime::RegularLR;
    return t.h() >= 2.0 / L * (1.0 - cfg.regime_slack) ? LrRegime::LargeLR : LrRegime::RegularLR;
}

PhenomenaReport analyze(const Trajectory& t, const DetectorConfig& cfg) {
    PhenomenaReport r;
    r.converged = t.converged();
    r.catapult = detect_catapult(t, cfg);
    r.balancing = detect_balancing(t, cfg);
    r.eos = detect_eos_stages(t, cfg);
    r.one_sided = detect_one_sided(t, cfg);
    r.regime = classify_lr_regime(t, cfg);
    for (const auto& s : t.steps)
        if (std::isfinite(s.sharpness)) r.max_sharpness = std::max(r.max_sharpness, s.sharpness);
    r.phase_boundary = phase_boundary(t);
    return r;
}

}  // namespace eoslab
