#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoslab/function_family.hpp"

namespace eoslab {

struct PropertyResult {
    std::string name;
    bool passed = true;
    long samples = 0;
    long failures = 0;
    // Smallest signed slack seen (negative means violated); for error checks, the largest error.
    double worst = 0.0;
    std::string detail;
};

struct PropertyOptions {
    long grid_points = 10000;
    long fd_points = 1000;
    std::uint64_t seed = 20240917;
};

// Every closed-form property the family promises, evaluated on sampled grids.
// Checks that only make sense for the good family are skipped for the others.
std::vector<PropertyResult> property_suite(const Objective& f, const PropertyOptions& opt = {});

PropertyResult check_gradient_fd(const Objective& f, long points, std::uint64_t seed);
PropertyResult check_hessian_fd(const Objective& f, long points, std::uint64_t seed);
PropertyResult check_normalization(const Objective& f, long points);
PropertyResult check_growth_slope(const Objective& f);

// delta > 0 solving q(delta) = target, by bisection on [lo, hi]; q is decreasing there.
double q_inverse(const Objective& f, double target, double lo = 0.0, double hi = 1e3);

}  // namespace eoslab
