#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tvar/numeric.hpp"

namespace tvar {

/// Euclidean projection of v onto {u : ||u||_1 <= radius}, in place.
/// Exact sort-based soft-thresholding; `scratch` avoids reallocation in hot loops.
inline void project_l1_ball_inplace(std::span<double> v, double radius, std::vector<double>& scratch) {
    if (radius < 0.0) throw std::invalid_argument("project_l1_ball: radius must be >= 0");
    if (v.empty()) return;
    if (radius == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return;
    }
    double l1 = 0.0;
    for (double x : v) l1 += std::abs(x);
    if (l1 <= radius) return;

    scratch.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) scratch[i] = std::abs(v[i]);
    std::sort(scratch.begin(), scratch.end(), std::greater<double>());

    // KKT threshold: largest rho with u_rho > (csum_rho - radius)/rho
    double csum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < scratch.size(); ++j) {
        csum += scratch[j];
        const double cand = (csum - radius) / static_cast<double>(j + 1);
        if (scratch[j] > cand) theta = cand;
        else break;
    }
    for (auto& x : v) {
        const double mag = std::abs(x) - theta;
        x = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
    }
}

inline std::vector<double> project_l1_ball(std::span<const double> v, double radius) {
    std::vector<double> out(v.begin(), v.end());
    std::vector<double> scratch;
    project_l1_ball_inplace(out, radius, scratch);
    return out;
}

/// Euclidean projection onto {u : ||u||_2 <= radius}: radial scaling.
inline void project_l2_ball_inplace(std::span<double> v, double radius) {
    if (radius < 0.0) throw std::invalid_argument("project_l2_ball: radius must be >= 0");
    const double nrm = norm2(v);
    if (nrm <= radius || v.empty()) return;
    const double scale = radius / nrm;
    for (auto& x : v) x *= scale;
}

inline std::vector<double> project_l2_ball(std::span<const double> v, double radius) {
    std::vector<double> out(v.begin(), v.end());
    project_l2_ball_inplace(out, radius);
    return out;
}

}  // namespace tvar
