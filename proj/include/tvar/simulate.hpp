#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvar/core.hpp"
#include "tvar/rng.hpp"

namespace tvar {

enum class DriftKind { none, random_walk, piecewise_constant, piecewise_linear };

/// Ground-truth drift mechanism. delta0 bounds the one-step change magnitude;
/// changes (s) counts jump points (piecewise-constant) or slope segments
/// (piecewise-linear).
struct DriftSpec {
    DriftKind kind = DriftKind::none;
    double delta0 = 0.0;
    int changes = 1;
    int length = 0;  // T

    void validate() const {
        if (length < 1) throw std::invalid_argument("DriftSpec: length must be >= 1");
        if (delta0 < 0.0) throw std::invalid_argument("DriftSpec: delta0 must be >= 0");
        if (kind == DriftKind::piecewise_constant || kind == DriftKind::piecewise_linear) {
            if (changes < 1) throw std::invalid_argument("DriftSpec: changes must be >= 1");
            if (changes > length - 1)
                throw std::invalid_argument("DriftSpec: piecewise kinds need changes <= T - 1");
        }
    }
};

struct SimConfig {
    std::vector<double> alpha;
    DriftSpec drift;
    NoiseModel noise{NoiseKind::gaussian, 1.0};
    std::vector<double> history;
    std::uint64_t seed = 0;
};

namespace detail {

/// s distinct values from {1..limit}, ascending, by partial Fisher-Yates.
inline std::vector<int> sample_without_replacement(int s, int limit, Rng& rng) {
    std::vector<int> pool(static_cast<std::size_t>(limit));
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < s; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(limit - 1)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + s);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Generate a drift path f_1..f_T. Every mechanism keeps one-step changes
/// within [-delta0/2, delta0/2], so |f_i - f_{i-1}| <= delta0 always holds.
///   random-walk:        f_i = sum_{k<=i} delta0 (U_k - 0.5)
///   piecewise-constant: level path with s jumps delta0 (u_j - 0.5) at
///                       distinct positions drawn from {1..T-1}; f_1 = 0
///   piecewise-linear:   s segments with slopes delta0 (u_seg - 0.5)
inline std::vector<double> gen_drift(const DriftSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int T = spec.length;
    std::vector<double> f(static_cast<std::size_t>(T), 0.0);
    if (spec.kind == DriftKind::none) return f;
    Rng rng(seed);
    switch (spec.kind) {
        case DriftKind::none:
            break;
        case DriftKind::random_walk: {
            double level = 0.0;
            for (int i = 0; i < T; ++i) {
                level += spec.delta0 * (rng.uniform() - 0.5);
                f[static_cast<std::size_t>(i)] = level;
            }
            break;
        }
        case DriftKind::piecewise_constant: {
            const auto points = detail::sample_without_replacement(spec.changes, T - 1, rng);
            std::vector<double> jumps(points.size());
            for (auto& j : jumps) j = spec.delta0 * (rng.uniform() - 0.5);
            double level = 0.0;
            std::size_t next = 0;
            for (int i = 1; i <= T; ++i) {
                if (next < points.size() && i == points[next] + 1) {
                    level += jumps[next];
                    ++next;
                }
                f[static_cast<std::size_t>(i - 1)] = level;
            }
            break;
        }
        case DriftKind::piecewise_linear: {
            // s segments need s-1 interior breakpoints; segment i covers steps
            // (k_i, k_{i+1}]
            std::vector<int> breaks;
            if (spec.changes > 1) breaks = detail::sample_without_replacement(spec.changes - 1, T - 1, rng);
            std::vector<double> slopes(static_cast<std::size_t>(spec.changes));
            for (auto& s : slopes) s = spec.delta0 * (rng.uniform() - 0.5);
            double level = 0.0;
            std::size_t seg = 0;
            for (int i = 1; i <= T; ++i) {
                while (seg < breaks.size() && i > breaks[seg]) ++seg;
                level += slopes[seg];
                f[static_cast<std::size_t>(i - 1)] = level;
            }
            break;
        }
    }
    return f;
}

struct SimOutput {
    TimeSeries series;
    std::vector<double> background;  // ground-truth f_1..f_T
};

/// Run the recursion x_i = f_i + sum_j alpha_j x_{i-j} + eps_i from the given
/// history. Deterministic given cfg.seed. Throws on the first non-finite value
/// (explosive coefficient choices).
inline SimOutput gen_series(const SimConfig& cfg) {
    if (cfg.alpha.empty() || cfg.alpha.size() != cfg.history.size())
        throw std::invalid_argument("gen_series: alpha and history must both have length p >= 1");
    cfg.drift.validate();
    const int T = cfg.drift.length;
    const int p = static_cast<int>(cfg.alpha.size());
    if (T < p + 2) throw std::invalid_argument("gen_series: need T >= p + 2");

    std::vector<double> f = gen_drift(cfg.drift, derive_seed(cfg.seed, 1));
    Rng noise_rng(derive_seed(cfg.seed, 2));

    std::vector<double> x(static_cast<std::size_t>(T));
    auto lagged = [&](int i, int j) {
        const int idx = i - j;
        return idx >= 1 ? x[static_cast<std::size_t>(idx - 1)]
                        : cfg.history[static_cast<std::size_t>(idx - 1 + p)];
    };
    for (int i = 1; i <= T; ++i) {
        double v = f[static_cast<std::size_t>(i - 1)] + cfg.noise.sample(noise_rng);
        for (int j = 1; j <= p; ++j) v += cfg.alpha[static_cast<std::size_t>(j - 1)] * lagged(i, j);
        if (!std::isfinite(v))
            throw std::overflow_error("gen_series: recursion overflowed at i = " + std::to_string(i));
        x[static_cast<std::size_t>(i - 1)] = v;
    }
    return SimOutput{TimeSeries(std::move(x), cfg.history), std::move(f)};
}

/// Recoverability predicate: evaluates
///   min{ c1_tilde * s^{3/2} * delta0, 2*sqrt(vol_s/pi) } + sqrt(s)*delta0
///     <= epsilon - delta
/// with a user-supplied constant c1_tilde.
inline bool recoverable(int s, double delta0, double epsilon, double delta, double vol_s,
                        double c1_tilde) {
    if (s < 1) throw std::invalid_argument("recoverable: s must be >= 1");
    if (delta0 < 0.0 || delta < 0.0) throw std::invalid_argument("recoverable: negative magnitude");
    if (vol_s <= 0.0 || c1_tilde <= 0.0)
        throw std::invalid_argument("recoverable: vol_s and c1_tilde must be > 0");
    if (!(epsilon > delta)) throw std::invalid_argument("recoverable: need epsilon > delta");
    const double sd = static_cast<double>(s);
    const double lhs = std::min(c1_tilde * std::pow(sd, 1.5) * delta0,
                                2.0 * std::sqrt(vol_s / 3.141592653589793238462643383279502884)) +
                       std::sqrt(sd) * delta0;
    return lhs <= epsilon - delta;
}

}  // namespace tvar
