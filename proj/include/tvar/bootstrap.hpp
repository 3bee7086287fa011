#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tvar/core.hpp"
#include "tvar/numeric.hpp"
#include "tvar/parallel.hpp"
#include "tvar/rng.hpp"
#include "tvar/solver.hpp"
#include "tvar/tuning.hpp"

namespace tvar {

enum class BootstrapScheme { wild, local_block };
enum class WildMultiplier { standard_normal, rademacher };

struct BootstrapConfig {
    BootstrapScheme scheme = BootstrapScheme::wild;
    int replicates = 100;
    WildMultiplier multiplier = WildMultiplier::standard_normal;
    int block_size = 20;       // b
    int neighborhood = 50;     // B
    int retune_halfwidth = 2;  // n: re-tune over [delta* - n eps, delta* + n eps]
    std::vector<double> levels{0.90, 0.95};
    std::uint64_t seed = 0;
    int threads = 0;  // 0 means thread_budget()

    void validate(int series_length) const {
        if (replicates < 2) throw std::invalid_argument("BootstrapConfig: need replicates >= 2");
        if (block_size < 1 || block_size > series_length)
            throw std::invalid_argument("BootstrapConfig: need 1 <= block_size <= T");
        if (neighborhood < 1) throw std::invalid_argument("BootstrapConfig: need neighborhood >= 1");
        if (retune_halfwidth < 0)
            throw std::invalid_argument("BootstrapConfig: retune_halfwidth must be >= 0");
        for (double lv : levels)
            if (!(lv > 0.0 && lv < 1.0))
                throw std::invalid_argument("BootstrapConfig: levels must lie in (0, 1)");
    }
};

struct ConfidenceInterval {
    double level = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct BootstrapResult {
    std::vector<double> point;                               // alpha-hat of the original fit
    std::vector<std::vector<double>> draws;                  // kept replicates x p
    std::vector<std::vector<ConfidenceInterval>> intervals;  // [level][coefficient]
    int requested = 0;
    int dropped = 0;
    bool unreliable = false;  // more than 10% of replicates dropped
};

/// Residual-based wild bootstrap: rebuild the series recursively from the
/// original history with x~_i = f^_i + sum_j a^_j x~_{i-j} + r^_i v_i, where
/// the v_i are i.i.d. with mean 0 and variance 1.
inline TimeSeries wild_bootstrap_sample(const TimeSeries& series, const FitResult& fit,
                                        std::uint64_t rng_seed,
                                        WildMultiplier multiplier = WildMultiplier::standard_normal) {
    const int T = series.length();
    const int p = series.order();
    if (fit.coefficients.order() != p || fit.coefficients.length() != T ||
        static_cast<int>(fit.residuals.size()) != T)
        throw std::invalid_argument("wild_bootstrap_sample: fit does not match series");

    const std::vector<double> f = reconstruct_background(fit.coefficients);
    Rng rng(rng_seed);
    std::vector<double> x(static_cast<std::size_t>(T));
    auto lagged = [&](int i, int j) {
        const int idx = i - j;
        return idx >= 1 ? x[static_cast<std::size_t>(idx - 1)]
                        : series.history()[static_cast<std::size_t>(idx - 1 + p)];
    };
    for (int i = 1; i <= T; ++i) {
        const double v =
            multiplier == WildMultiplier::standard_normal ? rng.normal() : rng.rademacher();
        double val = f[static_cast<std::size_t>(i - 1)] +
                     fit.residuals[static_cast<std::size_t>(i - 1)] * v;
        for (int j = 1; j <= p; ++j)
            val += fit.coefficients.alpha[static_cast<std::size_t>(j - 1)] * lagged(i, j);
        x[static_cast<std::size_t>(i - 1)] = val;
    }
    return TimeSeries(std::move(x), series.history());
}

/// Local block bootstrap: ceil(T/b) blocks, block m copying a contiguous input
/// window that starts uniformly within {max(1, mb-B), ..., min(T-b+1, mb+B)}.
/// The final partial block is truncated to length T - (M-1)b. Every output
/// value is an exact copy of an input value.
inline TimeSeries local_block_bootstrap_sample(const TimeSeries& series, const BootstrapConfig& cfg,
                                               std::uint64_t rng_seed) {
    const int T = series.length();
    cfg.validate(T);
    const int b = cfg.block_size;
    const int B = cfg.neighborhood;
    const int blocks = (T + b - 1) / b;

    Rng rng(rng_seed);
    std::vector<double> x(static_cast<std::size_t>(T));
    for (int m = 0; m < blocks; ++m) {
        int lo = std::max(1, m * b - B);
        const int hi = std::min(T - b + 1, m * b + B);
        if (lo > hi) lo = hi;  // large b with tiny B: collapse to the single valid start
        const int start = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(lo),
                                                           static_cast<std::uint64_t>(hi)));
        const int len = std::min(b, T - m * b);
        for (int j = 1; j <= len; ++j)
            x[static_cast<std::size_t>(m * b + j - 1)] =
                series.values()[static_cast<std::size_t>(start + j - 2)];
    }
    return TimeSeries(std::move(x), series.history());
}

namespace detail {

/// Re-tune over the 2n+1 grid points delta* + k*eps (k = -n..n), clamped at 0,
/// then fit at the winner. Returns false when no candidate fit converges.
inline bool retune_and_fit(const TimeSeries& series, double delta_star, const BootstrapConfig& cfg,
                           const TuneConfig& tunecfg, const FitConfig& fitcfg,
                           std::vector<double>& alpha_out) {
    const int n = cfg.retune_halfwidth;
    const int h = tunecfg.lags > 0 ? tunecfg.lags : series.order();
    double best_p = -1.0;
    std::optional<Coefficients> warm;
    for (int k = -n; k <= n; ++k) {
        const double delta = std::max(0.0, delta_star + static_cast<double>(k) * tunecfg.epsilon);
        FitConfig fc = fitcfg;
        fc.delta = delta;
        FitResult fr = warm ? fit(series, fc, *warm) : fit(series, fc);
        if (fr.converged && all_finite(fr.coefficients.alpha)) {
            double p;
            if (tunecfg.test == PortmanteauTest::ljung_box) {
                p = tunecfg.transform == ResidualTransform::shifted_log
                        ? ljung_box(shifted_log_transform(fr.residuals), h).p_value
                        : ljung_box(fr.residuals, h).p_value;
            } else {
                p = tunecfg.transform == ResidualTransform::shifted_log
                        ? durbin_watson(shifted_log_transform(fr.residuals)).p_value
                        : durbin_watson(fr.residuals).p_value;
            }
            if (p > best_p) {
                best_p = p;
                alpha_out = fr.coefficients.alpha;
            }
        }
        warm = std::move(fr.coefficients);
    }
    return best_p >= 0.0;
}

}  // namespace detail

/// Replicate generation, per-replicate re-tuning, and percentile confidence
/// intervals. Per-replicate seeds are split off cfg.seed, so the draws matrix
/// is reproducible regardless of thread count.
inline BootstrapResult bootstrap_ci(const TimeSeries& series, const TuneResult& tuned,
                                    const BootstrapConfig& cfg, const TuneConfig& tunecfg,
                                    const FitConfig& fitcfg) {
    const int T = series.length();
    const int p = series.order();
    cfg.validate(T);

    FitConfig base_cfg = fitcfg;
    base_cfg.delta = tuned.delta_star;
    const FitResult base = fit(series, base_cfg);

    BootstrapResult result;
    result.point = base.coefficients.alpha;
    result.requested = cfg.replicates;

    std::vector<std::vector<double>> slots(static_cast<std::size_t>(cfg.replicates));
    std::vector<char> kept(static_cast<std::size_t>(cfg.replicates), 0);
    const int threads = cfg.threads > 0 ? cfg.threads : thread_budget();

    parallel_for(cfg.replicates, threads, [&](int i) {
        const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        try {
            const TimeSeries pseudo =
                cfg.scheme == BootstrapScheme::wild
                    ? wild_bootstrap_sample(series, base, seed, cfg.multiplier)
                    : local_block_bootstrap_sample(series, cfg, seed);
            std::vector<double> alpha;
            if (detail::retune_and_fit(pseudo, tuned.delta_star, cfg, tunecfg, fitcfg, alpha)) {
                slots[static_cast<std::size_t>(i)] = std::move(alpha);
                kept[static_cast<std::size_t>(i)] = 1;
            }
        } catch (const std::exception&) {
            // replicate dropped and counted below
        }
    });

    for (int i = 0; i < cfg.replicates; ++i) {
        if (kept[static_cast<std::size_t>(i)]) result.draws.push_back(std::move(slots[static_cast<std::size_t>(i)]));
        else ++result.dropped;
    }
    result.unreliable = result.dropped * 10 > cfg.replicates;
    if (result.draws.empty()) {
        result.unreliable = true;
        return result;
    }

    for (double level : cfg.levels) {
        std::vector<ConfidenceInterval> per_coef;
        per_coef.reserve(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) {
            std::vector<double> column;
            column.reserve(result.draws.size());
            for (const auto& d : result.draws) column.push_back(d[static_cast<std::size_t>(j)]);
            std::sort(column.begin(), column.end());
            ConfidenceInterval ci;
            ci.level = level;
            ci.lo = quantile_sorted(column, (1.0 - level) / 2.0);
            ci.hi = quantile_sorted(column, (1.0 + level) / 2.0);
            per_coef.push_back(ci);
        }
        result.intervals.push_back(std::move(per_coef));
    }
    return result;
}

}  // namespace tvar
