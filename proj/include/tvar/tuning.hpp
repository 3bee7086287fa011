#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tvar/diagnostics.hpp"
#include "tvar/solver.hpp"

namespace tvar {

enum class TuneMethod { grid, golden };
enum class ResidualTransform { none, shifted_log };

struct TuneConfig {
    double delta_lo = 0.0;
    double delta_hi = 1.0;
    double epsilon = 0.04;
    TuneMethod method = TuneMethod::grid;
    PortmanteauTest test = PortmanteauTest::ljung_box;
    int lags = 0;  // 0 means "use the series order p"
    ResidualTransform transform = ResidualTransform::none;

    void validate() const {
        if (delta_lo < 0.0 || delta_hi < 0.0)
            throw std::invalid_argument("TuneConfig: delta bounds must be >= 0");
        if (!(delta_lo < delta_hi)) throw std::invalid_argument("TuneConfig: need delta_lo < delta_hi");
        if (!(epsilon > 0.0)) throw std::invalid_argument("TuneConfig: epsilon must be > 0");
    }
};

/// One fitted-and-tested grid or golden point.
struct TuneEval {
    double delta = 0.0;
    double p_value = 0.0;
    std::vector<double> alpha;
    bool warning = false;  // solver did not converge; p_value forced to 0
};

struct TuneResult {
    double delta_star = 0.0;
    double p_star = 0.0;
    std::vector<double> alpha_star;
    std::vector<TuneEval> trace;  // in evaluation order
    int evaluations = 0;
    bool any_warning = false;
};

using TuneObjective = std::function<TuneEval(double)>;

/// Wraps a fit-then-test evaluation of one candidate delta. Consecutive calls
/// warm-start from the previous solution.
inline TuneObjective make_tune_objective(const TimeSeries& series, const TuneConfig& cfg,
                                         const FitConfig& fitcfg) {
    const int h = cfg.lags > 0 ? cfg.lags : series.order();
    auto warm = std::make_shared<std::optional<Coefficients>>();
    return [&series, cfg, fitcfg, h, warm](double delta) {
        FitConfig fc = fitcfg;
        fc.delta = delta;
        fc.record_trace = false;
        FitResult fr = *warm ? fit(series, fc, **warm) : fit(series, fc);
        TuneEval ev;
        ev.delta = delta;
        ev.alpha = fr.coefficients.alpha;
        if (!fr.converged) {
            ev.p_value = 0.0;
            ev.warning = true;
        } else if (cfg.test == PortmanteauTest::ljung_box) {
            if (cfg.transform == ResidualTransform::shifted_log)
                ev.p_value = ljung_box(shifted_log_transform(fr.residuals), h).p_value;
            else
                ev.p_value = ljung_box(fr.residuals, h).p_value;
        } else {
            if (cfg.transform == ResidualTransform::shifted_log)
                ev.p_value = durbin_watson(shifted_log_transform(fr.residuals)).p_value;
            else
                ev.p_value = durbin_watson(fr.residuals).p_value;
        }
        *warm = std::move(fr.coefficients);
        return ev;
    };
}

/// Adapts a plain p(delta) mapping to the TuneObjective seam (test injection).
inline TuneObjective wrap_objective(std::function<double(double)> p_of_delta) {
    return [p = std::move(p_of_delta)](double delta) {
        TuneEval ev;
        ev.delta = delta;
        ev.p_value = p(delta);
        return ev;
    };
}

/// Grid sweep over the floor((hi-lo)/eps)+1 equispaced endpoints. Ties break
/// toward smaller delta.
inline TuneResult tune_grid_objective(const TuneObjective& objective, const TuneConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(std::floor((cfg.delta_hi - cfg.delta_lo) / cfg.epsilon * (1.0 + 1e-12)));
    TuneResult result;
    result.trace.reserve(static_cast<std::size_t>(n) + 1);
    int best = -1;
    for (int j = 0; j <= n; ++j) {
        const double delta = std::min(cfg.delta_lo + static_cast<double>(j) * cfg.epsilon, cfg.delta_hi);
        TuneEval ev = objective(delta);
        result.any_warning = result.any_warning || ev.warning;
        result.trace.push_back(std::move(ev));
        if (best < 0 || result.trace.back().p_value > result.trace[static_cast<std::size_t>(best)].p_value)
            best = j;
    }
    const TuneEval& top = result.trace[static_cast<std::size_t>(best)];
    result.delta_star = top.delta;
    result.p_star = top.p_value;
    result.alpha_star = top.alpha;
    result.evaluations = static_cast<int>(result.trace.size());
    return result;
}

/// Textbook golden-section maximization; assumes a unimodal p(delta). Stops
/// when the bracket width drops below epsilon and returns its midpoint. Uses
/// at most floor(log(eps/(hi-lo))/log(0.618)) + 3 evaluations.
inline TuneResult tune_golden_objective(const TuneObjective& objective, const TuneConfig& cfg) {
    cfg.validate();
    constexpr double kRatio = 0.6180339887498949;  // (sqrt(5)-1)/2
    double a = cfg.delta_lo;
    double b = cfg.delta_hi;
    TuneResult result;

    auto record = [&](double delta) {
        TuneEval ev = objective(delta);
        result.any_warning = result.any_warning || ev.warning;
        result.trace.push_back(std::move(ev));
        return result.trace.back().p_value;
    };

    double c = b - kRatio * (b - a);
    double d = a + kRatio * (b - a);
    double pc = record(c);
    double pd = record(d);
    while (b - a >= cfg.epsilon) {
        if (pc >= pd) {  // maximum in [a, d]; ties shrink toward smaller delta
            b = d;
            d = c;
            pd = pc;
            c = b - kRatio * (b - a);
            pc = record(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + kRatio * (b - a);
            pd = record(d);
        }
    }
    result.delta_star = 0.5 * (a + b);
    result.evaluations = static_cast<int>(result.trace.size());

    // p_star is the best evaluated p; alpha comes from the best point inside
    // the final bracket (the midpoint itself is never evaluated).
    int best_global = 0;
    int best_inside = -1;
    for (int i = 0; i < result.evaluations; ++i) {
        const TuneEval& ev = result.trace[static_cast<std::size_t>(i)];
        if (ev.p_value > result.trace[static_cast<std::size_t>(best_global)].p_value) best_global = i;
        if (ev.delta >= a - 1e-15 && ev.delta <= b + 1e-15 &&
            (best_inside < 0 || ev.p_value > result.trace[static_cast<std::size_t>(best_inside)].p_value))
            best_inside = i;
    }
    result.p_star = result.trace[static_cast<std::size_t>(best_global)].p_value;
    result.alpha_star = result.trace[static_cast<std::size_t>(best_inside >= 0 ? best_inside : best_global)].alpha;
    return result;
}

inline TuneResult tune_grid(const TimeSeries& series, const TuneConfig& cfg, const FitConfig& fitcfg) {
    return tune_grid_objective(make_tune_objective(series, cfg, fitcfg), cfg);
}

inline TuneResult tune_golden(const TimeSeries& series, const TuneConfig& cfg, const FitConfig& fitcfg) {
    return tune_golden_objective(make_tune_objective(series, cfg, fitcfg), cfg);
}

inline TuneResult tune(const TimeSeries& series, const TuneConfig& cfg, const FitConfig& fitcfg) {
    return cfg.method == TuneMethod::grid ? tune_grid(series, cfg, fitcfg)
                                          : tune_golden(series, cfg, fitcfg);
}

}  // namespace tvar
