#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "tvar/core.hpp"
#include "tvar/numeric.hpp"
#include "tvar/projection.hpp"

namespace tvar {

enum class StepRule { backtracking, fixed_lipschitz };

struct FitConfig {
    double delta = 0.0;      // total-variation budget on the background changes
    double delta_s = std::numeric_limits<double>::infinity();  // L2 radius on (alpha, mu)
    int max_iters = 20000;
    double tol = 1e-8;       // relative objective change over a 10-iteration window
    StepRule step_rule = StepRule::backtracking;
    bool record_trace = false;

    void validate() const {
        if (delta < 0.0) throw std::invalid_argument("FitConfig: delta must be >= 0");
        if (!(delta_s > 0.0)) throw std::invalid_argument("FitConfig: delta_s must be > 0");
        if (max_iters < 1) throw std::invalid_argument("FitConfig: max_iters must be >= 1");
        if (!(tol > 0.0)) throw std::invalid_argument("FitConfig: tol must be > 0");
    }
};

struct FitResult {
    Coefficients coefficients;
    std::vector<double> residuals;   // x_i - sum_j alpha_j x_{i-j} - f_i
    double objective = 0.0;          // (1/2T) * sum r_i^2
    int iterations = 0;
    bool converged = false;
    double kkt_gap = 0.0;            // gradient-mapping norm at the returned point
    bool rank_deficient = false;     // set by the polynomial baseline
    std::vector<double> objective_trace;  // accepted objectives, if record_trace
};

namespace detail {

enum class DeltaBall { l1, l2 };

/// 20-iteration power method estimate of the largest eigenvalue of X^T X / T.
inline double lipschitz_estimate(const DesignOperator& op) {
    const int n = op.cols();
    const int T = op.rows();
    std::vector<double> w(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> xw(static_cast<std::size_t>(T));
    std::vector<double> v(static_cast<std::size_t>(n));
    double lambda = 1.0;
    for (int it = 0; it < 20; ++it) {
        op.apply(w, xw);
        op.apply_adjoint(xw, v);
        for (auto& e : v) e /= static_cast<double>(T);
        lambda = norm2(v);
        if (lambda <= 0.0) break;
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] / lambda;
    }
    return std::max(lambda, 1e-12);
}

struct FeasibleSet {
    DeltaBall ball;
    double delta_radius;  // L1 radius, or L2 radius sqrt(delta) for the variant
    double delta_s;
    int p;

    void project(std::span<double> beta, std::vector<double>& scratch) const {
        auto head = beta.subspan(0, static_cast<std::size_t>(p) + 1);
        auto tail = beta.subspan(static_cast<std::size_t>(p) + 1);
        if (std::isfinite(delta_s)) project_l2_ball_inplace(head, delta_s);
        if (ball == DeltaBall::l1) project_l1_ball_inplace(tail, delta_radius, scratch);
        else project_l2_ball_inplace(tail, delta_radius);
    }
};

/// Accelerated projected gradient (FISTA with function-value restart) for
/// min (1/2T)||x - X beta||^2 over the feasible set. Monotone in the accepted
/// objective by construction: a candidate that increases the objective
/// triggers a momentum restart and a plain projected-gradient step.
inline FitResult fista(const TimeSeries& series, const FitConfig& config, DeltaBall ball,
                       const Coefficients* warm) {
    config.validate();
    const DesignOperator op(series);
    const int T = op.rows();
    const int p = op.cols() - op.rows();
    const std::size_t n = static_cast<std::size_t>(op.cols());
    const auto& obs = series.values();

    const double lips = lipschitz_estimate(op);
    const double ref_step = 1.0 / lips;
    const FeasibleSet feasible{ball, ball == DeltaBall::l1 ? config.delta : std::sqrt(config.delta),
                               config.delta_s, p};

    std::vector<double> scratch;
    std::vector<double> fwd(static_cast<std::size_t>(T));
    auto objective_at = [&](std::span<const double> beta) {
        op.apply(beta, fwd);
        double s = 0.0;
        for (int i = 0; i < T; ++i) {
            const double r = obs[static_cast<std::size_t>(i)] - fwd[static_cast<std::size_t>(i)];
            s += r * r;
        }
        return s / (2.0 * static_cast<double>(T));
    };
    std::vector<double> grad(n);
    // fills grad with the gradient and returns the objective at beta
    auto gradient_at = [&](std::span<const double> beta) {
        op.apply(beta, fwd);
        double s = 0.0;
        for (int i = 0; i < T; ++i) {
            const double r = fwd[static_cast<std::size_t>(i)] - obs[static_cast<std::size_t>(i)];
            fwd[static_cast<std::size_t>(i)] = r;
            s += r * r;
        }
        op.apply_adjoint(fwd, grad);
        for (auto& g : grad) g /= static_cast<double>(T);
        return s / (2.0 * static_cast<double>(T));
    };

    std::vector<double> x(n, 0.0);
    if (warm) {
        if (warm->order() != p || warm->length() != T)
            throw std::invalid_argument("fit: warm start shape mismatch");
        x = warm->flatten();
    }
    feasible.project(x, scratch);
    double fx = objective_at(x);

    std::vector<double> y = x;
    std::vector<double> z(n), x_prev(n);
    double momentum = 1.0;
    double step = config.step_rule == StepRule::fixed_lipschitz ? 1.0 / (1.05 * lips) : ref_step;

    auto kkt_gap_at = [&](std::span<const double> beta) {
        gradient_at(beta);
        std::vector<double> trial(beta.begin(), beta.end());
        for (std::size_t i = 0; i < n; ++i) trial[i] -= ref_step * grad[i];
        feasible.project(trial, scratch);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = beta[i] - trial[i];
            s += d * d;
        }
        return std::sqrt(s) / ref_step;
    };

    // step from y with current gradient; returns objective at the new point
    auto prox_step = [&](const std::vector<double>& from, double fy) {
        while (true) {
            for (std::size_t i = 0; i < n; ++i) z[i] = from[i] - step * grad[i];
            feasible.project(z, scratch);
            const double fz = objective_at(z);
            if (config.step_rule == StepRule::fixed_lipschitz) return fz;
            double inner = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = z[i] - from[i];
                inner += grad[i] * d;
                sq += d * d;
            }
            const double upper = fy + inner + sq / (2.0 * step);
            if (fz <= upper + 1e-15 * (1.0 + std::abs(fz)) || step < 1e-18) return fz;
            step *= 0.5;
        }
    };

    FitResult result;
    if (config.record_trace) result.objective_trace.push_back(fx);

    constexpr int kWindow = 10;
    constexpr double kKktScale = 1e-6;
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(config.max_iters) + 1);
    window.push_back(fx);

    int iter = 0;
    bool converged = false;
    int last_gap_check = -1;
    for (iter = 1; iter <= config.max_iters; ++iter) {
        const double fy = gradient_at(y);
        double fz = prox_step(y, fy);
        if (fz > fx) {
            // restart: plain projected-gradient step from x is guaranteed not to increase
            momentum = 1.0;
            y = x;
            gradient_at(x);
            fz = prox_step(x, fx);
            if (fz > fx) {  // flat to machine precision
                z = x;
                fz = fx;
            }
        }
        x_prev.swap(x);
        x = z;
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta_mix = (momentum - 1.0) / next_momentum;
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta_mix * (x[i] - x_prev[i]);
        momentum = next_momentum;
        fx = fz;
        window.push_back(fx);
        if (config.record_trace) result.objective_trace.push_back(fx);

        if (iter >= kWindow && iter - last_gap_check >= kWindow) {
            const double drop = window[static_cast<std::size_t>(iter - kWindow)] - fx;
            if (drop < config.tol * (1.0 + std::abs(fx))) {
                last_gap_check = iter;
                const double gap = kkt_gap_at(x);
                if (gap < kKktScale * (1.0 + fx)) {
                    result.kkt_gap = gap;
                    converged = true;
                    break;
                }
            }
        }
    }
    if (!converged) {
        result.kkt_gap = kkt_gap_at(x);
        iter = config.max_iters;
    }

    result.coefficients = Coefficients::unflatten(x, p);
    op.apply(x, fwd);
    result.residuals.resize(static_cast<std::size_t>(T));
    double s = 0.0;
    for (int i = 0; i < T; ++i) {
        const double r = obs[static_cast<std::size_t>(i)] - fwd[static_cast<std::size_t>(i)];
        result.residuals[static_cast<std::size_t>(i)] = r;
        s += r * r;
    }
    result.objective = s / (2.0 * static_cast<double>(T));
    result.iterations = iter;
    result.converged = converged;
    return result;
}

/// Eigendecomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// a is n*n row-major and is destroyed; eigenvalues land on its diagonal and
/// the columns of v are the eigenvectors.
inline void jacobi_eigen_symmetric(std::vector<double>& a, int n, std::vector<double>& v) {
    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto at = [&](std::vector<double>& m, int r, int c) -> double& {
        return m[static_cast<std::size_t>(r) * n + c];
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(a, i, j) * at(a, i, j);
        if (off < 1e-28) break;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double apq = at(a, i, j);
                if (apq == 0.0) continue;
                const double app = at(a, i, i);
                const double aqq = at(a, j, j);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double aki = at(a, k, i);
                    const double akj = at(a, k, j);
                    at(a, k, i) = c * aki - sn * akj;
                    at(a, k, j) = sn * aki + c * akj;
                }
                for (int k = 0; k < n; ++k) {
                    const double aik = at(a, i, k);
                    const double ajk = at(a, j, k);
                    at(a, i, k) = c * aik - sn * ajk;
                    at(a, j, k) = sn * aik + c * ajk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vki = at(v, k, i);
                    const double vkj = at(v, k, j);
                    at(v, k, i) = c * vki - sn * vkj;
                    at(v, k, j) = sn * vki + c * vkj;
                }
            }
        }
    }
}

}  // namespace detail

/// Solve the total-variation-constrained least-squares program: minimize
/// (1/2T)||x - X beta||^2 subject to ||Delta||_1 <= delta (and, when delta_s is
/// finite, ||(alpha, mu)||_2 <= delta_s). Deterministic given inputs;
/// non-convergence within max_iters is reported via converged=false.
inline FitResult fit(const TimeSeries& series, const FitConfig& config) {
    return detail::fista(series, config, detail::DeltaBall::l1, nullptr);
}

inline FitResult fit(const TimeSeries& series, const FitConfig& config, const Coefficients& warm_start) {
    return detail::fista(series, config, detail::DeltaBall::l1, &warm_start);
}

/// Comparison baseline: same objective with the squared-change constraint
/// sum (f_{i+1} - f_i)^2 <= delta, i.e. the Delta block projected onto the
/// Euclidean ball of radius sqrt(delta).
inline FitResult fit_l2_variant(const TimeSeries& series, const FitConfig& config) {
    return detail::fista(series, config, detail::DeltaBall::l2, nullptr);
}

inline FitResult fit_l2_variant(const TimeSeries& series, const FitConfig& config,
                                const Coefficients& warm_start) {
    return detail::fista(series, config, detail::DeltaBall::l2, &warm_start);
}

/// Ordinary least squares on lag columns plus polynomial-in-time columns
/// (normalized time i/T). Rank-deficient normal equations are resolved by the
/// minimum-norm pseudo-solution and flagged.
inline FitResult fit_polynomial_baseline(const TimeSeries& series, int degree) {
    if (degree < 0) throw std::invalid_argument("fit_polynomial_baseline: degree must be >= 0");
    const int T = series.length();
    const int p = series.order();
    const int k = p + degree + 1;
    if (k >= T) throw std::invalid_argument("fit_polynomial_baseline: need degree + p + 1 < T");

    // design columns: lags, then (i/T)^d
    std::vector<double> cols(static_cast<std::size_t>(k) * T);
    for (int j = 0; j < p; ++j)
        for (int i = 1; i <= T; ++i)
            cols[static_cast<std::size_t>(j) * T + i - 1] = series.at(i - (j + 1));
    for (int d = 0; d <= degree; ++d)
        for (int i = 1; i <= T; ++i)
            cols[static_cast<std::size_t>(p + d) * T + i - 1] =
                std::pow(static_cast<double>(i) / static_cast<double>(T), d);

    std::vector<double> h(static_cast<std::size_t>(k) * k);
    std::vector<double> rhs(static_cast<std::size_t>(k));
    const auto& obs = series.values();
    for (int a = 0; a < k; ++a) {
        std::span<const double> ca(&cols[static_cast<std::size_t>(a) * T], static_cast<std::size_t>(T));
        for (int b = a; b < k; ++b) {
            std::span<const double> cb(&cols[static_cast<std::size_t>(b) * T], static_cast<std::size_t>(T));
            const double val = dot(ca, cb);
            h[static_cast<std::size_t>(a) * k + b] = val;
            h[static_cast<std::size_t>(b) * k + a] = val;
        }
        rhs[static_cast<std::size_t>(a)] = dot(ca, obs);
    }

    std::vector<double> vecs;
    std::vector<double> hwork = h;
    detail::jacobi_eigen_symmetric(hwork, k, vecs);
    double max_eig = 0.0;
    for (int i = 0; i < k; ++i)
        max_eig = std::max(max_eig, std::abs(hwork[static_cast<std::size_t>(i) * k + i]));
    const double cut = max_eig * static_cast<double>(k) * 1e-12;

    std::vector<double> coef(static_cast<std::size_t>(k), 0.0);
    bool deficient = false;
    for (int e = 0; e < k; ++e) {
        const double lambda = hwork[static_cast<std::size_t>(e) * k + e];
        if (lambda <= cut) {
            deficient = true;
            continue;
        }
        double proj = 0.0;
        for (int i = 0; i < k; ++i) proj += vecs[static_cast<std::size_t>(i) * k + e] * rhs[static_cast<std::size_t>(i)];
        proj /= lambda;
        for (int i = 0; i < k; ++i) coef[static_cast<std::size_t>(i)] += proj * vecs[static_cast<std::size_t>(i) * k + e];
    }

    FitResult result;
    result.rank_deficient = deficient;
    result.converged = true;
    result.iterations = 0;
    result.coefficients.alpha.assign(coef.begin(), coef.begin() + p);
    std::vector<double> background(static_cast<std::size_t>(T));
    for (int i = 1; i <= T; ++i) {
        double f = 0.0;
        for (int d = 0; d <= degree; ++d)
            f += coef[static_cast<std::size_t>(p + d)] *
                 std::pow(static_cast<double>(i) / static_cast<double>(T), d);
        background[static_cast<std::size_t>(i - 1)] = f;
    }
    result.coefficients.mu = background[0];
    result.coefficients.delta.resize(static_cast<std::size_t>(T - 1));
    for (int i = 1; i < T; ++i)
        result.coefficients.delta[static_cast<std::size_t>(i - 1)] =
            background[static_cast<std::size_t>(i)] - background[static_cast<std::size_t>(i - 1)];

    result.residuals.resize(static_cast<std::size_t>(T));
    double ss = 0.0;
    for (int i = 1; i <= T; ++i) {
        double fitted = background[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= p; ++j) fitted += result.coefficients.alpha[static_cast<std::size_t>(j - 1)] * series.at(i - j);
        const double r = obs[static_cast<std::size_t>(i - 1)] - fitted;
        result.residuals[static_cast<std::size_t>(i - 1)] = r;
        ss += r * r;
    }
    result.objective = ss / (2.0 * static_cast<double>(T));

    // gradient residual of the normal equations, on the solver's (1/T) scale
    double gap = 0.0;
    for (int a = 0; a < k; ++a) {
        double hc = 0.0;
        for (int b = 0; b < k; ++b) hc += h[static_cast<std::size_t>(a) * k + b] * coef[static_cast<std::size_t>(b)];
        gap = std::max(gap, std::abs(hc - rhs[static_cast<std::size_t>(a)]));
    }
    result.kkt_gap = gap / static_cast<double>(T);
    return result;
}

}  // namespace tvar
