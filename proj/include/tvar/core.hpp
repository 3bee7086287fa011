#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tvar/numeric.hpp"
#include "tvar/rng.hpp"

namespace tvar {

/// Observed sequence x_1..x_T together with the known pre-sample history
/// x_{1-p}..x_0 and the autoregressive order p. Immutable after construction.
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, std::vector<double> history)
        : values_(std::move(values)), history_(std::move(history)) {
        if (history_.empty()) throw std::invalid_argument("TimeSeries: history must have length p >= 1");
        if (values_.size() < history_.size() + 2)
            throw std::invalid_argument("TimeSeries: need T >= p + 2 observations");
        if (!all_finite(values_) || !all_finite(history_))
            throw std::invalid_argument("TimeSeries: all entries must be finite");
    }

    int length() const { return static_cast<int>(values_.size()); }
    int order() const { return static_cast<int>(history_.size()); }

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& history() const { return history_; }

    /// x_i for i in {1-p, ..., T}, 1-indexed as in the model recursion.
    double at(int i) const {
        if (i >= 1) return values_[static_cast<std::size_t>(i - 1)];
        return history_[static_cast<std::size_t>(i - 1 + order())];
    }

private:
    std::vector<double> values_;
    std::vector<double> history_;
};

/// Parameter vector beta = (alpha_1..alpha_p, mu, Delta_2..Delta_T) split into
/// its named parts. mu is the initial background level f_1 and Delta_i the
/// one-step background changes, so the full vector has length T + p.
struct Coefficients {
    std::vector<double> alpha;
    double mu = 0.0;
    std::vector<double> delta;

    int order() const { return static_cast<int>(alpha.size()); }
    int length() const { return static_cast<int>(delta.size()) + 1; }  // T

    std::vector<double> flatten() const {
        std::vector<double> beta;
        beta.reserve(alpha.size() + 1 + delta.size());
        beta.insert(beta.end(), alpha.begin(), alpha.end());
        beta.push_back(mu);
        beta.insert(beta.end(), delta.begin(), delta.end());
        return beta;
    }

    static Coefficients unflatten(std::span<const double> beta, int p) {
        if (static_cast<int>(beta.size()) < p + 1)
            throw std::invalid_argument("Coefficients: flat vector shorter than p + 1");
        Coefficients c;
        c.alpha.assign(beta.begin(), beta.begin() + p);
        c.mu = beta[static_cast<std::size_t>(p)];
        c.delta.assign(beta.begin() + p + 1, beta.end());
        return c;
    }
};

/// Cumulative background reconstruction: f_1 = mu, f_i = f_{i-1} + Delta_i.
inline std::vector<double> reconstruct_background(const Coefficients& c) {
    std::vector<double> f(c.delta.size() + 1);
    f[0] = c.mu;
    for (std::size_t i = 0; i < c.delta.size(); ++i) f[i + 1] = f[i] + c.delta[i];
    return f;
}

/// Implicit design matrix X = (x_{0:T-1}, ..., x_{1-p:T-p}, L) where L is the
/// lower-triangular all-ones matrix. Lag column j holds x_{1-j..T-j}. Products
/// with X and X^T run in O(T*p) using running sums; L is never materialized.
class DesignOperator {
public:
    explicit DesignOperator(const TimeSeries& series) : series_(&series) {}

    int rows() const { return series_->length(); }
    int cols() const { return series_->length() + series_->order(); }
    const TimeSeries& series() const { return *series_; }

    /// out_i = sum_j alpha_j x_{i-j} + f_i with f the cumulative background.
    /// beta is the flat layout (alpha_1..alpha_p, mu, Delta_2..Delta_T).
    void apply(std::span<const double> beta, std::span<double> out) const {
        const int T = rows();
        const int p = series_->order();
        if (static_cast<int>(beta.size()) != T + p || static_cast<int>(out.size()) != T)
            throw std::invalid_argument("DesignOperator::apply: dimension mismatch");
        double f = beta[static_cast<std::size_t>(p)];  // f_1 = mu
        for (int i = 1; i <= T; ++i) {
            if (i >= 2) f += beta[static_cast<std::size_t>(p + i - 1)];  // + Delta_i
            double acc = f;
            for (int j = 1; j <= p; ++j) acc += beta[static_cast<std::size_t>(j - 1)] * series_->at(i - j);
            out[static_cast<std::size_t>(i - 1)] = acc;
        }
    }

    /// out = X^T r. The L-block entries are reversed cumulative sums of r.
    void apply_adjoint(std::span<const double> r, std::span<double> out) const {
        const int T = rows();
        const int p = series_->order();
        if (static_cast<int>(r.size()) != T || static_cast<int>(out.size()) != T + p)
            throw std::invalid_argument("DesignOperator::apply_adjoint: dimension mismatch");
        for (int j = 1; j <= p; ++j) {
            double acc = 0.0;
            for (int i = 1; i <= T; ++i) acc += r[static_cast<std::size_t>(i - 1)] * series_->at(i - j);
            out[static_cast<std::size_t>(j - 1)] = acc;
        }
        // tail[k] = sum_{i=k}^{T} r_i, filled right to left
        double tail = 0.0;
        for (int k = T; k >= 2; --k) {
            tail += r[static_cast<std::size_t>(k - 1)];
            out[static_cast<std::size_t>(p + k - 1)] = tail;
        }
        out[static_cast<std::size_t>(p)] = tail + r[0];  // mu column is all ones
    }

    std::vector<double> forward(const Coefficients& c) const {
        if (c.order() != series_->order() || c.length() != series_->length())
            throw std::invalid_argument("DesignOperator::forward: coefficient shape mismatch");
        std::vector<double> out(static_cast<std::size_t>(rows()));
        apply(c.flatten(), out);
        return out;
    }

    std::vector<double> adjoint(std::span<const double> r) const {
        std::vector<double> out(static_cast<std::size_t>(cols()));
        apply_adjoint(r, out);
        return out;
    }

private:
    const TimeSeries* series_;
};

enum class NoiseKind { gaussian, uniform_centered, rademacher_scaled };

/// Mean-zero noise family with variance sigma0_sq.
struct NoiseModel {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma0_sq = 1.0;

    double sample(Rng& rng) const {
        if (sigma0_sq < 0.0) throw std::invalid_argument("NoiseModel: sigma0_sq must be >= 0");
        const double sigma = std::sqrt(sigma0_sq);
        switch (kind) {
            case NoiseKind::gaussian:
                return sigma * rng.normal();
            case NoiseKind::uniform_centered:
                // [-a, a] with a = sigma * sqrt(3) has variance sigma^2
                return sigma * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
            case NoiseKind::rademacher_scaled:
                return sigma * rng.rademacher();
        }
        throw std::logic_error("NoiseModel: unknown kind");
    }
};

}  // namespace tvar
