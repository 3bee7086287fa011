#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvar/numeric.hpp"
#include "tvar/special.hpp"

namespace tvar {

enum class PortmanteauTest { ljung_box, durbin_watson };

struct PortmanteauResult {
    double statistic = 0.0;  // Q for Ljung-Box, d for Durbin-Watson
    int lags = 0;
    double p_value = 1.0;
    PortmanteauTest test = PortmanteauTest::ljung_box;
};

/// Sample autocorrelation rho_k = gamma(k)/gamma(0) with
/// gamma(k) = (1/T) sum_{t=1}^{T-k} (x_{t+k} - xbar)(x_t - xbar).
/// rho_0 = 1 by definition; a zero-variance series returns 0 for k >= 1.
inline double sample_acf(std::span<const double> x, int k) {
    const int T = static_cast<int>(x.size());
    if (T < 2) throw std::invalid_argument("sample_acf: need at least 2 observations");
    if (k < 0 || k >= T) throw std::invalid_argument("sample_acf: need 0 <= k < T");
    if (k == 0) return 1.0;
    const double xbar = mean(x);
    double g0 = 0.0;
    for (double v : x) g0 += (v - xbar) * (v - xbar);
    if (g0 == 0.0) return 0.0;
    double gk = 0.0;
    for (int t = 0; t + k < T; ++t)
        gk += (x[static_cast<std::size_t>(t + k)] - xbar) * (x[static_cast<std::size_t>(t)] - xbar);
    return gk / g0;
}

/// Ljung-Box portmanteau test: Q = T(T+2) sum_{k=1}^{h} rho_k^2 / (T-k),
/// compared against the chi-squared upper tail with h degrees of freedom.
inline PortmanteauResult ljung_box(std::span<const double> x, int h) {
    const int T = static_cast<int>(x.size());
    if (h < 1) throw std::invalid_argument("ljung_box: need h >= 1");
    if (h >= T) throw std::invalid_argument("ljung_box: need h < T");
    double q = 0.0;
    for (int k = 1; k <= h; ++k) {
        const double rho = sample_acf(x, k);
        q += rho * rho / static_cast<double>(T - k);
    }
    q *= static_cast<double>(T) * static_cast<double>(T + 2);
    PortmanteauResult res;
    res.statistic = q;
    res.lags = h;
    res.p_value = chi_squared_tail(q, static_cast<double>(h));
    res.test = PortmanteauTest::ljung_box;
    return res;
}

/// Durbin-Watson test: d = sum_{t=2}^{T} (e_t - e_{t-1})^2 / sum e_t^2 in [0,4].
/// The p-value uses the normal approximation rho_1 ~ 1 - d/2, z = rho_1 sqrt(T).
/// A zero-variance input is reported as d = 2, p = 1 (no autocorrelation evidence).
inline PortmanteauResult durbin_watson(std::span<const double> x) {
    const int T = static_cast<int>(x.size());
    if (T < 3) throw std::invalid_argument("durbin_watson: need at least 3 observations");
    double denom = 0.0;
    for (double v : x) denom += v * v;
    PortmanteauResult res;
    res.lags = 1;
    res.test = PortmanteauTest::durbin_watson;
    if (denom == 0.0) {
        res.statistic = 2.0;
        res.p_value = 1.0;
        return res;
    }
    double num = 0.0;
    for (int t = 1; t < T; ++t) {
        const double d = x[static_cast<std::size_t>(t)] - x[static_cast<std::size_t>(t - 1)];
        num += d * d;
    }
    res.statistic = std::clamp(num / denom, 0.0, 4.0);
    const double rho1 = 1.0 - res.statistic / 2.0;
    const double z = rho1 * std::sqrt(static_cast<double>(T));
    res.p_value = normal_two_sided_p(z);
    return res;
}

/// Shifted-log transform of a residual sequence. When min(r) < 0 the shift is
/// -1.1*min(r) so every argument is strictly positive; otherwise a positive
/// offset 0.1*(1 + |max(r)|) is added before taking logs. Strictly increasing
/// either way.
inline std::vector<double> shifted_log_transform(std::span<const double> r) {
    if (r.empty()) throw std::invalid_argument("shifted_log_transform: empty input");
    const double lo = *std::min_element(r.begin(), r.end());
    const double hi = *std::max_element(r.begin(), r.end());
    const double shift = lo < 0.0 ? -1.1 * lo : 0.1 * (1.0 + std::abs(hi));
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        out[i] = std::log(r[i] + shift);
        if (!std::isfinite(out[i]))
            throw std::domain_error("shifted_log_transform: non-finite output at index " +
                                    std::to_string(i));
    }
    return out;
}

}  // namespace tvar
