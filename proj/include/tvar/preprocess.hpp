#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tvar/numeric.hpp"

namespace tvar {

struct CleanReport {
    int n_missing = 0;
    int n_outliers = 0;
    double median_used = 0.0;
    std::vector<int> outlier_indices;
};

/// Outlier flagging and median imputation for raw single-column data.
/// A value is an outlier when |x - median| > 10 * IQR, both statistics taken
/// over the non-missing values (quartiles by linear interpolation of order
/// statistics). Missing values and outliers are replaced by the median of the
/// remaining normal observations.
inline std::pair<std::vector<double>, CleanReport> clean(
    const std::vector<std::optional<double>>& raw) {
    std::vector<double> present;
    present.reserve(raw.size());
    for (const auto& v : raw)
        if (v.has_value()) present.push_back(*v);
    if (present.size() < 4) throw std::invalid_argument("clean: need at least 4 usable values");

    std::vector<double> sorted = present;
    std::sort(sorted.begin(), sorted.end());
    const double med = quantile_sorted(sorted, 0.5);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double cutoff = 10.0 * iqr;

    CleanReport report;
    std::vector<double> normal;
    normal.reserve(present.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!raw[i].has_value()) {
            ++report.n_missing;
        } else if (std::abs(*raw[i] - med) > cutoff) {
            ++report.n_outliers;
            report.outlier_indices.push_back(static_cast<int>(i));
        } else {
            normal.push_back(*raw[i]);
        }
    }
    report.median_used = median(normal);

    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const bool outlier = raw[i].has_value() && std::abs(*raw[i] - med) > cutoff;
        out[i] = (!raw[i].has_value() || outlier) ? report.median_used : *raw[i];
    }
    return {std::move(out), std::move(report)};
}

}  // namespace tvar
