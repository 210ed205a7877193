#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "raincast/errors.hpp"
#include "raincast/lasso.hpp"
#include "raincast/panel.hpp"
#include "raincast/spatial.hpp"

namespace raincast {

// Annual totals per district for a closed year range (panel must cover it
// with whole years).
inline std::vector<double> annual_totals(const RainfallPanel& panel, std::size_t d,
                                         int first_year, int last_year) {
    if (panel.months.front().month != 1)
        throw Error("annual totals need a panel starting in January");
    std::vector<double> totals;
    for (int y = first_year; y <= last_year; ++y) {
        const std::size_t start = panel.month_index(YearMonth{y, 1});
        const std::size_t end = panel.month_index(YearMonth{y, 12});
        double total = 0.0;
        for (std::size_t t = start; t <= end; ++t) total += panel.values[d][t];
        totals.push_back(total);
    }
    return totals;
}

// Baseline mean and SD (population) of annual rainfall per district.
struct SpiBaseline {
    std::vector<std::string> districts;
    std::vector<double> mean;
    std::vector<double> sd;
    int first_year = 1900;
    int last_year = 1970;
};

inline SpiBaseline spi_baseline(const RainfallPanel& panel, int first_year, int last_year) {
    if (last_year <= first_year) throw Error("spi baseline range is empty");
    SpiBaseline baseline;
    baseline.districts = panel.districts;
    baseline.first_year = first_year;
    baseline.last_year = last_year;
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        const std::vector<double> totals = annual_totals(panel, d, first_year, last_year);
        double mean = 0.0;
        for (double v : totals) mean += v;
        mean /= static_cast<double>(totals.size());
        double var = 0.0;
        for (double v : totals) var += (v - mean) * (v - mean);
        var /= static_cast<double>(totals.size());
        baseline.mean.push_back(mean);
        baseline.sd.push_back(std::sqrt(var));
    }
    return baseline;
}

inline double spi(double annual, const SpiBaseline& baseline, std::size_t d) {
    if (!(baseline.sd[d] > 0.0))
        throw DegenerateBaselineError("zero baseline SD for district " + baseline.districts[d]);
    return (annual - baseline.mean[d]) / baseline.sd[d];
}

inline constexpr double kSpiThreshold = 1.65;

struct ExtremeCounts {
    int heavy = 0; // SPI > 1.65
    int light = 0; // SPI < -1.65
};

inline std::vector<ExtremeCounts> count_extreme_years(const RainfallPanel& panel,
                                                      const SpiBaseline& baseline,
                                                      int first_year, int last_year) {
    std::vector<ExtremeCounts> counts(panel.district_count());
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        const std::vector<double> totals = annual_totals(panel, d, first_year, last_year);
        for (double total : totals) {
            const double z = spi(total, baseline, d);
            if (z > kSpiThreshold) ++counts[d].heavy;
            else if (z < -kSpiThreshold) ++counts[d].light;
        }
    }
    return counts;
}

struct YearRange {
    int first = 0;
    int last = 0;
};

// OLS slope of annual totals within each decade, per district.
inline std::vector<std::vector<double>> decadal_slopes(const RainfallPanel& panel,
                                                       const std::vector<YearRange>& decades) {
    std::vector<std::vector<double>> slopes(panel.district_count());
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        for (const YearRange& range : decades) {
            if (range.last - range.first + 1 < 2)
                throw TooFewPointsError("decade shorter than 2 years");
            slopes[d].push_back(fit_ols_slope(annual_totals(panel, d, range.first, range.last)));
        }
    }
    return slopes;
}

// Pearson correlation; NaN for constant (undefined) inputs.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 3)
        throw LengthMismatchError("pearson needs aligned series of >= 3 points");
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(a.size());
    mean_b /= static_cast<double>(a.size());
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a, db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(var_a * var_b);
}

// Named series extractors for the distance-correlation analysis. Yearly
// skewness and kurtosis are the population third/fourth standardized moments
// of the 12 monthly values.
inline std::vector<double> metric_series(const RainfallPanel& panel, std::size_t d,
                                         const std::string& metric, std::size_t month_limit) {
    const std::size_t T = month_limit == 0 ? panel.month_count() : month_limit;
    if (metric == "monthly")
        return {panel.values[d].begin(), panel.values[d].begin() + static_cast<std::ptrdiff_t>(T)};
    const std::size_t years = T / 12;
    std::vector<double> out;
    out.reserve(years);
    for (std::size_t y = 0; y < years; ++y) {
        const double* months = &panel.values[d][y * 12];
        double mean = 0.0;
        for (int j = 0; j < 12; ++j) mean += months[j];
        mean /= 12.0;
        if (metric == "yearly_mean") {
            out.push_back(mean);
            continue;
        }
        if (metric == "monsoon_total") {
            double total = 0.0;
            for (int j = 5; j <= 8; ++j) total += months[j];
            out.push_back(total);
            continue;
        }
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (int j = 0; j < 12; ++j) {
            const double dv = months[j] - mean;
            m2 += dv * dv;
            m3 += dv * dv * dv;
            m4 += dv * dv * dv * dv;
        }
        m2 /= 12.0;
        m3 /= 12.0;
        m4 /= 12.0;
        const double sd = std::sqrt(m2);
        if (metric == "yearly_sd") out.push_back(sd);
        else if (metric == "yearly_skewness")
            out.push_back(m2 > 0.0 ? m3 / (sd * sd * sd) : std::numeric_limits<double>::quiet_NaN());
        else if (metric == "yearly_kurtosis")
            out.push_back(m2 > 0.0 ? m4 / (m2 * m2) : std::numeric_limits<double>::quiet_NaN());
        else
            throw ConfigError("unknown correlation metric: " + metric);
    }
    return out;
}

struct DistancePoint {
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    double distance_km = 0.0;
    double r = 0.0;
    bool defined = true;
};

// One row per unordered district pair: centroid distance and the Pearson
// correlation of the chosen metric's series.
inline std::vector<DistancePoint> correlation_vs_distance(const RainfallPanel& panel,
                                                          const DistrictGraph& graph,
                                                          const std::string& metric,
                                                          std::size_t month_limit = 0) {
    const std::size_t D = panel.district_count();
    std::vector<std::vector<double>> series(D);
    for (std::size_t d = 0; d < D; ++d) series[d] = metric_series(panel, d, metric, month_limit);
    std::vector<DistancePoint> points;
    points.reserve(D * (D - 1) / 2);
    for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = i + 1; j < D; ++j) {
            DistancePoint point;
            point.d1 = i;
            point.d2 = j;
            point.distance_km = graph.distances_km[i][j];
            point.r = pearson(series[i], series[j]);
            point.defined = std::isfinite(point.r);
            points.push_back(point);
        }
    }
    return points;
}

} // namespace raincast
