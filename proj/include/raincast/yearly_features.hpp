#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "raincast/csv.hpp"
#include "raincast/errors.hpp"
#include "raincast/panel.hpp"

namespace raincast {

inline constexpr std::size_t kFeatureCount = 9;

enum class Feature : std::size_t {
    Total = 0,
    MonsoonTotal,
    Entropy,
    Sd,
    Centroid,
    Max,
    Q1,
    Q2,
    Q3,
};

inline const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "total", "monsoon_total", "entropy", "sd", "centroid", "max", "q1", "q2", "q3"};
    return names;
}

inline std::size_t feature_index(const std::string& name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw ConfigError("unknown yearly feature: " + name);
}

// Per-district, per-year feature values. `raw` always present; `smoothed`
// filled once spans are applied.
struct YearlyFeatureTable {
    std::vector<std::string> districts;
    int first_year = 0;
    std::size_t year_count = 0;
    // [district][year][feature]
    std::vector<std::vector<std::array<double, kFeatureCount>>> raw;
    std::vector<std::vector<std::array<double, kFeatureCount>>> smoothed;
    std::array<int, kFeatureCount> spans = {1, 1, 1, 1, 1, 1, 1, 1, 1};
};

// The nine summaries of one year's twelve monthly totals. A zero-rain year
// has no defined distribution; it falls back to the uniform convention
// (entropy 1, centroid 6.5, quarters 0.25) so downstream regressors stay
// finite.
inline std::array<double, kFeatureCount> year_features(const double* months,
                                                       bool* degenerate = nullptr) {
    std::array<double, kFeatureCount> f{};
    double total = 0.0, monsoon = 0.0, maxv = 0.0;
    for (int j = 0; j < 12; ++j) {
        total += months[j];
        if (j >= 5 && j <= 8) monsoon += months[j]; // June..September
        maxv = std::max(maxv, months[j]);
    }
    f[std::size_t(Feature::Total)] = total;
    f[std::size_t(Feature::MonsoonTotal)] = monsoon;
    f[std::size_t(Feature::Max)] = maxv;

    double mean = total / 12.0;
    double var = 0.0;
    for (int j = 0; j < 12; ++j) var += (months[j] - mean) * (months[j] - mean);
    f[std::size_t(Feature::Sd)] = std::sqrt(var / 12.0);

    if (total <= 0.0) {
        if (degenerate) *degenerate = true;
        f[std::size_t(Feature::Entropy)] = 1.0;
        f[std::size_t(Feature::Centroid)] = 6.5;
        f[std::size_t(Feature::Q1)] = 0.25;
        f[std::size_t(Feature::Q2)] = 0.25;
        f[std::size_t(Feature::Q3)] = 0.25;
        return f;
    }
    if (degenerate) *degenerate = false;

    // Entropy via 1 - sum p*log(12 p)/log 12, algebraically equal to
    // -(1/log 12) * sum p*log p and exact at the uniform and one-month
    // extremes. Terms with p=0 contribute 0 (limit convention).
    double divergence = 0.0;
    double centroid = 0.0;
    for (int j = 0; j < 12; ++j) {
        const double p = months[j] / total;
        if (p > 0.0) divergence += p * std::log(12.0 * p);
        centroid += (j + 1) * p;
    }
    double entropy = 1.0 - divergence / std::log(12.0);
    f[std::size_t(Feature::Entropy)] = std::clamp(entropy, 0.0, 1.0);
    f[std::size_t(Feature::Centroid)] = centroid;
    for (int q = 0; q < 3; ++q) {
        double qsum = 0.0;
        for (int j = 3 * q; j < 3 * q + 3; ++j) qsum += months[j];
        f[std::size_t(Feature::Q1) + static_cast<std::size_t>(q)] = qsum / total;
    }
    return f;
}

// Raw yearly features over the panel's whole years starting at its first
// month. Requires the panel to begin in January and cover >= 1 full year.
inline YearlyFeatureTable compute_yearly_features(const RainfallPanel& panel,
                                                  std::size_t month_limit = 0) {
    const std::size_t T = month_limit == 0 ? panel.month_count() : month_limit;
    if (panel.months.empty() || panel.months.front().month != 1)
        throw Error("yearly features need a panel starting in January");
    const std::size_t years = T / 12;
    if (years == 0) throw Error("yearly features need at least one full year");

    YearlyFeatureTable table;
    table.districts = panel.districts;
    table.first_year = panel.months.front().year;
    table.year_count = years;
    table.raw.resize(panel.district_count());
    table.smoothed.resize(panel.district_count());
    bool warned = false;
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        table.raw[d].resize(years);
        table.smoothed[d].resize(years);
        for (std::size_t y = 0; y < years; ++y) {
            bool degenerate = false;
            table.raw[d][y] = year_features(&panel.values[d][y * 12], &degenerate);
            if (degenerate && !warned) {
                std::cerr << "warning: zero-rainfall year " << (table.first_year + (int)y)
                          << " in district " << panel.districts[d]
                          << "; using the uniform-distribution convention\n";
                warned = true;
            }
            table.smoothed[d][y] = table.raw[d][y];
        }
    }
    return table;
}

// EMA with alpha = 2/(span+1), F_0 = x_0.
inline std::vector<double> ema_smooth(const std::vector<double>& series, int span) {
    if (series.empty()) throw Error("ema_smooth: empty series");
    if (span < 1) throw Error("ema_smooth: span must be >= 1");
    const double alpha = 2.0 / (span + 1.0);
    std::vector<double> out(series.size());
    out[0] = series[0];
    for (std::size_t t = 1; t < series.size(); ++t)
        out[t] = alpha * series[t] + (1.0 - alpha) * out[t - 1];
    return out;
}

// Fills `smoothed` from `raw` using one span per feature type, shared across
// districts.
inline void apply_spans(YearlyFeatureTable& table, const std::array<int, kFeatureCount>& spans) {
    table.spans = spans;
    for (std::size_t d = 0; d < table.districts.size(); ++d) {
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            std::vector<double> series(table.year_count);
            for (std::size_t y = 0; y < table.year_count; ++y) series[y] = table.raw[d][y][f];
            const std::vector<double> sm = ema_smooth(series, spans[f]);
            for (std::size_t y = 0; y < table.year_count; ++y) table.smoothed[d][y][f] = sm[y];
        }
    }
}

struct TrajectoryDescriptors {
    double slope = 0.0;
    double mean_diff = 0.0;
    double momentum = 0.5;
};

// Short-run descriptors of the window F[t-L'] .. F[t-1] with
// L' = min(L, t-1), using 1-based year indices as in the series' natural
// ordering (t is the year being predicted). A single-point window has no
// trend or direction: slope 0, mean_diff 0, momentum 0.5.
inline TrajectoryDescriptors descriptors_at(const std::vector<double>& series,
                                            std::size_t t_one_based, int window_length) {
    if (t_one_based < 2) throw WindowTooEarlyError("descriptors need t >= 2");
    if (window_length < 2) throw Error("descriptor window length must be >= 2");
    const std::size_t L = std::min<std::size_t>(static_cast<std::size_t>(window_length),
                                                t_one_based - 1);
    if (t_one_based - 1 > series.size())
        throw WindowTooEarlyError("descriptor window reaches past the series");
    const std::size_t begin = t_one_based - 1 - L; // 0-based start of window

    TrajectoryDescriptors out;
    double mean_y = 0.0;
    for (std::size_t j = 0; j < L; ++j) mean_y += series[begin + j];
    mean_y /= static_cast<double>(L);

    if (L >= 2) {
        const double mean_j = (static_cast<double>(L) + 1.0) / 2.0; // of 1..L
        double num = 0.0, den = 0.0;
        for (std::size_t j = 1; j <= L; ++j) {
            const double dj = static_cast<double>(j) - mean_j;
            num += dj * (series[begin + j - 1] - mean_y);
            den += dj * dj;
        }
        out.slope = num / den;
        std::size_t ups = 0;
        for (std::size_t j = 1; j < L; ++j)
            if (series[begin + j] - series[begin + j - 1] > 0.0) ++ups;
        out.momentum = static_cast<double>(ups) / static_cast<double>(L - 1);
    } else {
        out.slope = 0.0;
        out.momentum = 0.5;
    }
    out.mean_diff = series[begin + L - 1] - mean_y;
    return out;
}

// Long-format export: district, year, feature, raw, smoothed.
inline void write_feature_csv(const YearlyFeatureTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "district,year,feature,raw,smoothed\n";
    for (std::size_t d = 0; d < table.districts.size(); ++d) {
        for (std::size_t y = 0; y < table.year_count; ++y) {
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                out << csv_escape(table.districts[d]) << ","
                    << (table.first_year + static_cast<int>(y)) << ","
                    << feature_names()[f] << ","
                    << format_double(table.raw[d][y][f]) << ","
                    << format_double(table.smoothed[d][y][f]) << "\n";
            }
        }
    }
}

} // namespace raincast
