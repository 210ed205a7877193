#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "raincast/errors.hpp"
#include "raincast/forecast.hpp"
#include "raincast/panel.hpp"

namespace raincast {

// Symmetric MAPE in percent, bounded in [0, 200]. A month where both actual
// and forecast are zero contributes nothing.
inline double smape(const std::vector<double>& actual, const std::vector<double>& forecast) {
    if (actual.size() != forecast.size() || actual.empty())
        throw LengthMismatchError("smape: series lengths differ or are empty");
    double acc = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double denom = (std::fabs(forecast[t]) + std::fabs(actual[t])) / 2.0;
        if (denom == 0.0) continue; // both zero
        acc += std::fabs(forecast[t] - actual[t]) / denom;
    }
    return 100.0 * acc / static_cast<double>(actual.size());
}

inline double rmse(const std::vector<double>& actual, const std::vector<double>& forecast) {
    if (actual.size() != forecast.size() || actual.empty())
        throw LengthMismatchError("rmse: series lengths differ or are empty");
    double acc = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double r = forecast[t] - actual[t];
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

inline double nrmse(const std::vector<double>& actual, const std::vector<double>& forecast,
                    double normalizer_sd) {
    if (!(normalizer_sd > 0.0)) throw ZeroNormalizerError("nrmse: normalizer must be > 0");
    return rmse(actual, forecast) / normalizer_sd;
}

// Population standard deviation.
inline double population_sd(const std::vector<double>& values) {
    if (values.empty()) throw LengthMismatchError("sd of empty series");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

// ---------------------------------------------------------------------------
// Expanding-window fold construction

struct Fold {
    std::size_t train_len;  // months [0, train_len) are training
    std::size_t val_start;  // 0-based first validation month (== train_len)
    std::size_t val_end;    // 0-based last validation month, inclusive
};

struct FoldPlan {
    std::size_t fold_count = 0;
    std::size_t val_len = 0;
    std::vector<Fold> folds;
};

// Fold i (1-based) starts its validation block at
// s_i = T0 - K*h_val + (i-1)*h_val + 1 in 1-based months and trains on
// everything before it. The K blocks tile the last K*h_val training months.
inline FoldPlan build_folds(std::size_t training_len, std::size_t fold_count,
                            std::size_t val_len) {
    if (fold_count == 0 || val_len == 0) throw TooShortError("build_folds: empty fold plan");
    if (training_len <= fold_count * val_len)
        throw TooShortError("build_folds: training window shorter than the validation blocks");
    FoldPlan plan;
    plan.fold_count = fold_count;
    plan.val_len = val_len;
    for (std::size_t i = 1; i <= fold_count; ++i) {
        const std::size_t start_one_based =
            training_len - fold_count * val_len + (i - 1) * val_len + 1;
        Fold fold;
        fold.val_start = start_one_based - 1;
        fold.train_len = fold.val_start;
        fold.val_end = fold.val_start + val_len - 1;
        plan.folds.push_back(fold);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Cross-validation scoring

// A forecaster bound to a panel: given a fold's training length, produce a
// D x horizon forecast using only months before `train_len`.
using FoldForecaster =
    std::function<std::vector<std::vector<double>>(std::size_t train_len, std::size_t horizon)>;

// Mean over folds of the mean-over-districts NRMSE, each district normalized
// by its validation-period SD. A fold failure poisons the score (+inf).
inline double cv_score_with(const RainfallPanel& panel, const FoldPlan& plan,
                            const FoldForecaster& forecaster,
                            std::vector<double>* fold_scores = nullptr) {
    const std::size_t D = panel.district_count();
    double total = 0.0;
    for (const Fold& fold : plan.folds) {
        double fold_score;
        try {
            const auto forecast = forecaster(fold.train_len, plan.val_len);
            double acc = 0.0;
            for (std::size_t d = 0; d < D; ++d) {
                std::vector<double> actual(panel.values[d].begin() +
                                               static_cast<std::ptrdiff_t>(fold.val_start),
                                           panel.values[d].begin() +
                                               static_cast<std::ptrdiff_t>(fold.val_end + 1));
                acc += nrmse(actual, forecast[d], population_sd(actual));
            }
            fold_score = acc / static_cast<double>(D);
        } catch (const std::exception&) {
            fold_score = std::numeric_limits<double>::infinity();
        }
        if (fold_scores) fold_scores->push_back(fold_score);
        if (std::isinf(fold_score)) return std::numeric_limits<double>::infinity();
        total += fold_score;
    }
    return total / static_cast<double>(plan.folds.size());
}

enum class ModelFamily { Naive, Stlm, Hstm };

inline ModelFamily model_family_from_name(const std::string& name) {
    if (name == "naive") return ModelFamily::Naive;
    if (name == "stlm") return ModelFamily::Stlm;
    if (name == "hstm") return ModelFamily::Hstm;
    throw ConfigError("unknown model family: " + name);
}

struct ModelConfig {
    ModelFamily family = ModelFamily::Naive;
    StlmConfig stlm;
    HstmConfig hstm;
};

inline FoldForecaster bind_forecaster(const ModelConfig& config, const RainfallPanel& panel,
                                      const DistrictGraph& graph) {
    switch (config.family) {
        case ModelFamily::Naive:
            return [&panel](std::size_t train_len, std::size_t horizon) {
                return naive_forecast(panel, train_len, horizon).values;
            };
        case ModelFamily::Stlm:
            return [&panel, &graph, stlm = config.stlm](std::size_t train_len,
                                                        std::size_t horizon) {
                const StlmModel model = stlm_fit(panel, graph, stlm, train_len);
                return stlm_forecast(model, panel, graph, train_len, horizon).values;
            };
        case ModelFamily::Hstm:
            return [&panel, &graph, hstm = config.hstm](std::size_t train_len,
                                                        std::size_t horizon) {
                return hstm_fit_forecast(panel, graph, hstm, train_len, horizon).values;
            };
    }
    throw ConfigError("unreachable model family");
}

inline double cv_score(const ModelConfig& config, const RainfallPanel& panel,
                       const DistrictGraph& graph, const FoldPlan& plan,
                       std::vector<double>* fold_scores = nullptr) {
    return cv_score_with(panel, plan, bind_forecaster(config, panel, graph), fold_scores);
}

// ---------------------------------------------------------------------------
// Holdout evaluation

struct EvalReport {
    std::vector<std::string> districts;
    std::vector<double> smape_pct;             // per district
    std::vector<double> nrmse_values;          // per district
    std::vector<int> years;                    // year labels of the columns below
    std::vector<std::vector<double>> yearwise_smape; // D x years (possibly partial last year)
    double mean_smape = 0.0;
    double mean_nrmse = 0.0;
};

// District sMAPE and NRMSE over the forecast months plus a district-by-year
// sMAPE matrix. The NRMSE normalizer is the training-period SD by default
// (`validation` normalizes by the evaluated period's own SD instead).
inline EvalReport holdout_evaluate(const ForecastResult& forecast, const RainfallPanel& panel,
                                   const std::string& normalizer = "train") {
    if (forecast.districts != panel.districts)
        throw MisalignmentError("forecast districts do not match the panel");
    const std::size_t origin = panel.month_index(forecast.origin);
    if (origin != panel.train_end)
        throw MisalignmentError("forecast origin " + forecast.origin.label() +
                                " is not the panel train end");
    const std::size_t train_len = origin + 1;
    const std::size_t H = forecast.horizon;
    if (train_len + H > panel.month_count())
        throw MisalignmentError("forecast horizon extends past the observed panel");
    if (normalizer != "train" && normalizer != "validation")
        throw ConfigError("normalizer must be 'train' or 'validation'");

    EvalReport report;
    report.districts = panel.districts;
    const std::size_t D = panel.district_count();
    for (std::size_t d = 0; d < D; ++d) {
        std::vector<double> actual(panel.values[d].begin() + static_cast<std::ptrdiff_t>(train_len),
                                   panel.values[d].begin() +
                                       static_cast<std::ptrdiff_t>(train_len + H));
        const std::vector<double>& predicted = forecast.values[d];
        report.smape_pct.push_back(smape(actual, predicted));
        std::vector<double> train_side(panel.values[d].begin(),
                                       panel.values[d].begin() +
                                           static_cast<std::ptrdiff_t>(train_len));
        const double sd =
            normalizer == "train" ? population_sd(train_side) : population_sd(actual);
        report.nrmse_values.push_back(nrmse(actual, predicted, sd));

        std::vector<double> yearly;
        for (std::size_t start = 0; start < H; start += 12) {
            const std::size_t stop = std::min(start + 12, H);
            std::vector<double> a(actual.begin() + static_cast<std::ptrdiff_t>(start),
                                  actual.begin() + static_cast<std::ptrdiff_t>(stop));
            std::vector<double> p(predicted.begin() + static_cast<std::ptrdiff_t>(start),
                                  predicted.begin() + static_cast<std::ptrdiff_t>(stop));
            yearly.push_back(smape(a, p));
        }
        report.yearwise_smape.push_back(std::move(yearly));
    }
    for (std::size_t start = 0; start < H; start += 12)
        report.years.push_back(forecast.months[start].year);
    for (std::size_t d = 0; d < D; ++d) {
        report.mean_smape += report.smape_pct[d];
        report.mean_nrmse += report.nrmse_values[d];
    }
    report.mean_smape /= static_cast<double>(D);
    report.mean_nrmse /= static_cast<double>(D);
    return report;
}

// Percentage reduction of each metric relative to a reference report:
// 100*(reference - candidate)/reference, positive when the candidate improves.
struct ImprovementTable {
    std::vector<std::string> districts;
    std::vector<double> smape_gain_pct;
    std::vector<double> nrmse_gain_pct;
};

inline ImprovementTable improvement_table(const EvalReport& reference,
                                          const EvalReport& candidate) {
    if (reference.districts != candidate.districts)
        throw MisalignmentError("improvement table: district sets differ");
    ImprovementTable table;
    table.districts = reference.districts;
    for (std::size_t d = 0; d < reference.districts.size(); ++d) {
        table.smape_gain_pct.push_back(
            100.0 * (reference.smape_pct[d] - candidate.smape_pct[d]) / reference.smape_pct[d]);
        table.nrmse_gain_pct.push_back(100.0 * (reference.nrmse_values[d] -
                                                candidate.nrmse_values[d]) /
                                       reference.nrmse_values[d]);
    }
    return table;
}

} // namespace raincast
