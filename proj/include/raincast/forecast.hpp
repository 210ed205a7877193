#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "raincast/errors.hpp"
#include "raincast/lasso.hpp"
#include "raincast/mlp.hpp"
#include "raincast/panel.hpp"
#include "raincast/rng.hpp"
#include "raincast/spatial.hpp"
#include "raincast/yearly_features.hpp"

namespace raincast {

// Structural and training hyperparameters of one district's monthly MLP.
// Shared by the STLM and HSTM stage-2 networks.
struct DistrictMonthlySpec {
    std::size_t own_lags = 12;        // p
    std::size_t neighbor_count = 0;   // k
    std::size_t neighbor_lags = 1;    // q
    std::vector<std::size_t> hidden_units = {8, 4};
    double learning_rate = 1e-3;
    double l1_alpha = 1e-4;
    std::size_t epochs = 60;
    std::size_t batch_size = 32;
    std::size_t patience = 10;

    std::size_t lag_input_dim() const { return own_lags + neighbor_count * neighbor_lags; }
    std::size_t max_lag() const {
        return std::max(own_lags, neighbor_count > 0 ? neighbor_lags : 0);
    }
};

struct StlmConfig {
    std::vector<DistrictMonthlySpec> districts; // aligned with panel order
    std::uint64_t seed = 0;
};

// Stage-1 hyperparameters of one yearly feature type, shared across districts.
struct Stage1Spec {
    int span = 10;
    std::size_t own_lags = 1;       // p
    std::size_t neighbor_lags = 1;  // q
    std::size_t neighbor_count = 0; // k
    int window = 3;                 // L
    double lambda = 1e-2;

    std::size_t max_lag() const {
        return std::max(own_lags, neighbor_count > 0 ? neighbor_lags : 0);
    }
};

struct HstmConfig {
    std::array<Stage1Spec, kFeatureCount> stage1;
    std::vector<DistrictMonthlySpec> stage2; // aligned with panel order
    std::uint64_t seed = 0;
};

struct ForecastResult {
    std::string model_name;
    YearMonth origin; // last observed month
    std::size_t horizon = 0;
    std::vector<std::string> districts;
    std::vector<YearMonth> months;           // forecast months, length horizon
    std::vector<std::vector<double>> values; // D x horizon, >= 0
    std::vector<bool> used_fed_back;         // per step: any fed-back input consumed
    std::string config_hash;
};

// Observed history plus fed-back forecast columns. Forecasting never reads
// panel values at or beyond `observed_end`, which is what the no-leakage
// guarantee rests on.
class MonthlyHistory {
public:
    MonthlyHistory(const RainfallPanel& panel, std::size_t observed_end)
        : panel_(&panel), observed_end_(observed_end), appended_(panel.district_count()) {
        if (observed_end == 0 || observed_end > panel.month_count())
            throw OutOfRangeError("history length outside panel axis");
    }

    std::size_t length() const { return observed_end_ + appended_[0].size(); }
    std::size_t observed_end() const { return observed_end_; }
    std::size_t district_count() const { return panel_->district_count(); }

    double at(std::size_t d, std::size_t t) const {
        if (t < observed_end_) return panel_->values[d][t];
        return appended_[d][t - observed_end_];
    }

    void append(const std::vector<double>& step_values) {
        for (std::size_t d = 0; d < appended_.size(); ++d)
            appended_[d].push_back(step_values[d]);
    }

    const std::vector<std::vector<double>>& appended() const { return appended_; }

private:
    const RainfallPanel* panel_;
    std::size_t observed_end_;
    std::vector<std::vector<double>> appended_; // D x steps
};

// Lag block [own p lags; per neighbor: q lags], most recent first. Training
// and forecasting share this assembly. Sets *used_fed_back when any index at
// or past the observed end is read.
inline void assemble_lags(const MonthlyHistory& history, const DistrictGraph& graph,
                          const DistrictMonthlySpec& spec, std::size_t d, std::size_t t,
                          std::vector<double>& out, bool* used_fed_back = nullptr) {
    if (t < spec.max_lag() || t > history.length())
        throw InsufficientHistoryError("month index " + std::to_string(t) +
                                       " lacks the required lags");
    bool fed = false;
    auto push = [&](std::size_t dd, std::size_t tt) {
        out.push_back(history.at(dd, tt));
        if (tt >= history.observed_end()) fed = true;
    };
    for (std::size_t l = 1; l <= spec.own_lags; ++l) push(d, t - l);
    if (spec.neighbor_count > 0) {
        const auto neighbors = knn(graph, d, spec.neighbor_count);
        for (std::size_t n : neighbors)
            for (std::size_t l = 1; l <= spec.neighbor_lags; ++l) push(n, t - l);
    }
    if (used_fed_back && fed) *used_fed_back = true;
}

inline std::vector<double> stlm_input(const MonthlyHistory& history, const DistrictGraph& graph,
                                      const DistrictMonthlySpec& spec, std::size_t d,
                                      std::size_t t, bool* used_fed_back = nullptr) {
    std::vector<double> x;
    x.reserve(spec.lag_input_dim());
    assemble_lags(history, graph, spec, d, t, x, used_fed_back);
    return x;
}

inline ForecastResult make_result(const RainfallPanel& panel, std::size_t train_len,
                                  std::size_t horizon, const std::string& model_name) {
    if (train_len == 0 || train_len > panel.month_count())
        throw OutOfRangeError("forecast origin outside the panel");
    ForecastResult result;
    result.model_name = model_name;
    result.origin = panel.months[train_len - 1];
    result.horizon = horizon;
    result.districts = panel.districts;
    result.months.reserve(horizon);
    YearMonth ym = result.origin;
    for (std::size_t h = 0; h < horizon; ++h) {
        ym = ym.next();
        result.months.push_back(ym);
    }
    result.values.assign(panel.district_count(), std::vector<double>(horizon, 0.0));
    result.used_fed_back.assign(horizon, false);
    return result;
}

// Seasonal naive: tile the last observed 12-month cycle across the horizon.
inline ForecastResult naive_forecast(const RainfallPanel& panel, std::size_t train_len,
                                     std::size_t horizon) {
    if (train_len < 12)
        throw HistoryTooShortError("seasonal naive needs >= 12 training months");
    ForecastResult result = make_result(panel, train_len, horizon, "naive");
    for (std::size_t d = 0; d < panel.district_count(); ++d)
        for (std::size_t h = 1; h <= horizon; ++h)
            result.values[d][h - 1] = panel.values[d][train_len - 12 + (h - 1) % 12];
    return result;
}

// One-step prediction for every district, fed back jointly until the horizon
// is covered. `predict` sees only the immutable history snapshot of the
// previous step.
inline ForecastResult recursive_joint_forecast(
    const RainfallPanel& panel, std::size_t train_len, std::size_t horizon,
    const std::string& model_name,
    const std::function<double(const MonthlyHistory&, std::size_t d, std::size_t t, bool*)>&
        predict) {
    ForecastResult result = make_result(panel, train_len, horizon, model_name);
    MonthlyHistory history(panel, train_len);
    std::vector<double> step(panel.district_count(), 0.0);
    for (std::size_t h = 1; h <= horizon; ++h) {
        const std::size_t t = train_len + h - 1;
        bool fed = false;
        for (std::size_t d = 0; d < panel.district_count(); ++d) {
            const double raw = predict(history, d, t, &fed);
            if (!std::isfinite(raw))
                throw Error("non-finite forecast for " + panel.districts[d] + " at step " +
                            std::to_string(h));
            step[d] = std::max(0.0, raw); // rainfall is nonnegative
        }
        history.append(step);
        result.used_fed_back[h - 1] = fed;
        for (std::size_t d = 0; d < panel.district_count(); ++d)
            result.values[d][h - 1] = step[d];
    }
    return result;
}

// ---------------------------------------------------------------------------
// STLM

struct StlmModel {
    StlmConfig config;
    std::vector<TrainedMlp> nets; // per district
};

inline std::uint64_t district_seed(std::uint64_t base, const std::string& district,
                                   std::uint64_t purpose) {
    return mix_seed(mix_seed(base, fnv1a(district)), purpose);
}

inline StlmModel stlm_fit(const RainfallPanel& panel, const DistrictGraph& graph,
                          const StlmConfig& config, std::size_t train_len) {
    if (config.districts.size() != panel.district_count())
        throw ConfigError("stlm config does not cover every district");
    StlmModel model;
    model.config = config;
    MonthlyHistory history(panel, train_len);
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        const auto& spec = config.districts[d];
        const std::size_t first = spec.max_lag();
        if (first >= train_len)
            throw InsufficientHistoryError("no training rows left after lag trimming for " +
                                           panel.districts[d]);
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        X.reserve(train_len - first);
        for (std::size_t t = first; t < train_len; ++t) {
            X.push_back(stlm_input(history, graph, spec, d, t));
            y.push_back(panel.values[d][t]);
        }
        MlpSpec mspec;
        mspec.input_dim = spec.lag_input_dim();
        mspec.hidden_units = spec.hidden_units;
        mspec.learning_rate = spec.learning_rate;
        mspec.l1_alpha = spec.l1_alpha;
        mspec.epochs = spec.epochs;
        mspec.batch_size = spec.batch_size;
        mspec.patience = spec.patience;
        mspec.seed = district_seed(config.seed, panel.districts[d], 0x73746c6d); // "stlm"
        model.nets.push_back(train(init_mlp(mspec), X, y));
    }
    return model;
}

inline ForecastResult stlm_forecast(const StlmModel& model, const RainfallPanel& panel,
                                    const DistrictGraph& graph, std::size_t train_len,
                                    std::size_t horizon) {
    return recursive_joint_forecast(
        panel, train_len, horizon, "stlm",
        [&](const MonthlyHistory& history, std::size_t d, std::size_t t, bool* fed) {
            return forward(model.nets[d],
                           stlm_input(history, graph, model.config.districts[d], d, t, fed));
        });
}

// ---------------------------------------------------------------------------
// HSTM stage 1: joint recursive forecasting of the nine yearly feature series

struct Stage1Models {
    // [feature][district]
    std::array<std::vector<LinearModel>, kFeatureCount> models;
    std::array<Stage1Spec, kFeatureCount> specs;
};

// Design row for one (feature, district, year): own lags, neighbor lags,
// then slope / mean-diff / momentum over the preceding window.
inline std::vector<double> stage1_input(const std::vector<std::vector<double>>& series_by_district,
                                        const DistrictGraph& graph, const Stage1Spec& spec,
                                        std::size_t d, std::size_t year_idx) {
    std::vector<double> x;
    x.reserve(spec.own_lags + spec.neighbor_count * spec.neighbor_lags + 3);
    const auto& own = series_by_district[d];
    for (std::size_t l = 1; l <= spec.own_lags; ++l) x.push_back(own[year_idx - l]);
    if (spec.neighbor_count > 0) {
        const auto neighbors = knn(graph, d, spec.neighbor_count);
        for (std::size_t n : neighbors)
            for (std::size_t l = 1; l <= spec.neighbor_lags; ++l)
                x.push_back(series_by_district[n][year_idx - l]);
    }
    const TrajectoryDescriptors desc = descriptors_at(own, year_idx + 1, spec.window);
    x.push_back(desc.slope);
    x.push_back(desc.mean_diff);
    x.push_back(desc.momentum);
    return x;
}

inline std::size_t stage1_first_row(const Stage1Spec& spec) {
    return std::max<std::size_t>(spec.max_lag(), 1); // descriptors need one prior year
}

inline Stage1Models stage1_fit(const YearlyFeatureTable& features, const DistrictGraph& graph,
                               const std::array<Stage1Spec, kFeatureCount>& specs,
                               std::size_t train_years) {
    Stage1Models out;
    out.specs = specs;
    const std::size_t D = features.districts.size();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const auto& spec = specs[f];
        const std::size_t first = stage1_first_row(spec);
        if (first >= train_years)
            throw InsufficientHistoryError("stage 1 needs more training years for feature " +
                                           feature_names()[f]);
        std::vector<std::vector<double>> series(D, std::vector<double>(train_years, 0.0));
        for (std::size_t d = 0; d < D; ++d)
            for (std::size_t y = 0; y < train_years; ++y) series[d][y] = features.smoothed[d][y][f];
        out.models[f].reserve(D);
        for (std::size_t d = 0; d < D; ++d) {
            std::vector<std::vector<double>> X;
            std::vector<double> y;
            for (std::size_t t = first; t < train_years; ++t) {
                X.push_back(stage1_input(series, graph, spec, d, t));
                y.push_back(series[d][t]);
            }
            LinearModel model = fit_lasso(X, y, spec.lambda);
            if (!model.converged)
                std::cerr << "warning: stage-1 fit did not converge (feature "
                          << feature_names()[f] << ", district " << features.districts[d]
                          << ")\n";
            out.models[f].push_back(std::move(model));
        }
    }
    return out;
}

// Joint recursion over years: all D x 9 one-year-ahead predictions are made
// from the same snapshot, then appended, then descriptors recompute from the
// extended series. Returns [year offset][district][feature].
inline std::vector<std::vector<std::array<double, kFeatureCount>>> stage1_forecast(
    const Stage1Models& models, const YearlyFeatureTable& features, const DistrictGraph& graph,
    std::size_t train_years, std::size_t horizon_years) {
    const std::size_t D = features.districts.size();
    std::array<std::vector<std::vector<double>>, kFeatureCount> series;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        series[f].assign(D, {});
        for (std::size_t d = 0; d < D; ++d) {
            series[f][d].resize(train_years);
            for (std::size_t y = 0; y < train_years; ++y)
                series[f][d][y] = features.smoothed[d][y][f];
        }
    }
    std::vector<std::vector<std::array<double, kFeatureCount>>> forecast(
        horizon_years, std::vector<std::array<double, kFeatureCount>>(D));
    for (std::size_t step = 0; step < horizon_years; ++step) {
        const std::size_t year_idx = train_years + step;
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            for (std::size_t d = 0; d < D; ++d) {
                const std::vector<double> x =
                    stage1_input(series[f], graph, models.specs[f], d, year_idx);
                const double value = predict(models.models[f][d], x);
                if (!std::isfinite(value))
                    throw Error("non-finite stage-1 forecast (feature " + feature_names()[f] +
                                ")");
                forecast[step][d][f] = value;
            }
        }
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            for (std::size_t d = 0; d < D; ++d)
                series[f][d].push_back(forecast[step][d][f]);
    }
    return forecast;
}

// ---------------------------------------------------------------------------
// HSTM stage 2: monthly MLP conditioned on the yearly feature vector

// Yearly feature vectors per district: observed (smoothed) for training
// years, forecast (or oracle) beyond them.
struct YearlyVectors {
    std::size_t train_years = 0;
    // observed[d][y][f] for y < train_years
    const YearlyFeatureTable* observed = nullptr;
    // forecast[offset][d][f] for year index train_years + offset
    std::vector<std::vector<std::array<double, kFeatureCount>>> forecast;

    const std::array<double, kFeatureCount>& at(std::size_t d, std::size_t year_idx) const {
        if (year_idx < train_years) return observed->smoothed[d][year_idx];
        const std::size_t offset = year_idx - train_years;
        if (offset >= forecast.size())
            throw MissingYearlyFeatureError("no yearly features for year index " +
                                            std::to_string(year_idx));
        return forecast[offset][d];
    }
};

inline std::vector<double> stage2_input(const MonthlyHistory& history, const DistrictGraph& graph,
                                        const DistrictMonthlySpec& spec,
                                        const YearlyVectors& yearly, std::size_t d, std::size_t t,
                                        bool* used_fed_back = nullptr) {
    std::vector<double> x;
    x.reserve(spec.lag_input_dim() + kFeatureCount);
    assemble_lags(history, graph, spec, d, t, x, used_fed_back);
    const auto& features = yearly.at(d, t / 12);
    x.insert(x.end(), features.begin(), features.end());
    return x;
}

struct HstmModel {
    HstmConfig config;
    Stage1Models stage1;
    std::vector<TrainedMlp> nets; // per district
    YearlyVectors yearly;
    std::shared_ptr<YearlyFeatureTable> yearly_observed_storage;
};

enum class FeatureSource {
    Stage1Forecast, // standard mode
    OracleObserved, // diagnostic: true smoothed features for forecast years
};

// Fits both stages on the first `train_len` months and prepares yearly
// vectors covering `horizon` forecast months. The panel must start in
// January; training rows require observed yearly features (year >= 2) and a
// full lag window.
inline HstmModel hstm_fit(const RainfallPanel& panel, const DistrictGraph& graph,
                          const HstmConfig& config, std::size_t train_len, std::size_t horizon,
                          FeatureSource source = FeatureSource::Stage1Forecast) {
    if (config.stage2.size() != panel.district_count())
        throw ConfigError("hstm config does not cover every district");
    const std::size_t train_years = train_len / 12;
    if (train_years < 2) throw InsufficientHistoryError("hstm needs >= 2 training years");

    std::array<int, kFeatureCount> spans;
    for (std::size_t f = 0; f < kFeatureCount; ++f) spans[f] = config.stage1[f].span;

    HstmModel model;
    model.config = config;

    // Stage 1 on training years only.
    YearlyFeatureTable features = compute_yearly_features(panel, train_years * 12);
    apply_spans(features, spans);
    model.stage1 = stage1_fit(features, graph, config.stage1, train_years);

    const std::size_t last_month = train_len + horizon - 1;
    const std::size_t years_needed = last_month / 12 >= train_years
                                         ? last_month / 12 - train_years + 1
                                         : 0;
    model.yearly.train_years = train_years;
    if (source == FeatureSource::Stage1Forecast) {
        model.yearly.forecast =
            stage1_forecast(model.stage1, features, graph, train_years, years_needed);
    } else {
        // Oracle diagnostic: smooth the full panel and expose the true
        // smoothed vectors for the forecast years.
        const std::size_t all_years = panel.month_count() / 12;
        if (train_years + years_needed > all_years)
            throw MissingYearlyFeatureError("oracle mode: panel does not cover forecast years");
        YearlyFeatureTable full = compute_yearly_features(panel, all_years * 12);
        apply_spans(full, spans);
        model.yearly.forecast.assign(
            years_needed, std::vector<std::array<double, kFeatureCount>>(panel.district_count()));
        for (std::size_t o = 0; o < years_needed; ++o)
            for (std::size_t d = 0; d < panel.district_count(); ++d)
                model.yearly.forecast[o][d] = full.smoothed[d][train_years + o];
    }

    // Keep the observed table alive inside the model.
    model.yearly_observed_storage = std::make_shared<YearlyFeatureTable>(std::move(features));
    model.yearly.observed = model.yearly_observed_storage.get();

    // Stage 2 networks.
    MonthlyHistory history(panel, train_len);
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        const auto& spec = config.stage2[d];
        const std::size_t first = std::max<std::size_t>(spec.max_lag(), 12);
        const std::size_t last = train_years * 12; // only months with observed features
        if (first >= last)
            throw InsufficientHistoryError("no stage-2 training rows for " + panel.districts[d]);
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (std::size_t t = first; t < last; ++t) {
            X.push_back(stage2_input(history, graph, spec, model.yearly, d, t));
            y.push_back(panel.values[d][t]);
        }
        MlpSpec mspec;
        mspec.input_dim = spec.lag_input_dim() + kFeatureCount;
        mspec.hidden_units = spec.hidden_units;
        mspec.learning_rate = spec.learning_rate;
        mspec.l1_alpha = spec.l1_alpha;
        mspec.epochs = spec.epochs;
        mspec.batch_size = spec.batch_size;
        mspec.patience = spec.patience;
        mspec.seed = district_seed(config.seed, panel.districts[d], 0x6873746d); // "hstm"
        model.nets.push_back(train(init_mlp(mspec), X, y));
    }
    return model;
}

inline ForecastResult hstm_forecast(const HstmModel& model, const RainfallPanel& panel,
                                    const DistrictGraph& graph, std::size_t train_len,
                                    std::size_t horizon) {
    return recursive_joint_forecast(
        panel, train_len, horizon, "hstm",
        [&](const MonthlyHistory& history, std::size_t d, std::size_t t, bool* fed) {
            return forward(model.nets[d], stage2_input(history, graph, model.config.stage2[d],
                                                       model.yearly, d, t, fed));
        });
}

inline ForecastResult hstm_fit_forecast(const RainfallPanel& panel, const DistrictGraph& graph,
                                        const HstmConfig& config, std::size_t train_len,
                                        std::size_t horizon,
                                        FeatureSource source = FeatureSource::Stage1Forecast) {
    const HstmModel model = hstm_fit(panel, graph, config, train_len, horizon, source);
    return hstm_forecast(model, panel, graph, train_len, horizon);
}

} // namespace raincast
