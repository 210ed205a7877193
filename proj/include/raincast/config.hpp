#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "raincast/errors.hpp"
#include "raincast/evaluation.hpp"
#include "raincast/forecast.hpp"
#include "raincast/rng.hpp"

namespace raincast {

// ---------------------------------------------------------------------------
// Model config JSON

inline nlohmann::json district_spec_json(const DistrictMonthlySpec& spec) {
    return nlohmann::json{{"p", spec.own_lags},
                          {"k", spec.neighbor_count},
                          {"q", spec.neighbor_lags},
                          {"hidden_units", spec.hidden_units},
                          {"eta", spec.learning_rate},
                          {"alpha", spec.l1_alpha},
                          {"epochs", spec.epochs},
                          {"batch_size", spec.batch_size},
                          {"patience", spec.patience}};
}

inline DistrictMonthlySpec district_spec_from_json(const nlohmann::json& j) {
    DistrictMonthlySpec spec;
    spec.own_lags = j.at("p").get<std::size_t>();
    spec.neighbor_count = j.at("k").get<std::size_t>();
    spec.neighbor_lags = j.at("q").get<std::size_t>();
    spec.hidden_units = j.at("hidden_units").get<std::vector<std::size_t>>();
    spec.learning_rate = j.at("eta").get<double>();
    spec.l1_alpha = j.at("alpha").get<double>();
    spec.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("batch_size")) spec.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("patience")) spec.patience = j.at("patience").get<std::size_t>();
    if (spec.own_lags == 0) throw ConfigError("district spec: p must be >= 1");
    if (spec.neighbor_count > 0 && spec.neighbor_lags == 0)
        throw ConfigError("district spec: q must be >= 1 when k > 0");
    return spec;
}

inline nlohmann::json stage1_spec_json(const Stage1Spec& spec) {
    return nlohmann::json{{"span", spec.span},   {"p", spec.own_lags}, {"q", spec.neighbor_lags},
                          {"k", spec.neighbor_count}, {"L", spec.window},  {"lambda", spec.lambda}};
}

inline Stage1Spec stage1_spec_from_json(const nlohmann::json& j) {
    Stage1Spec spec;
    spec.span = j.at("span").get<int>();
    spec.own_lags = j.at("p").get<std::size_t>();
    spec.neighbor_lags = j.at("q").get<std::size_t>();
    spec.neighbor_count = j.at("k").get<std::size_t>();
    spec.window = j.at("L").get<int>();
    spec.lambda = j.at("lambda").get<double>();
    if (spec.span < 1) throw ConfigError("stage1 spec: span must be >= 1");
    if (spec.own_lags == 0) throw ConfigError("stage1 spec: p must be >= 1");
    if (spec.window < 2) throw ConfigError("stage1 spec: L must be >= 2");
    if (spec.lambda < 0.0) throw ConfigError("stage1 spec: lambda must be >= 0");
    return spec;
}

inline nlohmann::json model_config_json(const ModelConfig& config,
                                        const std::vector<std::string>& districts) {
    nlohmann::json j;
    switch (config.family) {
        case ModelFamily::Naive:
            j["model"] = "naive";
            return j;
        case ModelFamily::Stlm: {
            j["model"] = "stlm";
            j["seed"] = config.stlm.seed;
            auto& per = j["districts"] = nlohmann::json::object();
            for (std::size_t d = 0; d < districts.size(); ++d)
                per[districts[d]] = district_spec_json(config.stlm.districts[d]);
            return j;
        }
        case ModelFamily::Hstm: {
            j["model"] = "hstm";
            j["seed"] = config.hstm.seed;
            auto& s1 = j["stage1"] = nlohmann::json::object();
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                s1[feature_names()[f]] = stage1_spec_json(config.hstm.stage1[f]);
            auto& s2 = j["stage2"] = nlohmann::json::object();
            for (std::size_t d = 0; d < districts.size(); ++d)
                s2[districts[d]] = district_spec_json(config.hstm.stage2[d]);
            return j;
        }
    }
    throw ConfigError("unreachable model family");
}

inline ModelConfig model_config_from_json(const nlohmann::json& j,
                                          const std::vector<std::string>& districts) {
    ModelConfig config;
    const std::string model = j.at("model").get<std::string>();
    config.family = model_family_from_name(model);
    if (config.family == ModelFamily::Naive) return config;
    if (config.family == ModelFamily::Stlm) {
        config.stlm.seed = j.value("seed", std::uint64_t{0});
        const auto& per = j.at("districts");
        for (const auto& name : districts) {
            if (!per.contains(name)) throw ConfigError("config missing district: " + name);
            config.stlm.districts.push_back(district_spec_from_json(per.at(name)));
        }
        return config;
    }
    config.hstm.seed = j.value("seed", std::uint64_t{0});
    const auto& s1 = j.at("stage1");
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const std::string& name = feature_names()[f];
        if (!s1.contains(name)) throw ConfigError("config missing stage-1 feature: " + name);
        config.hstm.stage1[f] = stage1_spec_from_json(s1.at(name));
    }
    const auto& s2 = j.at("stage2");
    for (const auto& name : districts) {
        if (!s2.contains(name)) throw ConfigError("config missing district: " + name);
        config.hstm.stage2.push_back(district_spec_from_json(s2.at(name)));
    }
    return config;
}

inline ModelConfig load_model_config(const std::string& path,
                                     const std::vector<std::string>& districts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    return model_config_from_json(j, districts);
}

// Canonical hash of a config: FNV-1a of its sorted-key JSON dump.
inline std::string config_hash(const ModelConfig& config,
                               const std::vector<std::string>& districts) {
    const std::string dump = model_config_json(config, districts).dump();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(dump)));
    return buf;
}

// ---------------------------------------------------------------------------
// Search spaces

struct DistrictSpace {
    std::vector<std::size_t> p;
    std::vector<std::size_t> k;
    std::vector<std::size_t> q;
    std::vector<std::size_t> units; // width choices, drawn per layer
    std::size_t layers = 2;
    std::vector<double> eta;
    std::vector<double> alpha;
    std::vector<std::size_t> epochs;
    std::size_t batch_size = 32;
    std::size_t patience = 10;

    std::vector<std::size_t> dim_sizes() const {
        std::vector<std::size_t> dims = {p.size(), k.size(), q.size()};
        for (std::size_t l = 0; l < layers; ++l) dims.push_back(units.size());
        dims.push_back(eta.size());
        dims.push_back(alpha.size());
        dims.push_back(epochs.size());
        return dims;
    }

    DistrictMonthlySpec decode(const std::vector<std::size_t>& idx) const {
        DistrictMonthlySpec spec;
        std::size_t i = 0;
        spec.own_lags = p[idx[i++]];
        spec.neighbor_count = k[idx[i++]];
        spec.neighbor_lags = q[idx[i++]];
        spec.hidden_units.clear();
        for (std::size_t l = 0; l < layers; ++l) spec.hidden_units.push_back(units[idx[i++]]);
        spec.learning_rate = eta[idx[i++]];
        spec.l1_alpha = alpha[idx[i++]];
        spec.epochs = epochs[idx[i++]];
        spec.batch_size = batch_size;
        spec.patience = patience;
        return spec;
    }
};

struct Stage1Space {
    std::vector<int> span;
    std::vector<std::size_t> p;
    std::vector<std::size_t> q;
    std::vector<std::size_t> k;
    std::vector<int> window; // L
    std::vector<double> lambda;

    std::vector<std::size_t> dim_sizes() const {
        return {span.size(), p.size(), q.size(), k.size(), window.size(), lambda.size()};
    }

    Stage1Spec decode(const std::vector<std::size_t>& idx) const {
        Stage1Spec spec;
        spec.span = span[idx[0]];
        spec.own_lags = p[idx[1]];
        spec.neighbor_lags = q[idx[2]];
        spec.neighbor_count = k[idx[3]];
        spec.window = window[idx[4]];
        spec.lambda = lambda[idx[5]];
        return spec;
    }
};

struct SearchSpace {
    ModelFamily family = ModelFamily::Stlm;
    DistrictSpace district; // per-district theta space (STLM and HSTM stage 2)
    Stage1Space stage1;     // HSTM only

    // Dimension grid of one full configuration: D district tuples, plus 9
    // feature tuples for HSTM.
    std::vector<std::size_t> dim_sizes(std::size_t district_count) const {
        std::vector<std::size_t> dims;
        if (family == ModelFamily::Hstm) {
            const auto s1 = stage1.dim_sizes();
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                dims.insert(dims.end(), s1.begin(), s1.end());
        }
        const auto ds = district.dim_sizes();
        for (std::size_t d = 0; d < district_count; ++d)
            dims.insert(dims.end(), ds.begin(), ds.end());
        return dims;
    }

    ModelConfig decode(const std::vector<std::size_t>& idx, std::size_t district_count,
                       std::uint64_t seed) const {
        ModelConfig config;
        config.family = family;
        std::size_t offset = 0;
        if (family == ModelFamily::Hstm) {
            const std::size_t s1_dims = stage1.dim_sizes().size();
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                std::vector<std::size_t> sub(idx.begin() + static_cast<std::ptrdiff_t>(offset),
                                             idx.begin() +
                                                 static_cast<std::ptrdiff_t>(offset + s1_dims));
                config.hstm.stage1[f] = stage1.decode(sub);
                offset += s1_dims;
            }
        }
        const std::size_t d_dims = district.dim_sizes().size();
        for (std::size_t d = 0; d < district_count; ++d) {
            std::vector<std::size_t> sub(idx.begin() + static_cast<std::ptrdiff_t>(offset),
                                         idx.begin() +
                                             static_cast<std::ptrdiff_t>(offset + d_dims));
            const DistrictMonthlySpec spec = district.decode(sub);
            if (family == ModelFamily::Hstm) config.hstm.stage2.push_back(spec);
            else config.stlm.districts.push_back(spec);
            offset += d_dims;
        }
        if (family == ModelFamily::Hstm) config.hstm.seed = seed;
        else config.stlm.seed = seed;
        return config;
    }
};

inline DistrictSpace district_space_from_json(const nlohmann::json& j) {
    DistrictSpace space;
    space.p = j.at("p").get<std::vector<std::size_t>>();
    space.k = j.at("k").get<std::vector<std::size_t>>();
    space.q = j.at("q").get<std::vector<std::size_t>>();
    space.units = j.at("units").get<std::vector<std::size_t>>();
    space.layers = j.value("layers", std::size_t{2});
    space.eta = j.at("eta").get<std::vector<double>>();
    space.alpha = j.at("alpha").get<std::vector<double>>();
    space.epochs = j.at("epochs").get<std::vector<std::size_t>>();
    space.batch_size = j.value("batch_size", std::size_t{32});
    space.patience = j.value("patience", std::size_t{10});
    for (const auto* grid : {&space.p, &space.k, &space.q, &space.units, &space.epochs})
        if (grid->empty()) throw ConfigError("search space has an empty grid");
    if (space.eta.empty() || space.alpha.empty() || space.layers == 0)
        throw ConfigError("search space has an empty grid");
    return space;
}

inline SearchSpace search_space_from_json(const nlohmann::json& j) {
    SearchSpace space;
    space.family = model_family_from_name(j.at("model").get<std::string>());
    if (space.family == ModelFamily::Naive)
        throw ConfigError("the naive model has no hyperparameters to search");
    space.district = district_space_from_json(space.family == ModelFamily::Hstm
                                                  ? j.at("stage2_space")
                                                  : j.at("district_space"));
    if (space.family == ModelFamily::Hstm) {
        const auto& s1 = j.at("stage1_space");
        space.stage1.span = s1.at("span").get<std::vector<int>>();
        space.stage1.p = s1.at("p").get<std::vector<std::size_t>>();
        space.stage1.q = s1.at("q").get<std::vector<std::size_t>>();
        space.stage1.k = s1.at("k").get<std::vector<std::size_t>>();
        space.stage1.window = s1.at("L").get<std::vector<int>>();
        space.stage1.lambda = s1.at("lambda").get<std::vector<double>>();
        for (bool empty : {space.stage1.span.empty(), space.stage1.p.empty(),
                           space.stage1.q.empty(), space.stage1.k.empty(),
                           space.stage1.window.empty(), space.stage1.lambda.empty()})
            if (empty) throw ConfigError("stage-1 search space has an empty grid");
    }
    return space;
}

inline SearchSpace load_search_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open search space: " + path);
    nlohmann::json j;
    in >> j;
    return search_space_from_json(j);
}

} // namespace raincast
