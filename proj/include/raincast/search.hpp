#pragma once

#include <atomic>
#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "raincast/config.hpp"
#include "raincast/evaluation.hpp"
#include "raincast/rng.hpp"

namespace raincast {

struct SearchCandidate {
    std::size_t draw = 0; // 1-based draw order
    ModelConfig config;
    std::string hash;
    std::vector<double> fold_scores;
    double mean_nrmse = std::numeric_limits<double>::infinity();
};

struct SearchResult {
    std::vector<SearchCandidate> trace; // in draw order
    std::size_t best_index = 0;

    const SearchCandidate& best() const { return trace[best_index]; }
};

namespace detail {

// Product of dimension sizes, saturating well below overflow.
inline std::uint64_t space_size_saturating(const std::vector<std::size_t>& dims) {
    constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
    std::uint64_t total = 1;
    for (std::size_t s : dims) {
        if (s == 0) return 0;
        if (total > kCap / s) return kCap;
        total *= s;
    }
    return total;
}

inline std::vector<std::size_t> decode_mixed_radix(std::uint64_t value,
                                                   const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t i = dims.size(); i-- > 0;) {
        idx[i] = static_cast<std::size_t>(value % dims[i]);
        value /= dims[i];
    }
    return idx;
}

} // namespace detail

// Draws R full configurations without replacement, in a deterministic order
// given the seed. Small spaces are enumerated and shuffled; large spaces use
// rejection sampling against a seen-set. R larger than the space collapses
// to full enumeration.
inline std::vector<ModelConfig> sample_configs(const SearchSpace& space, std::size_t samples,
                                               std::uint64_t seed,
                                               const std::vector<std::string>& districts) {
    if (samples == 0) throw ConfigError("random search needs R >= 1");
    const std::vector<std::size_t> dims = space.dim_sizes(districts.size());
    const std::uint64_t total = detail::space_size_saturating(dims);
    if (total == 0) throw ConfigError("search space is empty");

    Rng rng(mix_seed(seed, 0x73616d70)); // "samp"
    std::vector<ModelConfig> out;

    constexpr std::uint64_t kEnumerateLimit = 100000;
    if (samples >= total || total <= kEnumerateLimit) {
        std::vector<std::uint64_t> all(static_cast<std::size_t>(total));
        for (std::uint64_t i = 0; i < total; ++i) all[static_cast<std::size_t>(i)] = i;
        rng.shuffle(all);
        const std::size_t take = std::min<std::uint64_t>(samples, total);
        if (samples > total)
            std::cerr << "warning: R=" << samples << " exceeds the " << total
                      << " distinct configurations; enumerating all\n";
        for (std::size_t i = 0; i < take; ++i) {
            const std::uint64_t candidate_seed = mix_seed(seed, i + 1);
            out.push_back(space.decode(detail::decode_mixed_radix(all[i], dims),
                                       districts.size(), candidate_seed));
        }
        return out;
    }

    std::unordered_set<std::string> seen;
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t r = 0; r < samples; ++r) {
        const std::uint64_t candidate_seed = mix_seed(seed, r + 1);
        bool accepted = false;
        for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
            for (std::size_t i = 0; i < dims.size(); ++i) idx[i] = rng.uniform_index(dims[i]);
            ModelConfig config = space.decode(idx, districts.size(), candidate_seed);
            const std::string key = model_config_json(config, districts).dump();
            if (seen.insert(key).second) {
                out.push_back(std::move(config));
                accepted = true;
            }
        }
        if (!accepted)
            throw Error("random search could not find an unseen configuration");
    }
    return out;
}

// Randomized search: sample, score every candidate by expanding-window CV,
// return the full trace plus the argmin (first-seen wins ties). Candidate
// evaluations may run on `jobs` threads; results are merged in draw order so
// the outcome is independent of scheduling.
inline SearchResult random_search(const SearchSpace& space, std::size_t samples,
                                  std::uint64_t seed, const RainfallPanel& panel,
                                  const DistrictGraph& graph, const FoldPlan& plan,
                                  std::size_t jobs = 1) {
    std::vector<ModelConfig> configs = sample_configs(space, samples, seed, panel.districts);

    SearchResult result;
    result.trace.resize(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        result.trace[i].draw = i + 1;
        result.trace[i].hash = config_hash(configs[i], panel.districts);
        result.trace[i].config = std::move(configs[i]);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= result.trace.size()) return;
            SearchCandidate& candidate = result.trace[i];
            try {
                candidate.mean_nrmse =
                    cv_score(candidate.config, panel, graph, plan, &candidate.fold_scores);
            } catch (const std::exception& e) {
                candidate.mean_nrmse = std::numeric_limits<double>::infinity();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    result.best_index = 0;
    for (std::size_t i = 1; i < result.trace.size(); ++i)
        if (result.trace[i].mean_nrmse < result.trace[result.best_index].mean_nrmse)
            result.best_index = i;
    return result;
}

} // namespace raincast
