#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "raincast/panel.hpp"
#include "raincast/rng.hpp"
#include "raincast/spatial.hpp"

namespace raincast {

// Synthetic monsoon-like panel: a per-district seasonal profile scaled by a
// slow multiplicative annual drift, plus spatially correlated AR(1) noise.
// Everything is a pure function of the options, so panels are reproducible.
struct SynthOptions {
    std::size_t districts = 6;
    std::size_t years = 60;
    std::uint64_t seed = 0;
    int start_year = 1951;
    double drift = 0.25;           // fractional change of totals across the span
    double noise_sd = 4.0;         // AR innovation scale, mm
    double ar_phi = 0.7;           // month-to-month persistence
    double spatial_range_km = 120; // correlation length of the noise field
};

struct SynthPanel {
    RainfallPanel panel;
    DistrictGraph graph;
};

inline SynthPanel synth_panel(const SynthOptions& options) {
    if (options.districts == 0 || options.years == 0)
        throw Error("synthetic panel needs at least one district and year");
    const std::size_t D = options.districts;
    const std::size_t T = options.years * 12;

    SynthPanel out;
    out.panel.districts.reserve(D);
    for (std::size_t d = 0; d < D; ++d) {
        char name[16];
        std::snprintf(name, sizeof(name), "D%02zu", d + 1);
        out.panel.districts.push_back(name);
    }
    for (std::size_t t = 0; t < T; ++t)
        out.panel.months.push_back(YearMonth{options.start_year + static_cast<int>(t / 12),
                                             static_cast<int>(t % 12) + 1});

    // Centroids on a jittered grid, roughly 45 km apart.
    Rng geo_rng(mix_seed(options.seed, 0x67656f)); // "geo"
    const std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(double(D))));
    std::vector<LatLon> centroids;
    for (std::size_t d = 0; d < D; ++d) {
        LatLon c;
        c.lat = 23.0 + 0.4 * static_cast<double>(d / cols) + 0.05 * geo_rng.uniform();
        c.lon = 87.0 + 0.4 * static_cast<double>(d % cols) + 0.05 * geo_rng.uniform();
        centroids.push_back(c);
    }
    out.graph = build_graph(out.panel.districts, centroids);

    // Monsoon-shaped monthly means (mm), June-September dominant.
    static const std::array<double, 12> kSeason = {3.0,  4.0,  8.0,  14.0, 30.0, 70.0,
                                                   95.0, 88.0, 60.0, 22.0, 7.0,  4.0};

    Rng rng(mix_seed(options.seed, 0x70616e)); // "pan"
    std::vector<double> base(D);
    for (std::size_t d = 0; d < D; ++d) base[d] = 0.8 + 0.4 * rng.uniform();

    // Distance-decay mixing turns iid innovations into a spatially correlated
    // field with unit marginal variance.
    std::vector<std::vector<double>> mix(D, std::vector<double>(D, 0.0));
    for (std::size_t i = 0; i < D; ++i) {
        double norm = 0.0;
        for (std::size_t j = 0; j < D; ++j) {
            mix[i][j] = std::exp(-out.graph.distances_km[i][j] / options.spatial_range_km);
            norm += mix[i][j] * mix[i][j];
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < D; ++j) mix[i][j] /= norm;
    }

    out.panel.values.assign(D, std::vector<double>(T, 0.0));
    std::vector<double> state(D, 0.0), shock(D, 0.0);
    const double innovation_sd = std::sqrt(1.0 - options.ar_phi * options.ar_phi);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < D; ++d) shock[d] = rng.normal();
        for (std::size_t d = 0; d < D; ++d) {
            double mixed = 0.0;
            for (std::size_t j = 0; j < D; ++j) mixed += mix[d][j] * shock[j];
            state[d] = options.ar_phi * state[d] + innovation_sd * mixed;
        }
        const std::size_t y = t / 12;
        const std::size_t j = t % 12;
        const double progress =
            options.years > 1
                ? (static_cast<double>(y) - static_cast<double>(options.years - 1) / 2.0) /
                      static_cast<double>(options.years - 1)
                : 0.0;
        const double trend = 1.0 + options.drift * progress;
        for (std::size_t d = 0; d < D; ++d) {
            const double level = base[d] * kSeason[j] * trend;
            const double wet_weight = 0.3 + kSeason[j] / 60.0;
            const double value = level + options.noise_sd * wet_weight * state[d];
            out.panel.values[d][t] = std::max(0.0, value);
        }
    }
    if (T >= 2) out.panel.train_end = T - 2; // provisional until split_panel
    return out;
}

} // namespace raincast
