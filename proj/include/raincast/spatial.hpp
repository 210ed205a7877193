#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "raincast/errors.hpp"

namespace raincast {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

// A station with a representative coordinate, used for district centroids.
struct StationSite {
    std::string station_id;
    std::string district;
    LatLon coord;
};

inline constexpr double kEarthRadiusKm = 6371.0088;

// Great-circle distance in kilometers.
inline double haversine_km(const LatLon& a, const LatLon& b) {
    const double deg = M_PI / 180.0;
    const double phi1 = a.lat * deg, phi2 = b.lat * deg;
    const double dphi = (b.lat - a.lat) * deg;
    const double dlambda = (b.lon - a.lon) * deg;
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// District centroids, pairwise distances, and neighbor lists sorted by
// ascending distance (name-lexicographic on ties).
struct DistrictGraph {
    std::vector<std::string> districts;
    std::vector<LatLon> centroids;
    std::vector<std::vector<double>> distances_km;       // D x D, symmetric
    std::vector<std::vector<std::size_t>> neighbor_lists; // per district, length D-1

    std::size_t district_index(const std::string& name) const {
        for (std::size_t d = 0; d < districts.size(); ++d)
            if (districts[d] == name) return d;
        throw Error("unknown district: " + name);
    }
};

// Arithmetic-mean centroid of each district's stations.
inline std::map<std::string, LatLon> district_centroids(const std::vector<StationSite>& sites,
                                                        const std::vector<std::string>& districts) {
    std::map<std::string, std::pair<LatLon, std::size_t>> acc;
    for (const auto& site : sites) {
        auto& [sum, n] = acc[site.district];
        sum.lat += site.coord.lat;
        sum.lon += site.coord.lon;
        ++n;
    }
    std::map<std::string, LatLon> out;
    for (const auto& name : districts) {
        auto it = acc.find(name);
        if (it == acc.end() || it->second.second == 0) throw NoStationsError(name);
        const auto& [sum, n] = it->second;
        out[name] = LatLon{sum.lat / static_cast<double>(n), sum.lon / static_cast<double>(n)};
    }
    return out;
}

inline DistrictGraph build_graph(const std::vector<std::string>& districts,
                                 const std::vector<LatLon>& centroids) {
    if (districts.size() != centroids.size())
        throw DimensionMismatchError("districts/centroids size mismatch");
    DistrictGraph graph;
    graph.districts = districts;
    graph.centroids = centroids;
    const std::size_t D = districts.size();
    graph.distances_km.assign(D, std::vector<double>(D, 0.0));
    for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = i + 1; j < D; ++j) {
            const double km = haversine_km(centroids[i], centroids[j]);
            graph.distances_km[i][j] = km;
            graph.distances_km[j][i] = km;
        }
    }
    graph.neighbor_lists.resize(D);
    for (std::size_t d = 0; d < D; ++d) {
        auto& list = graph.neighbor_lists[d];
        for (std::size_t j = 0; j < D; ++j)
            if (j != d) list.push_back(j);
        std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
            const double da = graph.distances_km[d][a];
            const double db = graph.distances_km[d][b];
            if (da != db) return da < db;
            return graph.districts[a] < graph.districts[b];
        });
    }
    return graph;
}

inline DistrictGraph build_graph(const std::vector<std::string>& districts,
                                 const std::map<std::string, LatLon>& centroids) {
    std::vector<LatLon> coords;
    coords.reserve(districts.size());
    for (const auto& name : districts) {
        auto it = centroids.find(name);
        if (it == centroids.end()) throw NoStationsError(name);
        coords.push_back(it->second);
    }
    return build_graph(districts, coords);
}

// First k neighbors of district d.
inline std::vector<std::size_t> knn(const DistrictGraph& graph, std::size_t d, std::size_t k) {
    if (d >= graph.districts.size()) throw Error("district index out of range");
    const auto& list = graph.neighbor_lists[d];
    if (k > list.size())
        throw KTooLargeError("k=" + std::to_string(k) + " exceeds D-1=" +
                             std::to_string(list.size()));
    return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k)};
}

inline void write_graph_json(const DistrictGraph& graph, const std::string& path) {
    nlohmann::json j;
    j["districts"] = graph.districts;
    auto& cents = j["centroids"] = nlohmann::json::array();
    for (const auto& c : graph.centroids) cents.push_back({c.lat, c.lon});
    j["distance_km"] = graph.distances_km;
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

inline DistrictGraph read_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    nlohmann::json j;
    in >> j;
    std::vector<std::string> districts = j.at("districts").get<std::vector<std::string>>();
    std::vector<LatLon> centroids;
    for (const auto& c : j.at("centroids")) centroids.push_back(LatLon{c.at(0), c.at(1)});
    return build_graph(districts, centroids);
}

// Station-coordinate CSV: station id, lat, lon. Districts come from joining
// with the rainfall records' (station, district) pairs.
inline std::vector<StationSite> read_station_sites(const std::string& coords_path,
                                                   const std::map<std::string, std::string>& station_district) {
    const CsvTable table = read_csv(coords_path);
    const std::size_t id_col = table.column("station_id");
    const std::size_t lat_col = table.column("lat");
    const std::size_t lon_col = table.column("lon");
    if (id_col == static_cast<std::size_t>(-1)) throw MissingColumnError("station_id");
    if (lat_col == static_cast<std::size_t>(-1)) throw MissingColumnError("lat");
    if (lon_col == static_cast<std::size_t>(-1)) throw MissingColumnError("lon");
    std::vector<StationSite> sites;
    for (const auto& row : table.rows) {
        auto it = station_district.find(row[id_col]);
        if (it == station_district.end()) continue; // no rainfall rows for this station
        StationSite site;
        site.station_id = row[id_col];
        site.district = it->second;
        site.coord.lat = std::stod(row[lat_col]);
        site.coord.lon = std::stod(row[lon_col]);
        if (site.coord.lat < -90.0 || site.coord.lat > 90.0 ||
            site.coord.lon < -180.0 || site.coord.lon > 180.0)
            throw Error("coordinate out of range for station " + site.station_id);
        sites.push_back(std::move(site));
    }
    return sites;
}

} // namespace raincast
