#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "raincast/csv.hpp"
#include "raincast/errors.hpp"
#include "raincast/panel.hpp"

namespace raincast {

struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    friend bool operator<(const Date& a, const Date& b) {
        if (a.year != b.year) return a.year < b.year;
        if (a.month != b.month) return a.month < b.month;
        return a.day < b.day;
    }
    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }

    YearMonth year_month() const { return YearMonth{year, month}; }
};

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int year, int month) {
    static const int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return kDays[month - 1];
}

// Parses an ISO-8601 calendar date, validating the calendar itself.
inline std::optional<Date> parse_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
    Date d;
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(5, 2));
    d.day = std::stoi(s.substr(8, 2));
    if (d.month < 1 || d.month > 12) return std::nullopt;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
    return d;
}

struct StationRecord {
    std::string station_id;
    std::string district;
    Date date;
    std::optional<double> rainfall_mm; // missing when the cell was unparseable
};

// Logical-to-actual column names for the station CSV.
struct StationCsvSchema {
    std::string station_id = "station_id";
    std::string district = "district";
    std::string date = "date";
    std::string rainfall = "rainfall_mm";
};

struct ParseStats {
    std::size_t total_rows = 0;
    std::size_t rejected_rows = 0;
    std::size_t missing_cells = 0;
};

inline constexpr int kMinRecordYear = 1900;
inline constexpr int kMaxRecordYear = 2019;

// Parses station rows, rejecting malformed dates, out-of-range dates and
// negative rainfall. Unparseable rainfall cells become missing values rather
// than rejections. Aborts when the rejected fraction exceeds the threshold.
inline std::vector<StationRecord> parse_station_csv(const std::string& path,
                                                    const StationCsvSchema& schema,
                                                    ParseStats* stats = nullptr,
                                                    double reject_threshold = 0.10) {
    const CsvTable table = read_csv(path);
    const std::size_t id_col = table.column(schema.station_id);
    const std::size_t district_col = table.column(schema.district);
    const std::size_t date_col = table.column(schema.date);
    const std::size_t rain_col = table.column(schema.rainfall);
    if (id_col == static_cast<std::size_t>(-1)) throw MissingColumnError(schema.station_id);
    if (district_col == static_cast<std::size_t>(-1)) throw MissingColumnError(schema.district);
    if (date_col == static_cast<std::size_t>(-1)) throw MissingColumnError(schema.date);
    if (rain_col == static_cast<std::size_t>(-1)) throw MissingColumnError(schema.rainfall);

    std::vector<StationRecord> records;
    records.reserve(table.rows.size());
    ParseStats local;
    local.total_rows = table.rows.size();

    for (const auto& row : table.rows) {
        if (row.size() <= std::max({id_col, district_col, date_col, rain_col})) {
            ++local.rejected_rows;
            continue;
        }
        const auto date = parse_iso_date(row[date_col]);
        if (!date || date->year < kMinRecordYear || date->year > kMaxRecordYear) {
            ++local.rejected_rows;
            continue;
        }
        StationRecord rec;
        rec.station_id = row[id_col];
        rec.district = row[district_col];
        rec.date = *date;
        const std::string& cell = row[rain_col];
        if (cell.empty()) {
            rec.rainfall_mm = std::nullopt;
            ++local.missing_cells;
        } else {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                if (pos != cell.size()) {
                    rec.rainfall_mm = std::nullopt;
                    ++local.missing_cells;
                } else if (v < 0.0) {
                    ++local.rejected_rows;
                    continue;
                } else {
                    rec.rainfall_mm = v;
                }
            } catch (const std::exception&) {
                rec.rainfall_mm = std::nullopt;
                ++local.missing_cells;
            }
        }
        records.push_back(std::move(rec));
    }

    if (local.total_rows > 0 &&
        static_cast<double>(local.rejected_rows) >
            reject_threshold * static_cast<double>(local.total_rows)) {
        throw TooManyRejectsError(local.rejected_rows, local.total_rows);
    }
    if (stats) *stats = local;
    return records;
}

// District-level daily sums plus the month coverage needed for aggregation.
struct DailySeries {
    std::vector<std::string> districts;                    // sorted by name
    std::vector<std::map<Date, double>> sums;              // per district, present-value sums
    std::vector<std::set<long>> covered_months;            // per district, month serials with any record
    YearMonth first_month;
    YearMonth last_month;
};

// Sums present rainfall_mm per (district, date). A date with no present
// readings contributes 0 to later monthly totals, so only nonzero-information
// days are stored; a record with a missing value still counts as coverage.
inline DailySeries district_daily(const std::vector<StationRecord>& records) {
    if (records.empty()) throw Error("no station records to aggregate");
    std::map<std::string, std::size_t> index;
    for (const auto& rec : records) index.emplace(rec.district, 0);
    DailySeries daily;
    daily.districts.reserve(index.size());
    for (auto& [name, idx] : index) {
        idx = daily.districts.size();
        daily.districts.push_back(name);
    }
    daily.sums.resize(daily.districts.size());
    daily.covered_months.resize(daily.districts.size());

    long min_serial = 0, max_serial = 0;
    bool first = true;
    for (const auto& rec : records) {
        const std::size_t d = index[rec.district];
        const long month_serial = rec.date.year_month().serial();
        daily.covered_months[d].insert(month_serial);
        if (rec.rainfall_mm) daily.sums[d][rec.date] += *rec.rainfall_mm;
        if (first || month_serial < min_serial) min_serial = month_serial;
        if (first || month_serial > max_serial) max_serial = month_serial;
        first = false;
    }
    daily.first_month = YearMonth::from_serial(min_serial);
    daily.last_month = YearMonth::from_serial(max_serial);
    return daily;
}

// Monthly totals per district on the dense union month axis. Every district
// must have at least one record in every axis month.
inline RainfallPanel monthly_aggregate(const DailySeries& daily) {
    RainfallPanel panel;
    panel.districts = daily.districts;
    const long first = daily.first_month.serial();
    const long last = daily.last_month.serial();
    for (long s = first; s <= last; ++s) panel.months.push_back(YearMonth::from_serial(s));

    const std::size_t T = panel.months.size();
    panel.values.assign(panel.district_count(), std::vector<double>(T, 0.0));
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        for (long s = first; s <= last; ++s) {
            if (!daily.covered_months[d].count(s))
                throw GapInCoverageError("district " + panel.districts[d] +
                                         " has no records in " +
                                         YearMonth::from_serial(s).label());
        }
        for (const auto& [date, value] : daily.sums[d]) {
            panel.values[d][static_cast<std::size_t>(date.year_month().serial() - first)] += value;
        }
    }
    if (T >= 2) panel.train_end = T - 2; // provisional until split_panel
    return panel;
}

} // namespace raincast
