#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "raincast/csv.hpp"
#include "raincast/errors.hpp"

namespace raincast {

// Calendar month on a dense (year, month) axis. No timezone semantics.
struct YearMonth {
    int year = 0;
    int month = 1; // 1..12

    friend bool operator==(const YearMonth& a, const YearMonth& b) {
        return a.year == b.year && a.month == b.month;
    }
    friend bool operator<(const YearMonth& a, const YearMonth& b) {
        return a.year != b.year ? a.year < b.year : a.month < b.month;
    }

    // Serial month index (0 at year 0, January).
    long serial() const { return static_cast<long>(year) * 12 + (month - 1); }

    static YearMonth from_serial(long s) {
        YearMonth ym;
        ym.year = static_cast<int>(s >= 0 ? s / 12 : (s - 11) / 12);
        ym.month = static_cast<int>(s - static_cast<long>(ym.year) * 12) + 1;
        return ym;
    }

    YearMonth next() const { return from_serial(serial() + 1); }

    std::string label() const {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }

    static YearMonth parse(const std::string& s) {
        int y = 0, m = 0;
        if (std::sscanf(s.c_str(), "%d-%d", &y, &m) != 2 || m < 1 || m > 12)
            throw Error("bad month label: " + s);
        return YearMonth{y, m};
    }
};

// District-by-month rainfall matrix with a train/holdout split marker.
// `train_end` is the index of the last training month; months are dense and
// strictly increasing; all values are nonnegative mm/month.
struct RainfallPanel {
    std::vector<std::string> districts;
    std::vector<YearMonth> months;
    std::vector<std::vector<double>> values; // districts x months
    std::size_t train_end = 0;

    std::size_t district_count() const { return districts.size(); }
    std::size_t month_count() const { return months.size(); }
    std::size_t train_count() const { return train_end + 1; }
    std::size_t holdout_count() const { return month_count() - train_count(); }

    std::size_t month_index(const YearMonth& ym) const {
        if (months.empty() || ym < months.front() || months.back() < ym)
            throw OutOfRangeError("month not on panel axis: " + ym.label());
        return static_cast<std::size_t>(ym.serial() - months.front().serial());
    }

    std::size_t district_index(const std::string& name) const {
        for (std::size_t d = 0; d < districts.size(); ++d)
            if (districts[d] == name) return d;
        throw Error("unknown district: " + name);
    }
};

// Sets the train/holdout boundary. The holdout may not be empty and the
// training side must hold at least two months.
inline RainfallPanel split_panel(RainfallPanel panel, const YearMonth& train_end_month) {
    const std::size_t idx = panel.month_index(train_end_month);
    if (idx < 1 || idx + 1 >= panel.month_count())
        throw OutOfRangeError("train end " + train_end_month.label() +
                              " leaves an empty training or holdout side");
    panel.train_end = idx;
    return panel;
}

inline void write_panel_csv(const RainfallPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "district";
    for (const auto& ym : panel.months) out << "," << ym.label();
    out << "\n";
    for (std::size_t d = 0; d < panel.district_count(); ++d) {
        out << csv_escape(panel.districts[d]);
        for (double v : panel.values[d]) out << "," << format_double(v);
        out << "\n";
    }
}

inline RainfallPanel read_panel_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty() || table.header[0] != "district")
        throw Error("panel CSV must start with a 'district' column: " + path);
    RainfallPanel panel;
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        const YearMonth ym = YearMonth::parse(table.header[c]);
        if (!panel.months.empty() && ym.serial() != panel.months.back().serial() + 1)
            throw Error("panel month axis has gaps at " + ym.label());
        panel.months.push_back(ym);
    }
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw Error("panel row width mismatch in " + path);
        panel.districts.push_back(row[0]);
        std::vector<double> vals;
        vals.reserve(row.size() - 1);
        for (std::size_t c = 1; c < row.size(); ++c) {
            const double v = std::stod(row[c]);
            if (v < 0.0) throw Error("negative panel value in " + path);
            vals.push_back(v);
        }
        panel.values.push_back(std::move(vals));
    }
    if (panel.month_count() < 2) throw Error("panel too small: " + path);
    panel.train_end = panel.month_count() - 2; // provisional; callers re-split
    return panel;
}

} // namespace raincast
