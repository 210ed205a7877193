#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "raincast/ingest.hpp"

using namespace raincast;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

const StationCsvSchema kSchema{};

} // namespace

TEST_CASE("parse_station_csv handles the vacuous and basic cases") {
    SECTION("empty file with valid header gives an empty list") {
        const auto path = write_temp_csv("ingest_empty.csv", "station_id,district,date,rainfall_mm\n");
        ParseStats stats;
        const auto records = parse_station_csv(path, kSchema, &stats);
        CHECK(records.empty());
        CHECK(stats.total_rows == 0);
        CHECK(stats.rejected_rows == 0);
    }
    SECTION("a plain row maps fields directly") {
        const auto path = write_temp_csv("ingest_one.csv",
                                         "station_id,district,date,rainfall_mm\n"
                                         "S1,BANKURA,1900-01-01,5.0\n");
        const auto records = parse_station_csv(path, kSchema);
        REQUIRE(records.size() == 1);
        CHECK(records[0].station_id == "S1");
        CHECK(records[0].district == "BANKURA");
        CHECK(records[0].date == Date{1900, 1, 1});
        REQUIRE(records[0].rainfall_mm.has_value());
        CHECK(*records[0].rainfall_mm == 5.0);
    }
    SECTION("negative rainfall rejects the row and counts it") {
        const auto path = write_temp_csv("ingest_neg.csv",
                                         "station_id,district,date,rainfall_mm\n"
                                         "S1,BANKURA,1900-01-01,-3.0\n"
                                         "S1,BANKURA,1900-01-02,1.0\n"
                                         "S1,BANKURA,1900-01-03,1.0\n"
                                         "S1,BANKURA,1900-01-04,1.0\n"
                                         "S1,BANKURA,1900-01-05,1.0\n"
                                         "S1,BANKURA,1900-01-06,1.0\n"
                                         "S1,BANKURA,1900-01-07,1.0\n"
                                         "S1,BANKURA,1900-01-08,1.0\n"
                                         "S1,BANKURA,1900-01-09,1.0\n"
                                         "S1,BANKURA,1900-01-10,1.0\n"
                                         "S1,BANKURA,1900-01-11,1.0\n");
        ParseStats stats;
        const auto records = parse_station_csv(path, kSchema, &stats);
        CHECK(records.size() == 10);
        CHECK(stats.rejected_rows == 1);
    }
}

TEST_CASE("parse_station_csv error paths") {
    SECTION("missing declared column") {
        const auto path = write_temp_csv("ingest_badcol.csv", "station_id,district,when,rainfall_mm\n");
        CHECK_THROWS_AS(parse_station_csv(path, kSchema), MissingColumnError);
    }
    SECTION("malformed and out-of-range dates reject the row") {
        const auto path = write_temp_csv("ingest_dates.csv",
                                         "station_id,district,date,rainfall_mm\n"
                                         "S1,A,1900-02-29,1.0\n"  // 1900 is not a leap year
                                         "S1,A,1899-12-31,1.0\n"
                                         "S1,A,2020-01-01,1.0\n"
                                         "S1,A,01/02/1950,1.0\n"
                                         "S1,A,1950-01-02,1.0\n"
                                         "S1,A,1950-01-03,1.0\n"
                                         "S1,A,1950-01-04,1.0\n"
                                         "S1,A,1950-01-05,1.0\n"
                                         "S1,A,1950-01-06,1.0\n"
                                         "S1,A,1950-01-07,1.0\n");
        // 4 of 10 rows rejected exceeds the default 10% threshold
        CHECK_THROWS_AS(parse_station_csv(path, kSchema), TooManyRejectsError);
        ParseStats stats;
        const auto records = parse_station_csv(path, kSchema, &stats, 0.5);
        CHECK(records.size() == 6);
        CHECK(stats.rejected_rows == 4);
    }
    SECTION("unparseable rainfall becomes missing, not a rejection") {
        const auto path = write_temp_csv("ingest_missing.csv",
                                         "station_id,district,date,rainfall_mm\n"
                                         "S1,A,1950-01-02,n/a\n"
                                         "S1,A,1950-01-03,\n");
        ParseStats stats;
        const auto records = parse_station_csv(path, kSchema, &stats);
        REQUIRE(records.size() == 2);
        CHECK_FALSE(records[0].rainfall_mm.has_value());
        CHECK_FALSE(records[1].rainfall_mm.has_value());
        CHECK(stats.missing_cells == 2);
        CHECK(stats.rejected_rows == 0);
    }
}

namespace {

StationRecord make_record(const std::string& station, const std::string& district, Date date,
                          std::optional<double> mm) {
    StationRecord rec;
    rec.station_id = station;
    rec.district = district;
    rec.date = date;
    rec.rainfall_mm = mm;
    return rec;
}

} // namespace

TEST_CASE("district_daily sums present readings per district-day") {
    SECTION("one station is the identity") {
        const auto daily = district_daily({make_record("S1", "A", {1950, 3, 10}, 4.0)});
        CHECK(daily.sums[0].at(Date{1950, 3, 10}) == 4.0);
    }
    SECTION("two stations in one district add up") {
        const auto daily = district_daily({make_record("S1", "A", {1950, 3, 10}, 3.0),
                                           make_record("S2", "A", {1950, 3, 10}, 2.5)});
        CHECK(daily.sums[0].at(Date{1950, 3, 10}) == 5.5);
    }
    SECTION("a missing reading contributes nothing") {
        const auto daily = district_daily({make_record("S1", "A", {1950, 3, 10}, std::nullopt),
                                           make_record("S2", "A", {1950, 3, 10}, 2.0)});
        CHECK(daily.sums[0].at(Date{1950, 3, 10}) == 2.0);
    }
    SECTION("random rows match an independent grouping oracle") {
        std::mt19937 gen(12345);
        std::uniform_int_distribution<int> day(1, 28);
        std::uniform_real_distribution<double> mm(0.0, 20.0);
        std::vector<StationRecord> records;
        std::map<std::pair<std::string, Date>, double> oracle;
        const std::vector<std::string> districts = {"A", "B", "C"};
        for (int i = 0; i < 500; ++i) {
            const std::string district = districts[gen() % districts.size()];
            const Date date{1950, 1 + static_cast<int>(gen() % 12), day(gen)};
            const double value = mm(gen);
            records.push_back(make_record("S" + std::to_string(gen() % 7), district, date, value));
            oracle[{district, date}] += value;
        }
        const auto daily = district_daily(records);
        for (const auto& [key, expected] : oracle) {
            const std::size_t d = static_cast<std::size_t>(
                std::find(daily.districts.begin(), daily.districts.end(), key.first) -
                daily.districts.begin());
            CHECK(daily.sums[d].at(key.second) == Catch::Approx(expected).epsilon(1e-12));
        }
    }
    SECTION("empty input is an error") { CHECK_THROWS_AS(district_daily({}), Error); }
}

TEST_CASE("monthly_aggregate produces a dense panel of month sums") {
    SECTION("31 January days of 1 mm total 31") {
        std::vector<StationRecord> records;
        for (int day = 1; day <= 31; ++day)
            records.push_back(make_record("S1", "A", {1950, 1, day}, 1.0));
        const auto panel = monthly_aggregate(district_daily(records));
        REQUIRE(panel.month_count() == 1);
        CHECK(panel.values[0][0] == 31.0);
    }
    SECTION("an all-zero month stays zero") {
        std::vector<StationRecord> records;
        for (int day = 1; day <= 30; ++day)
            records.push_back(make_record("S1", "A", {1950, 4, day}, 0.0));
        const auto panel = monthly_aggregate(district_daily(records));
        CHECK(panel.values[0][0] == 0.0);
    }
    SECTION("a randomized month equals an independent accumulator") {
        std::mt19937 gen(777);
        std::uniform_real_distribution<double> mm(0.0, 15.0);
        std::vector<StationRecord> records;
        double oracle = 0.0;
        for (int day = 1; day <= 30; ++day) {
            for (int s = 0; s < 3; ++s) {
                const double value = mm(gen);
                records.push_back(make_record("S" + std::to_string(s), "A", {1950, 6, day}, value));
                oracle += value;
            }
        }
        const auto panel = monthly_aggregate(district_daily(records));
        CHECK(panel.values[0][0] == Catch::Approx(oracle).epsilon(1e-12));
    }
    SECTION("a district with a wholly uncovered month is a coverage gap") {
        const std::vector<StationRecord> records = {
            make_record("S1", "A", {1950, 1, 5}, 1.0), make_record("S1", "A", {1950, 3, 5}, 1.0),
            make_record("S2", "B", {1950, 1, 9}, 1.0), make_record("S2", "B", {1950, 2, 9}, 1.0),
            make_record("S2", "B", {1950, 3, 9}, 1.0)};
        CHECK_THROWS_AS(monthly_aggregate(district_daily(records)), GapInCoverageError);
    }
}

TEST_CASE("aggregation invariants") {
    std::mt19937 gen(31337);
    std::uniform_real_distribution<double> mm(0.0, 25.0);
    std::vector<StationRecord> records;
    double total_present = 0.0;
    for (int month = 1; month <= 4; ++month) {
        for (int day = 1; day <= 28; ++day) {
            for (const auto* district : {"NORTH", "SOUTH"}) {
                const double value = mm(gen);
                records.push_back(make_record("S1", district, {1960, month, day}, value));
                total_present += value;
                if (day % 7 == 0)
                    records.push_back(make_record("S2", district, {1960, month, day}, std::nullopt));
            }
        }
    }
    const auto panel = monthly_aggregate(district_daily(records));

    SECTION("row order does not matter") {
        auto shuffled = records;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const auto panel2 = monthly_aggregate(district_daily(shuffled));
        REQUIRE(panel2.districts == panel.districts);
        REQUIRE(panel2.months.size() == panel.months.size());
        for (std::size_t d = 0; d < panel.district_count(); ++d)
            for (std::size_t t = 0; t < panel.month_count(); ++t)
                CHECK(panel2.values[d][t] == Catch::Approx(panel.values[d][t]).epsilon(1e-12));
    }
    SECTION("total mm is preserved") {
        double panel_total = 0.0;
        for (const auto& row : panel.values)
            for (double v : row) panel_total += v;
        CHECK(panel_total == Catch::Approx(total_present).epsilon(1e-12));
    }
    SECTION("the month axis is dense") {
        CHECK(panel.months.size() ==
              static_cast<std::size_t>(panel.months.back().serial() -
                                       panel.months.front().serial() + 1));
    }
}

TEST_CASE("split_panel sets the train/holdout boundary") {
    RainfallPanel panel;
    panel.districts = {"A"};
    for (long s = YearMonth{1900, 1}.serial(); s <= YearMonth{2019, 12}.serial(); ++s)
        panel.months.push_back(YearMonth::from_serial(s));
    panel.values.assign(1, std::vector<double>(panel.months.size(), 1.0));
    REQUIRE(panel.month_count() == 1440);

    SECTION("default December 2010 split") {
        const auto split = split_panel(panel, YearMonth{2010, 12});
        CHECK(split.train_end == 1331);
        CHECK(split.train_count() == 1332);
        CHECK(split.holdout_count() == 108);
    }
    SECTION("splitting at the last month is out of range") {
        CHECK_THROWS_AS(split_panel(panel, YearMonth{2019, 12}), OutOfRangeError);
    }
    SECTION("December 2009 leaves 1320 training months") {
        CHECK(split_panel(panel, YearMonth{2009, 12}).train_count() == 1320);
    }
    SECTION("months outside the axis are rejected") {
        CHECK_THROWS_AS(split_panel(panel, YearMonth{2048, 1}), OutOfRangeError);
    }
}

TEST_CASE("panel CSV round-trips districts, months and values") {
    RainfallPanel panel;
    panel.districts = {"NORTH", "SOUTH"};
    for (int m = 1; m <= 12; ++m) panel.months.push_back(YearMonth{2000, m});
    panel.values = {{1.5, 0.0, 3.25, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0},
                    {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0}};
    panel.train_end = 10;
    const auto path = (std::filesystem::temp_directory_path() / "panel_rt.csv").string();
    write_panel_csv(panel, path);
    const auto loaded = read_panel_csv(path);
    CHECK(loaded.districts == panel.districts);
    REQUIRE(loaded.months.size() == panel.months.size());
    CHECK(loaded.months.front() == panel.months.front());
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t t = 0; t < 12; ++t) CHECK(loaded.values[d][t] == panel.values[d][t]);
}
