#include "drplab/series_io.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "drplab/util/errors.hpp"

namespace drplab {

namespace {

std::tm epoch_to_tm(std::int64_t epoch) {
    std::time_t t = static_cast<std::time_t>(epoch);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return tm;
}

std::string format_timestamp(std::int64_t epoch) {
    std::tm tm = epoch_to_tm(epoch);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace

CalendarEntry calendar_of_epoch(std::int64_t epoch) {
    std::tm tm = epoch_to_tm(epoch);
    char week_buf[8];
    std::strftime(week_buf, sizeof(week_buf), "%V", &tm);  // ISO week 01..53
    int week = std::atoi(week_buf) - 1;
    CalendarEntry c;
    c.hour = tm.tm_hour;
    c.week = std::clamp(week, 0, 51);
    c.month = tm.tm_mon;
    return c;
}

std::int64_t parse_timestamp(const std::string& text) {
    std::string t = text;
    if (!t.empty() && (t.back() == 'Z' || t.back() == 'z')) t.pop_back();
    int year, mon, day, hour, min, sec = 0;
    int fields = std::sscanf(t.c_str(), "%d-%d-%dT%d:%d:%d", &year, &mon, &day, &hour,
                             &min, &sec);
    if (fields < 5)
        throw IoError("timestamp '" + text + "' is not ISO-8601 (YYYY-MM-DDTHH:MM[:SS])");
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = mon - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = min;
    tm.tm_sec = sec;
    std::time_t epoch = timegm(&tm);
    if (epoch == static_cast<std::time_t>(-1))
        throw IoError("timestamp '" + text + "' out of range");
    return static_cast<std::int64_t>(epoch);
}

LoadedSeries load_series(const std::string& path, const std::string& expected_unit) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series file " + path);

    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::istringstream header(line);
    std::string col0, unit;
    if (!std::getline(header, col0, ',') || !std::getline(header, unit) || col0 != "timestamp")
        throw IoError(path + ": header must be 'timestamp,<unit>'");
    if (!expected_unit.empty() && unit != expected_unit)
        throw IoError(path + ": unit '" + unit + "' does not match expected '" +
                      expected_unit + "'");

    LoadedSeries s;
    s.unit = unit;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError(path + ": row " + std::to_string(row) + " has no value column");
        std::int64_t epoch = parse_timestamp(line.substr(0, comma));
        std::size_t consumed = 0;
        double value = std::stod(line.substr(comma + 1), &consumed);
        if (!s.epochs.empty()) {
            std::int64_t gap = epoch - s.epochs.back();
            if (gap == 0)
                throw IoError(path + ": duplicated timestamp at row " + std::to_string(row));
            if (gap != 3600)
                throw IoError(path + ": non-hourly spacing (" + std::to_string(gap) +
                              " s) before row " + std::to_string(row));
        }
        s.epochs.push_back(epoch);
        s.values.push_back(value);
        s.calendar.push_back(calendar_of_epoch(epoch));
    }
    if (s.values.empty()) throw IoError(path + ": no data rows");
    return s;
}

LoadedSeries scale_series(LoadedSeries series, double factor) {
    if (!(factor > 0.0)) throw ValidationError("scale_series: factor must be > 0");
    for (double& v : series.values) v *= factor;
    return series;
}

void write_series(const std::string& path, const LoadedSeries& series) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write series file " + path);
    out << "timestamp," << series.unit << "\n";
    char buf[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.values[i]);
        out << format_timestamp(series.epochs[i]) << ',' << buf << "\n";
    }
}

}  // namespace drplab
