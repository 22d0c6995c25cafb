#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drplab/scenario.hpp"

namespace drplab {

// One loaded column of hourly data with calendar fields derived from its
// timestamps. Units are whatever the file header declared.
struct LoadedSeries {
    std::vector<double> values;
    std::vector<CalendarEntry> calendar;
    std::vector<std::int64_t> epochs;  // seconds, strictly increasing, hourly
    std::string unit;
};

// Calendar fields of an epoch timestamp (UTC): hour 0..23, ISO week minus
// one clamped to [0, 51], month 0..11.
CalendarEntry calendar_of_epoch(std::int64_t epoch);

// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" into epoch seconds. Throws IoError.
std::int64_t parse_timestamp(const std::string& text);

// Loads a two-column file "timestamp,<unit>" with hourly rows. Rejects
// gaps, duplicates, and a header unit different from expected_unit.
LoadedSeries load_series(const std::string& path, const std::string& expected_unit);

// Multiplies every value by factor (> 0); calendar untouched.
LoadedSeries scale_series(LoadedSeries series, double factor);

// Writes the series back in the same format, full double precision.
void write_series(const std::string& path, const LoadedSeries& series);

}  // namespace drplab
