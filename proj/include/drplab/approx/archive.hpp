#pragma once

#include <map>
#include <string>
#include <vector>

#include "drplab/approx/bundle.hpp"

namespace drplab::approx {

// Flat named-array archive with a version tag and a small string metadata
// map. Doubles are stored raw (little-endian IEEE-754), so a save/load
// round trip is bit-exact.
struct Archive {
    std::map<std::string, std::string> meta;
    struct Entry {
        int rows = 0, cols = 0;
        std::vector<double> data;
    };
    std::map<std::string, Entry> arrays;

    void put_bundle(const std::string& label, const Bundle& b);
    // Copies values into a bundle built with the same architecture; throws
    // on any missing name or shape mismatch.
    void get_bundle(const std::string& label, Bundle& b) const;
};

void save_archive(const std::string& path, const Archive& a);
Archive load_archive(const std::string& path);

}  // namespace drplab::approx
