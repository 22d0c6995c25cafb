#include "drplab/approx/archive.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "drplab/util/errors.hpp"

namespace drplab::approx {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'P', 'A'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_str(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& is) {
    std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    return s;
}

}  // namespace

void Archive::put_bundle(const std::string& label, const Bundle& b) {
    for (const auto& view : b.views()) {
        Entry e;
        e.rows = view.rows;
        e.cols = view.cols;
        e.data.assign(b.value.begin() + view.offset,
                      b.value.begin() + view.offset + view.size);
        arrays[label + ":" + view.name] = std::move(e);
    }
}

void Archive::get_bundle(const std::string& label, Bundle& b) const {
    for (const auto& view : b.views()) {
        auto it = arrays.find(label + ":" + view.name);
        if (it == arrays.end())
            throw IoError("archive: missing array " + label + ":" + view.name);
        const Entry& e = it->second;
        if (e.rows != view.rows || e.cols != view.cols || e.data.size() != view.size)
            throw IoError("archive: shape mismatch for " + label + ":" + view.name);
        std::copy(e.data.begin(), e.data.end(), b.value.begin() + view.offset);
    }
}

void save_archive(const std::string& path, const Archive& a) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write archive " + path);
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(a.meta.size()));
    for (const auto& [k, v] : a.meta) {
        write_str(os, k);
        write_str(os, v);
    }
    write_u32(os, static_cast<std::uint32_t>(a.arrays.size()));
    for (const auto& [name, e] : a.arrays) {
        write_str(os, name);
        write_u32(os, static_cast<std::uint32_t>(e.rows));
        write_u32(os, static_cast<std::uint32_t>(e.cols));
        os.write(reinterpret_cast<const char*>(e.data.data()),
                 static_cast<std::streamsize>(e.data.size() * sizeof(double)));
    }
}

Archive load_archive(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open archive " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw IoError(path + ": not a drplab archive");
    std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw IoError(path + ": unsupported archive version " + std::to_string(version));
    Archive a;
    std::uint32_t n_meta = read_u32(is);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        std::string k = read_str(is);
        a.meta[k] = read_str(is);
    }
    std::uint32_t n_arrays = read_u32(is);
    for (std::uint32_t i = 0; i < n_arrays; ++i) {
        std::string name = read_str(is);
        Archive::Entry e;
        e.rows = static_cast<int>(read_u32(is));
        e.cols = static_cast<int>(read_u32(is));
        e.data.resize(static_cast<std::size_t>(e.rows) * e.cols);
        is.read(reinterpret_cast<char*>(e.data.data()),
                static_cast<std::streamsize>(e.data.size() * sizeof(double)));
        if (!is) throw IoError(path + ": truncated archive");
        a.arrays[name] = std::move(e);
    }
    return a;
}

}  // namespace drplab::approx
