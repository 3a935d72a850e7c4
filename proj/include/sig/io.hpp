#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "sig/attention.hpp"
#include "sig/error.hpp"

namespace sig {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) fail(errc::io_error, "short write to '" + path.string() + "'");
}

/// Shortest round-trip decimal form of a double, locale independent.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Attention map file: first line "H W", then H lines of W space-separated
/// reals (row y = 0 first).
inline std::string format_attention_map(const AttentionMap& map) {
    std::string out = std::to_string(map.height) + " " + std::to_string(map.width) + "\n";
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (x) out += ' ';
            out += format_double(map.at(x, y));
        }
        out += '\n';
    }
    return out;
}

inline AttentionMap parse_attention_map(const std::string& text) {
    std::istringstream in(text);
    int h = 0, w = 0;
    if (!(in >> h >> w) || h <= 0 || w <= 0)
        fail(errc::malformed_json, "attention map must start with 'H W'");
    AttentionMap map(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v;
            if (!(in >> v)) fail(errc::malformed_json, "attention map is missing values");
            map.at(x, y) = v;
        }
    double trailing;
    if (in >> trailing) fail(errc::malformed_json, "attention map has trailing values");
    return map;
}

inline AttentionMap read_attention_map(const std::filesystem::path& path) {
    return parse_attention_map(read_file(path));
}

inline void write_attention_map(const std::filesystem::path& path, const AttentionMap& map) {
    write_file(path, format_attention_map(map));
}

inline AttentionGrid read_attention_grid(const std::filesystem::path& path) {
    const AttentionMap map = read_attention_map(path);
    if (map.width != kGridSize || map.height != kGridSize)
        fail(errc::size_mismatch, "'" + path.string() + "' is not a 10x10 grid");
    AttentionGrid grid;
    for (int y = 0; y < kGridSize; ++y)
        for (int x = 0; x < kGridSize; ++x) grid.at(x, y) = map.at(x, y);
    return grid;
}

inline void write_attention_grid(const std::filesystem::path& path, const AttentionGrid& grid) {
    AttentionMap map(kGridSize, kGridSize);
    for (int y = 0; y < kGridSize; ++y)
        for (int x = 0; x < kGridSize; ++x) map.at(x, y) = grid.at(x, y);
    write_attention_map(path, map);
}

/// Gaze trace CSV: header "frame,x,y", one sample per row.
inline std::vector<GazeSample> parse_gaze_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(errc::malformed_json, "gaze trace is empty");
    // Tolerate a UTF-8 BOM and trailing carriage return.
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "frame,x,y") fail(errc::malformed_json, "gaze trace must start with header frame,x,y");

    std::vector<GazeSample> samples;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        GazeSample s;
        char comma1 = 0, comma2 = 0;
        std::istringstream row(line);
        if (!(row >> s.frame >> comma1 >> s.x >> comma2 >> s.y) || comma1 != ',' || comma2 != ',')
            fail(errc::malformed_json, "gaze trace line " + std::to_string(line_no) + " is malformed");
        samples.push_back(s);
    }
    return samples;
}

inline std::vector<GazeSample> read_gaze_trace(const std::filesystem::path& path) {
    return parse_gaze_trace(read_file(path));
}

/// Homography calibration file:
/// {"correspondences":[{"image":[u,v],"grid":[X,Y]}, ...]}
inline std::vector<Correspondence> parse_homography_config(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("correspondences") ||
        !doc["correspondences"].is_array())
        fail(errc::malformed_json, "expected an object with a 'correspondences' array");
    std::vector<Correspondence> out;
    for (const auto& entry : doc["correspondences"]) {
        if (!entry.is_object() || !entry.contains("image") || !entry.contains("grid") ||
            !entry["image"].is_array() || entry["image"].size() != 2 ||
            !entry["grid"].is_array() || entry["grid"].size() != 2 ||
            !entry["image"][0].is_number() || !entry["image"][1].is_number() ||
            !entry["grid"][0].is_number() || !entry["grid"][1].is_number())
            fail(errc::malformed_json, "each correspondence needs image:[u,v] and grid:[X,Y]");
        out.push_back({entry["image"][0].get<double>(), entry["image"][1].get<double>(),
                       entry["grid"][0].get<double>(), entry["grid"][1].get<double>()});
    }
    return out;
}

inline std::vector<Correspondence> read_homography_config(const std::filesystem::path& path) {
    return parse_homography_config(read_file(path));
}

}  // namespace sig
