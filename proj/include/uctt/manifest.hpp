#pragma once

// Run manifest: one JSON document per CLI run recording the command, inputs,
// seed, resolved configuration, and a checksum per emitted artifact.

#include <zlib.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace uctt {

inline std::string crc32_of_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for checksumming");
    uLong crc = crc32(0L, Z_NULL, 0);
    char buffer[1 << 16];
    while (in.read(buffer, sizeof buffer) || in.gcount() > 0)
        crc = crc32(crc, reinterpret_cast<const Bytef*>(buffer), static_cast<uInt>(in.gcount()));
    char hex[32];
    std::snprintf(hex, sizeof hex, "%08lx", static_cast<unsigned long>(crc & 0xffffffffUL));
    return std::string("crc32:") + hex;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

struct RunManifest {
    std::string command;
    std::string input_path;
    uint64_t seed = 0;
    nlohmann::json config;  // resolved option values, post-precedence
    std::vector<std::pair<std::string, std::string>> outputs;  // (path, checksum)
    std::string started_at;
    std::string finished_at;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["input"] = input_path;
        j["seed"] = seed;
        j["config"] = config;
        j["outputs"] = nlohmann::json::array();
        for (const auto& [path, checksum] : outputs)
            j["outputs"].push_back({{"path", path}, {"checksum", checksum}});
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        return j;
    }
};

inline void write_manifest(const std::string& path, const RunManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << manifest.to_json().dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing manifest to '" + path + "'");
}

}  // namespace uctt
