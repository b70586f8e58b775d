#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uctt/instance.hpp"

#ifndef UCTT_FIXTURE_DIR
#error "UCTT_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(UCTT_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string fixture_text(const std::string& name) { return read_file(fixture_path(name)); }

/// The two-course, two-room, 2x2-grid instance used across the suite.
inline uctt::Instance toy_instance() { return uctt::parse_instance(fixture_text("toy01.ctt")); }

}  // namespace testsupport
