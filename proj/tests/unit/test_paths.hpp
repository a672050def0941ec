// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#ifndef ATTNDSE_SOURCE_DIR
#error "ATTNDSE_SOURCE_DIR must be defined"
#endif

namespace adse {

inline std::string source_path(const std::string& rel) { return std::string(ATTNDSE_SOURCE_DIR) + "/" + rel; }
inline std::string config_path(const std::string& name) { return source_path("configs/" + name); }
inline std::string fixture_path(const std::string& name) { return source_path("tests/fixtures/" + name); }
inline std::string golden_path(const std::string& name) { return source_path("tests/golden/" + name); }

}  // namespace adse
