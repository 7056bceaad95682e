#pragma once

#include <string>

#include "ksdw/workspace.hpp"

namespace ksdw::testing {

inline std::string data_path(const std::string& rel) { return std::string(KSDW_DATA_DIR) + "/" + rel; }

/// The mini-bank workspace, loaded once per test binary.
inline const Workspace& minibank() {
  static const auto ws = Workspace::load(load_config(data_path("minibank/workspace.conf"), [](const std::string&) {
    return std::optional<std::string>();
  }));
  return *ws;
}

}  // namespace ksdw::testing
