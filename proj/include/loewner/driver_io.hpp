#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "loewner/driver.hpp"

namespace loewner {

/// Parse a driver description:
///   {"horizon": T, "kind": "analytic", "family": name, "params": {...}}
///   {"kind": "samples", "knots": [[t, u], ...], "horizon": T?}
/// Throws ParseError carrying the byte offset and line/column of the offending element.
Driver parse_driver(std::string_view text);
Driver load_driver(const std::filesystem::path& path);

/// Inverse of parse_driver for samples and gallery families.
nlohmann::json driver_to_json(const Driver& d);

}  // namespace loewner
