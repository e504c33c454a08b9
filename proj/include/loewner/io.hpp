#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "loewner/driver.hpp"
#include "loewner/trace.hpp"

namespace loewner {

inline constexpr const char* kVersion = LOEWNER_VERSION;

/// Self-contained SVG: the trace polyline in an axis box, with the driver U on [0, T] drawn
/// as an inset in the top-left corner. Output depends only on the inputs.
std::string trace_svg(const TracePath& p, const Driver& d, int width = 640, int height = 480);

/// Config echo plus library version, written next to every artifact set.
nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config);

/// Write text to path, creating parent directories. Throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace loewner
