#include "loewner/driver_io.hpp"

#include <fstream>
#include <sstream>

#include "loewner/errors.hpp"
#include "loewner/gallery.hpp"

namespace loewner {

namespace {

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;
};

Location locate(std::string_view text, std::size_t offset) {
  Location loc;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

[[noreturn]] void fail(std::string_view text, const std::string& what, std::size_t offset) {
  const auto loc = locate(text, offset);
  throw ParseError(what, offset, loc.line, loc.column);
}

std::size_t key_offset(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : pos;
}

// Byte offset of the opening bracket of the index-th inner array after "knots".
std::size_t knot_offset(std::string_view text, std::size_t index) {
  std::size_t pos = text.find('[', key_offset(text, "knots"));
  if (pos == std::string_view::npos) return 0;
  int depth = 0;
  std::size_t seen = 0;
  bool in_string = false;
  for (std::size_t i = pos; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '"') in_string = !in_string;
    if (in_string) continue;
    if (ch == '[') {
      ++depth;
      if (depth == 2) {
        if (seen == index) return i;
        ++seen;
      }
    } else if (ch == ']') {
      if (--depth == 0) break;
    }
  }
  return pos;
}

}  // namespace

Driver parse_driver(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(text, std::string("malformed JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!j.is_object()) fail(text, "driver description must be a JSON object", 0);

  std::string kind = "analytic";
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) fail(text, "'kind' must be a string", key_offset(text, "kind"));
    kind = j["kind"].get<std::string>();
  }
  std::optional<double> horizon;
  if (j.contains("horizon")) {
    if (!j["horizon"].is_number() || !(j["horizon"].get<double>() > 0.0))
      fail(text, "'horizon' must be a positive number", key_offset(text, "horizon"));
    horizon = j["horizon"].get<double>();
  }

  if (kind == "samples") {
    if (!j.contains("knots") || !j["knots"].is_array())
      fail(text, "samples driver needs a 'knots' array", key_offset(text, "knots"));
    const auto& arr = j["knots"];
    if (arr.size() < 2) fail(text, "samples driver needs at least two knots", knot_offset(text, 0));
    std::vector<Knot> knots;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const auto& e = arr[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(text, "knot " + std::to_string(k) + " must be a pair [t, u]", knot_offset(text, k));
      const double t = e[0].get<double>();
      const double u = e[1].get<double>();
      if (k == 0 && (t != 0.0 || u != 0.0))
        fail(text, "knots must start at [0, 0]", knot_offset(text, 0));
      if (k > 0 && !(t > knots.back().first))
        fail(text, "knot times must be strictly increasing (knot " + std::to_string(k) + ")",
             knot_offset(text, k));
      knots.emplace_back(t, u);
    }
    const double end = knots.back().first;
    if (horizon && *horizon > end * (1.0 + 1e-12))
      fail(text, "'horizon' exceeds the last knot time", key_offset(text, "horizon"));
    return Driver(make_samples_form(std::move(knots)), horizon.value_or(end));
  }
  if (kind == "analytic") {
    if (!j.contains("family") || !j["family"].is_string())
      fail(text, "analytic driver needs a 'family' string", key_offset(text, "family"));
    nlohmann::json params = j.value("params", nlohmann::json::object());
    if (!params.is_object()) fail(text, "'params' must be an object", key_offset(text, "params"));
    if (horizon) params["horizon"] = *horizon;
    try {
      return make_example(j["family"].get<std::string>(), params);
    } catch (const DomainError& e) {
      fail(text, e.what(), key_offset(text, "family"));
    }
  }
  fail(text, "unknown driver kind '" + kind + "'", key_offset(text, "kind"));
}

Driver load_driver(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open driver file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_driver(buf.str());
}

nlohmann::json driver_to_json(const Driver& d) {
  nlohmann::json params = d.params();
  if (d.family() == "samples") {
    return {{"kind", "samples"}, {"horizon", d.horizon()}, {"knots", params["knots"]}};
  }
  return {{"kind", "analytic"}, {"horizon", d.horizon()}, {"family", d.family()}, {"params", params}};
}

}  // namespace loewner
