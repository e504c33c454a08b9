#include "loewner/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace loewner {
namespace {

// Fixed-point formatting keeps the SVG byte-identical across runs and locales.
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

struct Box {
  double x0, y0, w, h;           // pixel rectangle
  double lo_x, hi_x, lo_y, hi_y;  // data range
  double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * w; }
  double py(double y) const { return y0 + h - (y - lo_y) / (hi_y - lo_y) * h; }
};

void pad(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

}  // namespace

std::string trace_svg(const TracePath& p, const Driver& d, int width, int height) {
  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  for (const auto& g : p.gamma) {
    lo_x = std::min(lo_x, g.real());
    hi_x = std::max(hi_x, g.real());
    hi_y = std::max(hi_y, g.imag());
  }
  pad(lo_x, hi_x);
  pad(lo_y, hi_y);
  // Equal scales on both axes so angles in the picture are true angles.
  const double margin = 40.0;
  const double avail_w = width - 2 * margin, avail_h = height - 2 * margin;
  const double scale = std::min(avail_w / (hi_x - lo_x), avail_h / (hi_y - lo_y));
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  lo_x = cx - avail_w / scale / 2;
  hi_x = cx + avail_w / scale / 2;
  lo_y = cy - avail_h / scale / 2;
  hi_y = cy + avail_h / scale / 2;
  const Box main{margin, margin, avail_w, avail_h, lo_x, hi_x, lo_y, hi_y};

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
       " " + std::to_string(height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" fill=\"white\"/>\n";
  s += "<rect x=\"" + num(main.x0) + "\" y=\"" + num(main.y0) + "\" width=\"" + num(main.w) +
       "\" height=\"" + num(main.h) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // Real axis.
  if (lo_y <= 0.0 && hi_y >= 0.0)
    s += "<line x1=\"" + num(main.px(lo_x)) + "\" y1=\"" + num(main.py(0)) + "\" x2=\"" +
         num(main.px(hi_x)) + "\" y2=\"" + num(main.py(0)) +
         "\" stroke=\"gray\" stroke-width=\"0.5\"/>\n";
  s += "<text x=\"" + num(main.x0) + "\" y=\"" + num(main.y0 + main.h + 16) +
       "\" font-family=\"monospace\" font-size=\"11\">x " + num(lo_x) + " .. " + num(hi_x) +
       "</text>\n";
  s += "<text x=\"" + num(main.x0 + main.w - 150) + "\" y=\"" + num(main.y0 + main.h + 16) +
       "\" font-family=\"monospace\" font-size=\"11\">y " + num(lo_y) + " .. " + num(hi_y) +
       "</text>\n";
  s += "<polyline fill=\"none\" stroke=\"navy\" stroke-width=\"1.5\" points=\"";
  for (const auto& g : p.gamma) s += num(main.px(g.real())) + "," + num(main.py(g.imag())) + " ";
  s += "\"/>\n";

  // Driver inset.
  const double iw = 0.3 * avail_w, ih = 0.22 * avail_h;
  const int samples = 200;
  const double T = d.horizon();
  double u_lo = 0.0, u_hi = 0.0;
  std::vector<double> u(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    u[static_cast<std::size_t>(k)] = d.value(T * k / samples);
    u_lo = std::min(u_lo, u[static_cast<std::size_t>(k)]);
    u_hi = std::max(u_hi, u[static_cast<std::size_t>(k)]);
  }
  pad(u_lo, u_hi);
  const Box inset{margin + 8, margin + 8, iw, ih, 0.0, T, u_lo, u_hi};
  s += "<rect x=\"" + num(inset.x0) + "\" y=\"" + num(inset.y0) + "\" width=\"" + num(iw) +
       "\" height=\"" + num(ih) + "\" fill=\"white\" stroke=\"gray\" stroke-width=\"0.8\"/>\n";
  s += "<polyline fill=\"none\" stroke=\"darkred\" stroke-width=\"1\" points=\"";
  for (int k = 0; k <= samples; ++k)
    s += num(inset.px(T * k / samples)) + "," + num(inset.py(u[static_cast<std::size_t>(k)])) + " ";
  s += "\"/>\n";
  s += "<text x=\"" + num(inset.x0 + 4) + "\" y=\"" + num(inset.y0 + 12) +
       "\" font-family=\"monospace\" font-size=\"10\">U(t), " + d.family() + "</text>\n";
  s += "</svg>\n";
  return s;
}

nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config) {
  return {{"tool", "loewner"}, {"version", kVersion}, {"subcommand", subcommand}, {"config", config}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace loewner
