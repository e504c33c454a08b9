#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/driver.hpp"

namespace loewner {

/// Construct a named example driver. Parameters not given take the defaults listed by
/// gallery_entries(); "horizon" is accepted by every family (default 1).
///
/// Families: zero, sqrt{c}, logsqrt, power{c, alpha}, monotone_bvlr{c, alpha, eps, scale},
/// spiral, random{seed, knots, amplitude}, ramp{at, width, factor}.
Driver make_example(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

struct GalleryEntry {
  std::string name;
  std::string description;
  nlohmann::json defaults;
  bool bv_lr;  // member of the BV_LR showcase used by validation
};

const std::vector<GalleryEntry>& gallery_entries();

/// Drivers (with default parameters) making up the BV_LR validation gallery.
std::vector<Driver> bvlr_gallery();

/// Construction data of monotone_bvlr: U(s_n) = x_n, U(t_n) = x_n + (t_n - s_n)^{1/2 - eps}.
/// The knot sequence is truncated once t_n - s_n drops below double resolution of 1.
struct MonotoneBvlrLevels {
  std::vector<double> s, t, x;
  double limit;  // U(1)
};
MonotoneBvlrLevels monotone_bvlr_levels(double c, double alpha, double eps, double scale);

}  // namespace loewner
