#include "loewner/branch.hpp"

#include <cmath>

namespace loewner {

std::complex<double> upper_sqrt(std::complex<double> z) {
  std::complex<double> r = std::sqrt(z);
  // std::sqrt returns Re >= 0; flip into the upper half-plane. -0.0 imaginary parts
  // (z just below the negative axis) land here too.
  if (r.imag() < 0.0 || (r.imag() == 0.0 && std::signbit(r.imag()) && z.real() < 0.0)) r = -r;
  if (r.imag() == 0.0) r = {r.real(), 0.0};
  return r;
}

double distance_to_cut(std::complex<double> z) {
  return z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z);
}

std::complex<double> branch_sqrt_step(std::complex<double> prev, std::complex<double> next_phi,
                                      double guard) {
  const std::complex<double> u = upper_sqrt(next_phi);
  if (distance_to_cut(next_phi) > guard * (1.0 + std::abs(next_phi))) return u;
  const std::complex<double> v{-u.real(), u.imag()};
  const double du = std::abs(u - prev);
  const double dv = std::abs(v - prev);
  if (dv < du) return v;
  return u;
}

}  // namespace loewner
