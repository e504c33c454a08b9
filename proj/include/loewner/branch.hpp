#pragma once

#include <complex>

namespace loewner {

/// Square root of z in the closed upper half-plane. On [0, inf) this is the nonnegative root.
std::complex<double> upper_sqrt(std::complex<double> z);

/// Distance from z to the cut [0, inf).
double distance_to_cut(std::complex<double> z);

/// Default guard: the closest-root rule applies within 1e-9 (1 + |phi|) of the cut.
inline constexpr double kDefaultBranchGuard = 1e-9;

/// Continue a branch square root from prev (Im prev >= 0) to a root of next_phi.
///
/// Away from the cut the closed upper half-plane root is unique. Within guard (1 + |phi|)
/// of [0, inf) both u and -conj(u) are admissible and the one closest to prev wins; ties go
/// to the root with nonnegative real part.
std::complex<double> branch_sqrt_step(std::complex<double> prev, std::complex<double> next_phi,
                                      double guard = kDefaultBranchGuard);

}  // namespace loewner
