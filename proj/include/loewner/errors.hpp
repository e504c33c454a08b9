#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

/// Argument outside the admissible domain (interval, parameter range, time).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed driver file. Offsets are 0-based bytes; line/column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::size_t line, std::size_t column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ", offset " + std::to_string(offset) + ")"),
        offset_(offset),
        line_(line),
        column_(column) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

/// The reverse or forward integrator could not keep its error under control.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double at)
      : std::runtime_error(what + " at s=" + std::to_string(at)), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

/// The regularization ladder ran out before the Cauchy criterion was met.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double anchor)
      : std::runtime_error(what + " (anchor t=" + std::to_string(anchor) + ")"), anchor_(anchor) {}
  double anchor() const noexcept { return anchor_; }

 private:
  double anchor_;
};

/// The singular integral of r^{-1/2} against the reversed variation diverges at t0.
class DivergentIntegral : public std::runtime_error {
 public:
  explicit DivergentIntegral(double t0)
      : std::runtime_error("singular Stieltjes integral diverges at t0=" + std::to_string(t0)),
        t0_(t0) {}
  double t0() const noexcept { return t0_; }

 private:
  double t0_;
};

/// Incremental and per-anchor traces separated beyond the monitor threshold.
class DriftError : public std::runtime_error {
 public:
  DriftError(double anchor, double drift)
      : std::runtime_error("incremental trace drifted by " + std::to_string(drift) +
                           " at anchor t=" + std::to_string(anchor)),
        anchor_(anchor),
        drift_(drift) {}
  double anchor() const noexcept { return anchor_; }
  double drift() const noexcept { return drift_; }

 private:
  double anchor_;
  double drift_;
};

/// A computation needing (C1) or (C2) was refused because the check failed.
class ConditionFailure : public std::runtime_error {
 public:
  ConditionFailure(const std::string& what, double at)
      : std::runtime_error(what + " (t=" + std::to_string(at) + ")"), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

}  // namespace loewner
