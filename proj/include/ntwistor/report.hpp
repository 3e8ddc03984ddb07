// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntwistor/sampling.hpp"

namespace ntw {

struct Stage {
  std::string name;
  double max_residual = 0.0;
  int points_tested = 0;
  double tol = 0.0;

  bool pass() const { return max_residual <= tol; }
};

struct VerificationReport {
  std::string command;
  std::vector<Stage> stages;
  std::uint64_t seed = 0;
  Box box;
  double tol = 0.0;

  bool pass() const;
  void add(const std::string& name, double residual, int points, double stage_tol);
};

/// Canonical JSON bytes: keys sorted, floats with 17 significant digits,
/// UTF-8, trailing newline.  Identical reports produce identical bytes.
std::string emit(const VerificationReport& report);

/// 17-significant-digit float formatting shared with the emitter.
std::string canonical_double(double v);

}  // namespace ntw
