#pragma once

#include <string>
#include <vector>

#include "magnls/config.hpp"

namespace magnls {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool all_pass() const {
    for (const auto& s : suites) {
      if (!s.pass) return false;
    }
    return true;
  }
};

/// Randomized invariant battery over the configured problem: potential
/// symmetries, equivariance, pseudometric axioms, curl consistency,
/// auxiliary-potential bounds, admissibility conditions, penalized
/// nonlinearity properties, diamagnetic and Hardy inequalities, ray
/// projection against the closed form, gradient/finite-difference
/// agreement, and discrete gauge covariance. Draws from the config seed.
VerifyReport run_verify_suites(const RunConfig& cfg);

}  // namespace magnls
