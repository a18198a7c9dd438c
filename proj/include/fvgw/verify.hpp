#pragma once

// Property suites run by `fvgw verify`: the discrete calculus identities,
// derived-function identities, flux hypotheses, residual and solver checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fvgw {

struct VerifyOptions {
  bool full = false;
  std::uint64_t seed = 20240917;
  /// Suite name, module name or "module.suite"; empty runs everything.
  std::optional<std::string> filter;
};

struct SuiteOutcome {
  bool pass = true;
  std::string detail;
};

struct SuiteInfo {
  std::string module;
  std::string name;
  std::function<SuiteOutcome(const VerifyOptions&)> run;
};

struct SuiteResult {
  std::string module;
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

const std::vector<SuiteInfo>& verify_suites();

/// Seed from FVGW_SEED when set, otherwise the default.
std::uint64_t verify_seed_from_env(std::uint64_t fallback);

bool suite_matches(const SuiteInfo& suite, const std::string& filter);

std::vector<SuiteResult> run_verify(const VerifyOptions& options);

}  // namespace fvgw
