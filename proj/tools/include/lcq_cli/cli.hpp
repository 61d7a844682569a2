#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lcq::cli {

/// Runs one `lcq` invocation. args excludes the program name. Results go to
/// `out` (or the --out file), machine-readable errors to `err`.
/// Exit codes: 0 success, 1 verification failure, 2 configuration or
/// computation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct VerifyRow {
  std::string test;
  double value = 0.0;
  double reference = 0.0;
  double residual = 0.0;
  double budget = 0.0;
  bool pass = false;
};

/// The invariant battery behind `lcq verify`. Deterministic for a seed and
/// independent of the worker count.
std::vector<VerifyRow> verify_battery(std::uint64_t seed);

/// CSV with columns test,value,reference,residual,budget,pass.
std::string verify_csv(const std::vector<VerifyRow>& rows);

}  // namespace lcq::cli
