#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace moreau::reg {

/// One frozen reference value bound to an executable evaluation. The
/// tolerance combines a relative band with half an ulp of the printed
/// decimal, so values published at low precision compare fairly.
struct RegressionCase {
  std::string id;
  std::string module_op;          // producing module / operation
  std::string inputs;             // human-readable input description
  double expected = 0.0;
  double rel_tol = 1e-3;
  double printed_ulp = 0.0;       // half of it is added to the band
  std::string provenance;         // verbatim source quote fragment
  std::function<double()> evaluate;
};

struct CaseResult {
  RegressionCase c;
  double computed = 0.0;
  double error = 0.0;
  double allowed = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<CaseResult> results;
  int failures = 0;
  bool all_pass() const { return failures == 0; }
};

/// Hooks for fault-injection tests: each override, when set, replaces
/// the production formula its cases evaluate.
struct CorpusOverrides {
  std::function<double(double, double)> usv_eta;  // (u1, u2) -> eta_m
};

/// The full frozen corpus. Throws when construction yields no cases.
std::vector<RegressionCase> corpus(const CorpusOverrides& overrides = {});

Report run_all(const std::vector<RegressionCase>& cases);

void write_table(std::ostream& os, const Report& report);
void write_junit_xml(std::ostream& os, const Report& report);

}  // namespace moreau::reg
