#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace marten {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  bool fast = false;  // reduced ensemble sizes for the smoke profile
  int threads = 0;    // 0 = use thread_budget()
  // When > 0, replaces the pinned per-step volume contraction factor inside
  // the checker. The checker re-derives the factor from its defining formula
  // and fails loudly on any mismatch, so a corrupted constant cannot silently
  // relax the bound; this hook exists to exercise that failure path.
  double contraction_override = -1.0;
};

// The ten self-contained checks covering packing geometry, volume decay,
// length statistics, seminorm estimates, determinism and invariants.
int criterion_count();
CriterionResult run_criterion(int index, const VerifyOptions& opt);
std::vector<CriterionResult> run_all_criteria(const VerifyOptions& opt);

bool all_passed(const std::vector<CriterionResult>& results);
void write_verify_report(std::ostream& os, const std::vector<CriterionResult>& results,
                         const VerifyOptions& opt);
// One line per criterion: "PASS|FAIL <index> <name> (<seconds>s) <detail>".
void print_criterion_lines(std::ostream& os,
                           const std::vector<CriterionResult>& results);

}  // namespace marten
