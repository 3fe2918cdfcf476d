#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kms/conformal.hpp"
#include "kms/eigensolver.hpp"
#include "kms/families.hpp"
#include "kms/lattice.hpp"
#include "kms/periods.hpp"
#include "kms/spectral.hpp"
#include "kms/structure.hpp"

namespace kms {

enum class WeightRange { all_reals, singleton, half_line, undetermined };

std::string to_string(WeightRange r);

// One inverse temperature probed by the classifier.
struct BetaSample {
  double beta = 0.0;
  bool feasible = true;
  std::size_t ray_count = 0;       // extreme solutions produced by the solver
  double worst_residual = 0.0;     // max eigen-equation residual over them
  std::optional<StateCheck> state;  // normalizability of the first solution
  std::optional<FactorResult> factor;
  std::string note;
};

struct InvariantReport {
  std::string family;
  StructureReport structure;
  std::optional<bool> cofinal;
  std::optional<Beta0Result> beta0;  // absent when no cycle exists
  WeightRange weight_range = WeightRange::undetermined;
  std::string weight_range_text;
  std::string state_range_text;
  std::optional<RecurrenceResult> recurrence_at_beta0;
  // "unique-ray", "multiple", or "undetermined"; absent without a beta0.
  std::optional<std::string> uniqueness_at_beta0;
  PeriodResult d;
  DPrimeResult d_prime;
  std::vector<BetaSample> samples;
  // Lattice walks: the minimized moment generating function is the
  // authoritative critical value; the windowed spectral estimate must agree.
  std::optional<MgfMinimum> mgf;
  std::optional<Beta0Result> truncation_crosscheck;
  std::optional<double> spectral_gap;
  std::vector<std::string> notes;
};

struct ClassifyOptions {
  std::vector<double> betas;  // empty: defaults keyed to the weight range
  int depth = 50;             // truncation depth for solving
  int period_depth = 24;      // probe depth for the period search
  double tol = 1e-9;
  int jobs = 1;               // sample evaluation shards; merge order is fixed
};

InvariantReport classify(const GraphFamily& family, const ClassifyOptions& options = {});

// One line of the example-reproduction table.
struct GoldenRow {
  std::string example;
  std::string quantity;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct GoldenReport {
  std::vector<GoldenRow> rows;
  bool all_pass() const;
};

// Recomputes the published quantities for the worked families and compares
// them against the stored expected values.
GoldenReport reproduce_examples();

}  // namespace kms
