#pragma once

// Differential trace audit: run one program over many random datasets of the
// same shape and require identical traces and step counts.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dotvm/dataset.hpp"
#include "dotvm/evaluator.hpp"

namespace dotvm {

struct Regimen {
  std::string name;
  double na_fraction = 0;
  double zero_fraction = 0;
};

// NA 10..50% and zero 50..90%, in steps of 10.
std::vector<Regimen> default_regimens();

// Cells are NA with probability na_fraction, else 0 with probability
// zero_fraction, else drawn from a small set of genotype-like values.
RawDataset random_dataset(const std::string& name, std::int64_t rows, std::int64_t cols, const Regimen& regimen,
                          std::mt19937_64& rng);

struct AuditConfig {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  int trials = 10;  // per regimen
  std::uint64_t seed = 0;
  std::vector<Regimen> regimens = default_regimens();
  RunOptions run_options;
};

struct Divergence {
  std::string regimen;
  int trial = 0;
  std::size_t record = 0;
  std::string expected;  // reference record, or "<end>"
  std::string actual;
};

struct AuditReport {
  std::size_t runs = 0;
  std::size_t trace_length = 0;
  std::optional<Divergence> divergence;
  bool ok() const { return !divergence; }
};

// Every declared dataset must be rows x cols; throws std::invalid_argument
// otherwise.
AuditReport audit(const TaintedProgram& program, const AuditConfig& config);

}  // namespace dotvm
