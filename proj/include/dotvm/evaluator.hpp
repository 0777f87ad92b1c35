#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dotvm/ast.hpp"
#include "dotvm/block.hpp"
#include "dotvm/opcount.hpp"
#include "dotvm/validator.hpp"

namespace dotvm {

class RuntimeError : public std::runtime_error {
 public:
  enum class Kind {
    IndexOutOfBounds,
    ShapeMismatch,
    ElementCountMismatch,
    MissingDataset,
    // A control decision tried to read a Pseudonym value.
    ObliviousnessViolation,
  };
  RuntimeError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(RuntimeError::Kind kind);

// Attacker-visible record of one step: what ran, on what shape, with what
// taint. Never holds values or class tags.
struct TraceRecord {
  std::string opcode;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  Taint taint = Taint::Concrete;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// `opcode rows cols taint`
std::string format_record(const TraceRecord& r);

enum class Fault {
  None,
  // Deliberately broken: skips elementwise arithmetic on NA cells. Exists so
  // the audit can prove it detects data-dependent control flow.
  BranchOnTag,
};

struct RunOptions {
  std::uint64_t seed = 0;
  Fault fault = Fault::None;
  // Throw ObliviousnessViolation when control flow would read a Pseudonym
  // value. Only a faulty build ever trips it.
  bool guard = true;
};

struct RunResult {
  std::map<int, Block> matrices;
  std::map<int, Scalar> registers;
  std::vector<TraceRecord> trace;
  // Primitive steps (leaf ops + inner steps) executed since the previous
  // record, parallel to `trace`.
  std::vector<std::uint64_t> step_counts;
  OpCount op_count;
};

// Replays a validated program. `datasets` maps each declared name to its
// loaded block.
RunResult run(const TaintedProgram& program, const std::map<std::string, Block>& datasets,
              const RunOptions& options = {});

// Number of records run() emits, from the program's structure alone.
std::size_t expected_trace_length(const Program& program);

bool compare_traces(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b);

// Index of the first record where the traces or step counts differ.
std::optional<std::size_t> first_divergence(const RunResult& a, const RunResult& b);

// -- building blocks --------------------------------------------------------

enum class SummaryOp { Sum, Prod, Min, Max, Any, All };

// Row-major fold. sum/prod/min/max absorb NA; any/all use three-valued
// logic. min/max report NA for NaN cells too.
Scalar eval_summary(SummaryOp op, const Block& m);
// Pair (min, max) as a 1x2 block.
Block eval_range(const Block& m);

// Elementwise ct_select. Scalar operands broadcast over the matrix shape.
Block eval_select(const Block& cond, const Block& t, const Block& f);
Scalar eval_select(const Scalar& cond, const Scalar& t, const Scalar& f);

Block matmul(const Block& a, const Block& b);

// Linear scan over every table cell (row-major). Index k selects cell
// k - base; anything else (including NA) yields NA.
Scalar oblivious_lookup(const Block& table, const Scalar& index, std::int64_t base = 1);

// Seq positions, 1-based, with loop indices resolved from `loop_values`.
std::vector<std::int64_t> resolve_seq(const Seq& s, const std::vector<std::int64_t>& loop_values);

// update/slice/slice const/dim on 1-based index lists. `dest` is only read
// for update.
Block eval_edit(EditOp op, const Block& dest, const std::vector<std::int64_t>& rows,
                const std::vector<std::int64_t>& cols, const Block& src);

}  // namespace dotvm
