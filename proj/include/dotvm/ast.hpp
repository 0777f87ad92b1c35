#pragma once

// Abstract syntax of a data-oblivious transcript (DOT).
//
// A Program is a straight-line list of instructions. The only structured
// construct is a bounded ForLoop whose body is itself a list of instructions.
// All indices (cells, sequences, loop counters) are 1-based.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dotvm/taint.hpp"

namespace dotvm {

enum class Op : std::uint8_t {
  // arithmetic
  Add, Sub, Mul, Div, Pow, Mod,
  // comparison
  Eq, Ne, Lt, Le, Gt, Ge,
  // classification
  IsNa, IsInf, IsNan,
  // logic
  Not, Or, And,
  // math
  Abs, Sign, Sqrt, Floor, Ceiling, Exp, Log, Cos, Sin, Tan,
  // summaries (matrix -> scalar)
  Any, All, Sum, Prod, Min, Max,
  // scalar-only
  Set, IndexVar, Lookup,
  // matrix-only
  Empty, Rand, MatMul, Range,
};

std::string_view mnemonic(Op op);
std::optional<Op> op_from_mnemonic(std::string_view text);

bool is_elementwise(Op op);   // arith, compare, is, logic, math
bool is_summary(Op op);       // any all sum prod min max
bool allowed_in_scalar_instr(Op op);
bool allowed_in_matrix_instr(Op op);
// Number of operands accepted: [min, max].
std::pair<int, int> arity(Op op);

struct Dims {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

struct LoopIndex {
  int depth = 0;
  friend bool operator==(const LoopIndex&, const LoopIndex&) = default;
};

// Cell coordinate or unordered-seq entry: integer literal or loop index.
using IndexExpr = std::variant<std::int64_t, LoopIndex>;

struct MatrixRef {
  int id = 0;
  friend bool operator==(const MatrixRef&, const MatrixRef&) = default;
};

struct RegisterRef {
  int id = 0;
  friend bool operator==(const RegisterRef&, const RegisterRef&) = default;
};

struct CellRef {
  int matrix = 0;
  IndexExpr row;
  IndexExpr col;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

// `#v` literal. NaN is the only non-finite payload.
struct Literal {
  double value = 0.0;
  bool is_nan() const { return value != value; }
  friend bool operator==(const Literal& a, const Literal& b) {
    return (a.is_nan() && b.is_nan()) || a.value == b.value;
  }
};

using Operand = std::variant<MatrixRef, RegisterRef, CellRef, LoopIndex, Literal>;

bool is_matrix(const Operand& o);

struct OrderedSeq {
  std::int64_t from = 1;
  std::int64_t to = 1;
  std::int64_t step = 1;
  friend bool operator==(const OrderedSeq&, const OrderedSeq&) = default;
};

struct UnorderedSeq {
  std::vector<IndexExpr> items;
  friend bool operator==(const UnorderedSeq&, const UnorderedSeq&) = default;
};

using Seq = std::variant<OrderedSeq, UnorderedSeq>;

// Number of positions a seq selects; negative-length ordered seqs select 0.
std::int64_t seq_length(const Seq& s);

struct RowsSource {
  std::vector<std::vector<Operand>> rows;
  friend bool operator==(const RowsSource&, const RowsSource&) = default;
};

struct DatasetSource {
  std::string name;
  friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

struct OpSource {
  Op op = Op::Empty;
  std::vector<Operand> args;
  friend bool operator==(const OpSource&, const OpSource&) = default;
};

struct BindSource {
  bool by_columns = true;  // cbind when true, rbind otherwise
  std::vector<Operand> args;
  friend bool operator==(const BindSource&, const BindSource&) = default;
};

using MatrixSource = std::variant<RowsSource, DatasetSource, OpSource, BindSource>;

struct DefMatrix {
  int id = 0;
  Dims dims;
  bool is_const = false;
  MatrixSource source;
  friend bool operator==(const DefMatrix&, const DefMatrix&) = default;
};

struct ScalarInstr {
  Op op = Op::Set;
  int dest = 0;  // register id
  std::vector<Operand> args;
  friend bool operator==(const ScalarInstr&, const ScalarInstr&) = default;
};

enum class EditOp : std::uint8_t { Update, Slice, SliceConst, Dim };
std::string_view mnemonic(EditOp op);

struct EditInstr {
  EditOp op = EditOp::Update;
  int dest = 0;  // matrix id
  Seq rows;
  Seq cols;
  Operand src;
  friend bool operator==(const EditInstr&, const EditInstr&) = default;
};

struct SelectInstr {
  Operand dest;  // MatrixRef or RegisterRef
  Operand cond;
  Operand on_true;
  Operand on_false;
  friend bool operator==(const SelectInstr&, const SelectInstr&) = default;
};

struct Instr;

struct ForLoop {
  int index = 0;  // equals nesting depth
  Operand from;
  Operand to;
  Operand step;
  std::vector<Instr> body;
  friend bool operator==(const ForLoop&, const ForLoop&);
};

struct Instr {
  std::variant<DefMatrix, ScalarInstr, EditInstr, SelectInstr, ForLoop> node;
  int line = 0;  // source line, not part of structural equality

  friend bool operator==(const Instr& a, const Instr& b) { return a.node == b.node; }
};

inline bool operator==(const ForLoop& a, const ForLoop& b) {
  return a.index == b.index && a.from == b.from && a.to == b.to && a.step == b.step &&
         a.body == b.body;
}

struct Program {
  std::vector<Instr> instrs;
  // Dataset name -> declared shape, collected from `dataset` definitions.
  std::map<std::string, Dims> declared_datasets;
  friend bool operator==(const Program&, const Program&) = default;
};

// Visits every instruction in program order, descending into loop bodies.
template <typename F>
void for_each_instr(const std::vector<Instr>& instrs, F&& f) {
  for (const Instr& in : instrs) {
    f(in);
    if (const auto* loop = std::get_if<ForLoop>(&in.node)) for_each_instr(loop->body, f);
  }
}

std::size_t count_instrs(const std::vector<Instr>& instrs);

}  // namespace dotvm
