#include "dotvm/ast.hpp"

#include <array>
#include <utility>

namespace dotvm {
namespace {

struct OpInfo {
  Op op;
  std::string_view text;
  int min_args;
  int max_args;
};

constexpr std::array<OpInfo, 41> kOps = {{
    {Op::Add, "+", 2, 2},       {Op::Sub, "-", 1, 2},        {Op::Mul, "*", 2, 2},
    {Op::Div, "/", 2, 2},       {Op::Pow, "^", 2, 2},        {Op::Mod, "%%", 2, 2},
    {Op::Eq, "==", 2, 2},       {Op::Ne, "!=", 2, 2},        {Op::Lt, "<", 2, 2},
    {Op::Le, "<=", 2, 2},       {Op::Gt, ">", 2, 2},         {Op::Ge, ">=", 2, 2},
    {Op::IsNa, "NA?", 1, 1},    {Op::IsInf, "INF?", 1, 1},   {Op::IsNan, "NAN?", 1, 1},
    {Op::Not, "!", 1, 1},       {Op::Or, "|", 2, 2},         {Op::And, "&", 2, 2},
    {Op::Abs, "abs", 1, 1},     {Op::Sign, "sign", 1, 1},    {Op::Sqrt, "sqrt", 1, 1},
    {Op::Floor, "floor", 1, 1}, {Op::Ceiling, "ceiling", 1, 1},
    {Op::Exp, "exp", 1, 1},     {Op::Log, "log", 1, 1},      {Op::Cos, "cos", 1, 1},
    {Op::Sin, "sin", 1, 1},     {Op::Tan, "tan", 1, 1},      {Op::Any, "any", 1, 1},
    {Op::All, "all", 1, 1},     {Op::Sum, "sum", 1, 1},      {Op::Prod, "prod", 1, 1},
    {Op::Min, "min", 1, 1},     {Op::Max, "max", 1, 1},      {Op::Set, "set", 1, 1},
    {Op::IndexVar, "indexvar", 1, 1},                        {Op::Lookup, "lookup", 2, 2},
    {Op::Empty, "empty", 0, 0}, {Op::Rand, "rand", 0, 0},    {Op::MatMul, "%*%", 2, 2},
    {Op::Range, "range", 1, 1},
}};

const OpInfo& info(Op op) {
  for (const auto& i : kOps)
    if (i.op == op) return i;
  return kOps[0];
}

}  // namespace

std::string_view mnemonic(Op op) { return info(op).text; }

std::optional<Op> op_from_mnemonic(std::string_view text) {
  if (text == "%") return Op::Mod;  // alias
  for (const auto& i : kOps)
    if (i.text == text) return i.op;
  return std::nullopt;
}

bool is_elementwise(Op op) { return op <= Op::Tan; }

bool is_summary(Op op) { return op >= Op::Any && op <= Op::Max; }

bool allowed_in_scalar_instr(Op op) { return op <= Op::Lookup; }

bool allowed_in_matrix_instr(Op op) {
  return is_elementwise(op) || op == Op::Empty || op == Op::Rand || op == Op::MatMul ||
         op == Op::Range;
}

std::pair<int, int> arity(Op op) {
  const auto& i = info(op);
  return {i.min_args, i.max_args};
}

std::string_view mnemonic(EditOp op) {
  switch (op) {
    case EditOp::Update: return "update";
    case EditOp::Slice: return "slice";
    case EditOp::SliceConst: return "slice const";
    case EditOp::Dim: return "dim";
  }
  return "";
}

bool is_matrix(const Operand& o) { return std::holds_alternative<MatrixRef>(o); }

std::int64_t seq_length(const Seq& s) {
  if (const auto* o = std::get_if<OrderedSeq>(&s)) {
    if (o->step == 0) return 0;
    const std::int64_t n = (o->to - o->from) / o->step + 1;
    if ((o->step > 0 && o->to < o->from) || (o->step < 0 && o->to > o->from)) return 0;
    return n;
  }
  return static_cast<std::int64_t>(std::get<UnorderedSeq>(s).items.size());
}

std::size_t count_instrs(const std::vector<Instr>& instrs) {
  std::size_t n = 0;
  for_each_instr(instrs, [&](const Instr&) { ++n; });
  return n;
}

}  // namespace dotvm
