#include "dotvm/evaluator.hpp"

#include <random>

namespace dotvm {

RuntimeError::RuntimeError(Kind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

std::string_view to_string(RuntimeError::Kind kind) {
  switch (kind) {
    case RuntimeError::Kind::IndexOutOfBounds: return "IndexOutOfBounds";
    case RuntimeError::Kind::ShapeMismatch: return "ShapeMismatch";
    case RuntimeError::Kind::ElementCountMismatch: return "ElementCountMismatch";
    case RuntimeError::Kind::MissingDataset: return "MissingDataset";
    case RuntimeError::Kind::ObliviousnessViolation: return "ObliviousnessViolation";
  }
  return "";
}

std::string format_record(const TraceRecord& r) {
  return r.opcode + " " + std::to_string(r.rows) + " " + std::to_string(r.cols) + " " +
         std::string(to_string(r.taint));
}

bool compare_traces(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) { return a == b; }

std::optional<std::size_t> first_divergence(const RunResult& a, const RunResult& b) {
  const std::size_t n = std::min(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!(a.trace[i] == b.trace[i]) || a.step_counts[i] != b.step_counts[i]) return i;
  if (a.trace.size() != b.trace.size()) return n;
  if (!(a.op_count == b.op_count)) return n;
  return std::nullopt;
}

namespace {

using RK = RuntimeError::Kind;

std::string dims_str(std::int64_t r, std::int64_t c) { return std::to_string(r) + "x" + std::to_string(c); }

FixedScalar zero() { return FixedScalar::from_int(0); }
FixedScalar one() { return FixedScalar::from_int(1); }

// Elementwise opcode on already-loaded operands.
FixedScalar apply(Op op, const FixedScalar* a, std::size_t n) {
  using namespace fixed;
  switch (op) {
    case Op::Add: return add(a[0], a[1]);
    case Op::Sub: return n == 1 ? neg(a[0]) : sub(a[0], a[1]);
    case Op::Mul: return mul(a[0], a[1]);
    case Op::Div: return div(a[0], a[1]);
    case Op::Pow: return pow(a[0], a[1]);
    case Op::Mod: return mod(a[0], a[1]);
    case Op::Eq: return compare(CompareOp::Eq, a[0], a[1]);
    case Op::Ne: return compare(CompareOp::Ne, a[0], a[1]);
    case Op::Lt: return compare(CompareOp::Lt, a[0], a[1]);
    case Op::Le: return compare(CompareOp::Le, a[0], a[1]);
    case Op::Gt: return compare(CompareOp::Gt, a[0], a[1]);
    case Op::Ge: return compare(CompareOp::Ge, a[0], a[1]);
    case Op::IsNa: return is_class(ClassOp::IsNa, a[0]);
    case Op::IsInf: return is_class(ClassOp::IsInf, a[0]);
    case Op::IsNan: return is_class(ClassOp::IsNan, a[0]);
    case Op::Not: return logic(LogicOp::Not, a[0]);
    case Op::Or: return logic(LogicOp::Or, a[0], a[1]);
    case Op::And: return logic(LogicOp::And, a[0], a[1]);
    case Op::Abs: return math1(MathOp::Abs, a[0]);
    case Op::Sign: return math1(MathOp::Sign, a[0]);
    case Op::Sqrt: return math1(MathOp::Sqrt, a[0]);
    case Op::Floor: return math1(MathOp::Floor, a[0]);
    case Op::Ceiling: return math1(MathOp::Ceiling, a[0]);
    case Op::Exp: return math1(MathOp::Exp, a[0]);
    case Op::Log: return math1(MathOp::Log, a[0]);
    case Op::Cos: return math1(MathOp::Cos, a[0]);
    case Op::Sin: return math1(MathOp::Sin, a[0]);
    case Op::Tan: return math1(MathOp::Tan, a[0]);
    default: break;
  }
  throw RuntimeError(RK::ShapeMismatch, "`" + std::string(mnemonic(op)) + "` is not elementwise");
}

SummaryOp summary_op(Op op) {
  switch (op) {
    case Op::Sum: return SummaryOp::Sum;
    case Op::Prod: return SummaryOp::Prod;
    case Op::Min: return SummaryOp::Min;
    case Op::Max: return SummaryOp::Max;
    case Op::Any: return SummaryOp::Any;
    default: return SummaryOp::All;
  }
}

// Whether an instruction emits a leaf record after its instruction record.
bool has_leaf_record(const Instr& in) {
  if (const auto* d = std::get_if<DefMatrix>(&in.node)) {
    if (std::holds_alternative<RowsSource>(d->source)) return true;
    if (const auto* o = std::get_if<OpSource>(&d->source)) return o->op != Op::Empty;
    return false;
  }
  if (const auto* s = std::get_if<ScalarInstr>(&in.node)) return s->op != Op::Set && s->op != Op::IndexVar;
  return std::holds_alternative<SelectInstr>(in.node);
}

std::string def_opcode(const DefMatrix& d) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RowsSource>) return "def:rows";
        else if constexpr (std::is_same_v<T, DatasetSource>) return "def:dataset";
        else if constexpr (std::is_same_v<T, OpSource>) return "def:" + std::string(mnemonic(s.op));
        else return s.by_columns ? "def:cbind" : "def:rbind";
      },
      d.source);
}

std::string edit_opcode(EditOp op) {
  switch (op) {
    case EditOp::Update: return "update";
    case EditOp::Slice: return "slice";
    case EditOp::SliceConst: return "slice_const";
    case EditOp::Dim: return "dim";
  }
  return "";
}

std::int64_t literal_int(const Literal& l) { return static_cast<std::int64_t>(l.value); }

std::int64_t static_bound(const Operand& o, const std::vector<std::int64_t>& loops) {
  if (const auto* l = std::get_if<Literal>(&o)) return literal_int(*l);
  if (const auto* li = std::get_if<LoopIndex>(&o)) return loops.at(li->depth - 1);
  throw RuntimeError(RK::ObliviousnessViolation, "loop bound is not a literal or loop index");
}

std::size_t count_records(const std::vector<Instr>& instrs, std::vector<std::int64_t>& loops) {
  std::size_t n = 0;
  for (const Instr& in : instrs) {
    ++n;
    if (has_leaf_record(in)) ++n;
    if (const auto* loop = std::get_if<ForLoop>(&in.node)) {
      const std::int64_t from = static_bound(loop->from, loops);
      const std::int64_t to = static_bound(loop->to, loops);
      const std::int64_t step = static_bound(loop->step, loops);
      const std::int64_t iters = iteration_count(from, to, step);
      for (std::int64_t i = 0; i < iters; ++i) {
        loops.push_back(from + i * step);
        n += count_records(loop->body, loops);
        loops.pop_back();
      }
    }
  }
  return n;
}

// Operand resolved for elementwise work: a block, or a scalar to broadcast.
struct Arg {
  const Block* block = nullptr;
  Scalar scalar;

  const FixedScalar& cell(std::size_t i) const { return block ? block->cells[i] : scalar.value; }
  Taint taint() const { return block ? block->taint : scalar.taint; }
};

class Vm {
 public:
  Vm(const TaintedProgram& tp, const std::map<std::string, Block>& datasets, const RunOptions& opt)
      : tp_(tp), datasets_(datasets), opt_(opt), rng_(opt.seed), scope_(out_.op_count) {}

  RunResult run() {
    block(tp_.program.instrs);
    out_.matrices = std::move(mats_);
    out_.registers = std::move(regs_);
    return std::move(out_);
  }

 private:
  const TaintedProgram& tp_;
  const std::map<std::string, Block>& datasets_;
  RunOptions opt_;
  std::mt19937_64 rng_;
  RunResult out_;
  CountScope scope_;
  std::uint64_t last_total_ = 0;

  std::map<int, Block> mats_;
  std::map<int, Scalar> regs_;
  std::vector<std::int64_t> loops_;

  void emit(std::string opcode, std::int64_t rows, std::int64_t cols, Taint taint) {
    const std::uint64_t total = out_.op_count.total_leaf() + out_.op_count.total_steps();
    out_.trace.push_back({std::move(opcode), rows, cols, taint});
    out_.step_counts.push_back(total - last_total_);
    last_total_ = total;
  }

  // The one place the evaluator may branch on a cell's class. Refuses
  // Pseudonym data unless the guard is off.
  bool is_na_branch(const FixedScalar& v, Taint t) const {
    if (t == Taint::Pseudonym && opt_.guard)
      throw RuntimeError(RK::ObliviousnessViolation, "branch on a pseudonym value");
    return v.tag == Tag::Na;
  }

  // -- operands ---------------------------------------------------------------

  std::int64_t index(const IndexExpr& e) const {
    if (const auto* li = std::get_if<LoopIndex>(&e)) return loops_.at(li->depth - 1);
    return std::get<std::int64_t>(e);
  }

  const Block& matrix(int id) const {
    auto it = mats_.find(id);
    if (it == mats_.end()) throw RuntimeError(RK::ShapeMismatch, "matrix $" + std::to_string(id) + " is undefined");
    return it->second;
  }

  Scalar scalar(const Operand& o) const {
    return std::visit(
        [&](const auto& v) -> Scalar {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, MatrixRef>) {
            const Block& b = matrix(v.id);
            if (b.size() != 1) throw RuntimeError(RK::ShapeMismatch, "matrix used as a scalar");
            return {b.cells[0], b.taint};
          } else if constexpr (std::is_same_v<T, RegisterRef>) {
            return regs_.at(v.id);
          } else if constexpr (std::is_same_v<T, CellRef>) {
            const Block& b = matrix(v.matrix);
            const std::int64_t r = index(v.row), c = index(v.col);
            if (r < 1 || r > b.rows || c < 1 || c > b.cols)
              throw RuntimeError(RK::IndexOutOfBounds, "cell (" + std::to_string(r) + "," + std::to_string(c) +
                                                           ") of a " + dims_str(b.rows, b.cols) + " matrix");
            return {b.at(r - 1, c - 1), b.taint};
          } else if constexpr (std::is_same_v<T, LoopIndex>) {
            return {FixedScalar::from_int(loops_.at(v.depth - 1)), Taint::Concrete};
          } else {
            return {fixed::from_double(v.value), Taint::Concrete};
          }
        },
        o);
  }

  Arg arg(const Operand& o) const {
    if (const auto* m = std::get_if<MatrixRef>(&o)) return {&matrix(m->id), {}};
    return {nullptr, scalar(o)};
  }

  Block as_block(const Operand& o) const {
    if (const auto* m = std::get_if<MatrixRef>(&o)) return matrix(m->id);
    const Scalar s = scalar(o);
    Block b(1, 1, s.taint);
    b.cells[0] = s.value;
    return b;
  }

  // Applies `op` over every cell of the broadcast shape.
  Block elementwise(Op op, const std::vector<Operand>& operands, std::int64_t rows, std::int64_t cols) {
    std::vector<Arg> args;
    Taint t = Taint::Concrete;
    for (const Operand& o : operands) {
      args.push_back(arg(o));
      t = taint_join(t, args.back().taint());
      if (const Block* b = args.back().block; b && (b->rows != rows || b->cols != cols))
        throw RuntimeError(RK::ShapeMismatch, "operand is " + dims_str(b->rows, b->cols) + ", expected " +
                                                  dims_str(rows, cols));
    }
    Block out(rows, cols, t);
    FixedScalar buf[2];
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
      for (std::size_t k = 0; k < args.size(); ++k) buf[k] = args[k].cell(i);
      if (opt_.fault == Fault::BranchOnTag) {
        bool skip = false;
        for (std::size_t k = 0; k < args.size(); ++k) skip = skip || is_na_branch(buf[k], args[k].taint());
        if (skip) {
          out.cells[i] = FixedScalar::na();
          continue;
        }
      }
      out.cells[i] = apply(op, buf, args.size());
    }
    return out;
  }

  // -- instructions -----------------------------------------------------------

  void block(const std::vector<Instr>& instrs) {
    for (const Instr& in : instrs) std::visit([&](const auto& n) { exec(n); }, in.node);
  }

  void exec(const DefMatrix& d) {
    const std::int64_t rows = d.dims.rows, cols = d.dims.cols;
    const std::string opcode = def_opcode(d);
    Block result = std::visit(
        [&](const auto& src) -> Block {
          using T = std::decay_t<decltype(src)>;
          if constexpr (std::is_same_v<T, RowsSource>) {
            emit(opcode, rows, cols, tp_taint(src));
            Block b(rows, cols);
            for (std::int64_t r = 0; r < rows; ++r)
              for (std::int64_t c = 0; c < cols; ++c) {
                const Scalar s = scalar(src.rows.at(r).at(c));
                b.at(r, c) = s.value;
                b.taint = taint_join(b.taint, s.taint);
              }
            emit("leaf:from_double", rows, cols, b.taint);
            return b;
          } else if constexpr (std::is_same_v<T, DatasetSource>) {
            auto it = datasets_.find(src.name);
            if (it == datasets_.end()) throw RuntimeError(RK::MissingDataset, "no data bound to `" + src.name + "`");
            if (it->second.rows != rows || it->second.cols != cols)
              throw RuntimeError(RK::ShapeMismatch, "`" + src.name + "` is " +
                                                        dims_str(it->second.rows, it->second.cols));
            emit(opcode, rows, cols, Taint::Pseudonym);
            Block b = it->second;
            b.taint = Taint::Pseudonym;
            return b;
          } else if constexpr (std::is_same_v<T, OpSource>) {
            return op_source(src, opcode, rows, cols);
          } else {
            return bind(src, opcode, rows, cols);
          }
        },
        d.source);
    if (d.is_const && result.taint == Taint::Pseudonym)
      throw RuntimeError(RK::ObliviousnessViolation, "const definition from pseudonym data");
    mats_[d.id] = std::move(result);
  }

  Taint tp_taint(const RowsSource& src) const {
    Taint t = Taint::Concrete;
    for (const auto& row : src.rows)
      for (const Operand& o : row) t = taint_join(t, operand_taint(o));
    return t;
  }

  Taint operand_taint(const Operand& o) const {
    if (const auto* m = std::get_if<MatrixRef>(&o)) return matrix(m->id).taint;
    if (const auto* r = std::get_if<RegisterRef>(&o)) return regs_.at(r->id).taint;
    if (const auto* c = std::get_if<CellRef>(&o)) return matrix(c->matrix).taint;
    return Taint::Concrete;
  }

  Taint operands_taint(const std::vector<Operand>& ops) const {
    Taint t = Taint::Concrete;
    for (const Operand& o : ops) t = taint_join(t, operand_taint(o));
    return t;
  }

  Block op_source(const OpSource& src, const std::string& opcode, std::int64_t rows, std::int64_t cols) {
    const Taint t = operands_taint(src.args);
    emit(opcode, rows, cols, t);
    const std::string leaf = "leaf:" + std::string(mnemonic(src.op));
    Block b;
    switch (src.op) {
      case Op::Empty:
        b = Block(rows, cols);
        for (auto& c : b.cells) c = zero();
        return b;
      case Op::Rand: {
        b = Block(rows, cols);
        for (auto& c : b.cells) c = fixed::from_double(static_cast<double>(rng_() >> 11) * 0x1p-53);
        emit("leaf:from_double", rows, cols, Taint::Concrete);
        return b;
      }
      case Op::MatMul:
        b = matmul(matrix(std::get<MatrixRef>(src.args[0]).id), matrix(std::get<MatrixRef>(src.args[1]).id));
        break;
      case Op::Range:
        b = eval_range(as_block(src.args[0]));
        break;
      default:
        b = elementwise(src.op, src.args, rows, cols);
        break;
    }
    if (b.rows != rows || b.cols != cols)
      throw RuntimeError(RK::ShapeMismatch, "result is " + dims_str(b.rows, b.cols) + ", definition says " +
                                                dims_str(rows, cols));
    emit(leaf, rows, cols, b.taint);
    return b;
  }

  Block bind(const BindSource& src, const std::string& opcode, std::int64_t rows, std::int64_t cols) {
    Block out(rows, cols, operands_taint(src.args));
    emit(opcode, rows, cols, out.taint);
    std::int64_t at = 0;
    for (const Operand& o : src.args) {
      const Block piece = as_block(o);
      const bool scalar_fill = !std::holds_alternative<MatrixRef>(o);
      const std::int64_t span = scalar_fill ? 1 : (src.by_columns ? piece.cols : piece.rows);
      for (std::int64_t k = 0; k < span; ++k, ++at) {
        const std::int64_t n = src.by_columns ? rows : cols;
        for (std::int64_t i = 0; i < n; ++i) {
          const FixedScalar v = scalar_fill ? piece.cells[0] : (src.by_columns ? piece.at(i, k) : piece.at(k, i));
          if (src.by_columns) {
            if (at >= cols || (!scalar_fill && piece.rows != rows))
              throw RuntimeError(RK::ShapeMismatch, "cbind does not fit " + dims_str(rows, cols));
            out.at(i, at) = v;
          } else {
            if (at >= rows || (!scalar_fill && piece.cols != cols))
              throw RuntimeError(RK::ShapeMismatch, "rbind does not fit " + dims_str(rows, cols));
            out.at(at, i) = v;
          }
        }
      }
    }
    return out;
  }

  void exec(const ScalarInstr& si) {
    const Op op = si.op;
    Taint t = operands_taint(si.args);
    emit(std::string(mnemonic(op)), 1, 1, t);
    Scalar result;
    if (is_summary(op)) {
      result = eval_summary(summary_op(op), as_block(si.args[0]));
    } else if (op == Op::Set) {
      result = scalar(si.args[0]);
    } else if (op == Op::IndexVar) {
      result = scalar(si.args[0]);
      if (result.taint == Taint::Pseudonym)
        throw RuntimeError(RK::ObliviousnessViolation, "indexvar of a pseudonym");
    } else if (op == Op::Lookup) {
      const Block& table = matrix(std::get<MatrixRef>(si.args[0]).id);
      if (table.taint == Taint::Pseudonym)
        throw RuntimeError(RK::ObliviousnessViolation, "lookup table is a pseudonym");
      result = oblivious_lookup(table, scalar(si.args[1]));
    } else {
      const Block b = elementwise(op, si.args, 1, 1);
      result = {b.cells[0], b.taint};
    }
    if (op != Op::Set && op != Op::IndexVar) emit("leaf:" + std::string(mnemonic(op)), 1, 1, result.taint);
    regs_[si.dest] = result;
  }

  void exec(const EditInstr& e) {
    std::vector<std::int64_t> rows = resolve_seq(e.rows, loops_);
    std::vector<std::int64_t> cols = resolve_seq(e.cols, loops_);
    const Block src = as_block(e.src);
    static const Block kNone;
    const Block& dest = e.op == EditOp::Update ? matrix(e.dest) : kNone;
    Block out = eval_edit(e.op, dest, rows, cols, src);
    emit(edit_opcode(e.op), out.rows, out.cols, out.taint);
    mats_[e.dest] = std::move(out);
  }

  void exec(const SelectInstr& s) {
    const Taint t = taint_join(operand_taint(s.cond), taint_join(operand_taint(s.on_true), operand_taint(s.on_false)));
    if (const auto* reg = std::get_if<RegisterRef>(&s.dest)) {
      emit("select", 1, 1, t);
      const Scalar r = eval_select(scalar(s.cond), scalar(s.on_true), scalar(s.on_false));
      emit("leaf:select", 1, 1, r.taint);
      regs_[reg->id] = r;
      return;
    }
    const Block c = as_block(s.cond), a = as_block(s.on_true), b = as_block(s.on_false);
    std::int64_t rows = 1, cols = 1;
    for (const Block* m : {&c, &a, &b})
      if (m->size() > 1) rows = m->rows, cols = m->cols;
    emit("select", rows, cols, t);
    Block r = eval_select(c, a, b);
    emit("leaf:select", r.rows, r.cols, r.taint);
    mats_[std::get<MatrixRef>(s.dest).id] = std::move(r);
  }

  std::int64_t public_bound(const Operand& o) const {
    const Scalar s = scalar(o);
    if (s.taint == Taint::Pseudonym) throw RuntimeError(RK::ObliviousnessViolation, "loop bound is a pseudonym");
    return static_bound(o, loops_);
  }

  void exec(const ForLoop& loop) {
    const std::int64_t from = public_bound(loop.from);
    const std::int64_t to = public_bound(loop.to);
    const std::int64_t step = public_bound(loop.step);
    const std::int64_t iters = iteration_count(from, to, step);
    emit("forloop", iters, 1, Taint::Concrete);
    for (std::int64_t i = 0; i < iters; ++i) {
      loops_.push_back(from + i * step);
      block(loop.body);
      loops_.pop_back();
    }
  }
};

}  // namespace

RunResult run(const TaintedProgram& program, const std::map<std::string, Block>& datasets,
              const RunOptions& options) {
  return Vm(program, datasets, options).run();
}

std::size_t expected_trace_length(const Program& program) {
  std::vector<std::int64_t> loops;
  return count_records(program.instrs, loops);
}

Scalar eval_summary(SummaryOp op, const Block& m) {
  using namespace fixed;
  FixedScalar acc;
  switch (op) {
    case SummaryOp::Sum: acc = zero(); for (const auto& c : m.cells) acc = add(acc, c); break;
    case SummaryOp::Prod: acc = one(); for (const auto& c : m.cells) acc = mul(acc, c); break;
    case SummaryOp::Min:
      acc = FixedScalar::pos_inf();
      for (const auto& c : m.cells) acc = ct_select(compare(CompareOp::Lt, c, acc), c, acc);
      break;
    case SummaryOp::Max:
      acc = FixedScalar::neg_inf();
      for (const auto& c : m.cells) acc = ct_select(compare(CompareOp::Gt, c, acc), c, acc);
      break;
    case SummaryOp::Any: acc = zero(); for (const auto& c : m.cells) acc = logic(LogicOp::Or, acc, c); break;
    case SummaryOp::All: acc = one(); for (const auto& c : m.cells) acc = logic(LogicOp::And, acc, c); break;
  }
  return {acc, m.taint};
}

Block eval_range(const Block& m) {
  Block out(1, 2, m.taint);
  out.cells[0] = eval_summary(SummaryOp::Min, m).value;
  out.cells[1] = eval_summary(SummaryOp::Max, m).value;
  return out;
}

Block eval_select(const Block& cond, const Block& t, const Block& f) {
  std::int64_t rows = 1, cols = 1;
  for (const Block* m : {&cond, &t, &f}) {
    if (m->size() == 1) continue;
    if (rows * cols > 1 && (m->rows != rows || m->cols != cols))
      throw RuntimeError(RK::ShapeMismatch, "select operands disagree in shape");
    rows = m->rows;
    cols = m->cols;
  }
  auto cell = [](const Block& b, std::size_t i) -> const FixedScalar& { return b.cells[b.size() == 1 ? 0 : i]; };
  Block out(rows, cols, taint_join(cond.taint, taint_join(t.taint, f.taint)));
  for (std::size_t i = 0; i < out.cells.size(); ++i)
    out.cells[i] = fixed::ct_select(cell(cond, i), cell(t, i), cell(f, i));
  return out;
}

Scalar eval_select(const Scalar& cond, const Scalar& t, const Scalar& f) {
  return {fixed::ct_select(cond.value, t.value, f.value), taint_join(cond.taint, taint_join(t.taint, f.taint))};
}

Block matmul(const Block& a, const Block& b) {
  if (a.cols != b.rows)
    throw RuntimeError(RK::ShapeMismatch, "%*% of " + dims_str(a.rows, a.cols) + " and " + dims_str(b.rows, b.cols));
  Block out(a.rows, b.cols, taint_join(a.taint, b.taint));
  for (std::int64_t i = 0; i < a.rows; ++i)
    for (std::int64_t j = 0; j < b.cols; ++j) {
      FixedScalar acc = zero();
      for (std::int64_t k = 0; k < a.cols; ++k) acc = fixed::add(acc, fixed::mul(a.at(i, k), b.at(k, j)));
      out.at(i, j) = acc;
    }
  return out;
}

Scalar oblivious_lookup(const Block& table, const Scalar& index, std::int64_t base) {
  FixedScalar acc = FixedScalar::na();
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    const FixedScalar hit =
        fixed::compare(fixed::CompareOp::Eq, index.value, FixedScalar::from_int(base + static_cast<std::int64_t>(i)));
    acc = fixed::ct_select(hit, table.cells[i], acc);
  }
  return {acc, taint_join(index.taint, table.taint)};
}

std::vector<std::int64_t> resolve_seq(const Seq& s, const std::vector<std::int64_t>& loop_values) {
  std::vector<std::int64_t> out;
  if (const auto* o = std::get_if<OrderedSeq>(&s)) {
    const std::int64_t n = seq_length(s);
    for (std::int64_t i = 0; i < n; ++i) out.push_back(o->from + i * o->step);
    return out;
  }
  for (const IndexExpr& e : std::get<UnorderedSeq>(s).items) {
    if (const auto* li = std::get_if<LoopIndex>(&e)) {
      if (li->depth < 1 || li->depth > static_cast<int>(loop_values.size()))
        throw RuntimeError(RK::IndexOutOfBounds, "loop index \\" + std::to_string(li->depth) + " not in scope");
      out.push_back(loop_values[li->depth - 1]);
    } else {
      out.push_back(std::get<std::int64_t>(e));
    }
  }
  return out;
}

Block eval_edit(EditOp op, const Block& dest, const std::vector<std::int64_t>& rows,
                const std::vector<std::int64_t>& cols, const Block& src) {
  const auto nr = static_cast<std::int64_t>(rows.size());
  const auto nc = static_cast<std::int64_t>(cols.size());
  auto check = [](const std::vector<std::int64_t>& idx, std::int64_t limit, const char* what) {
    for (std::int64_t v : idx)
      if (v < 1 || v > limit)
        throw RuntimeError(RK::IndexOutOfBounds,
                           std::string(what) + " " + std::to_string(v) + " outside 1.." + std::to_string(limit));
  };
  switch (op) {
    case EditOp::Update: {
      check(rows, dest.rows, "row");
      check(cols, dest.cols, "column");
      const bool broadcast = src.size() == 1;
      if (!broadcast && (src.rows != nr || src.cols != nc))
        throw RuntimeError(RK::ShapeMismatch, "update region is " + dims_str(nr, nc) + ", source is " +
                                                  dims_str(src.rows, src.cols));
      Block out = dest;
      out.taint = taint_join(dest.taint, src.taint);
      for (std::int64_t i = 0; i < nr; ++i)
        for (std::int64_t j = 0; j < nc; ++j)
          out.at(rows[i] - 1, cols[j] - 1) = broadcast ? src.cells[0] : src.at(i, j);
      return out;
    }
    case EditOp::Slice:
    case EditOp::SliceConst: {
      if (op == EditOp::SliceConst && src.taint == Taint::Pseudonym)
        throw RuntimeError(RK::ObliviousnessViolation, "slice const of a pseudonym");
      check(rows, src.rows, "row");
      check(cols, src.cols, "column");
      Block out(nr, nc, src.taint);
      for (std::int64_t i = 0; i < nr; ++i)
        for (std::int64_t j = 0; j < nc; ++j) out.at(i, j) = src.at(rows[i] - 1, cols[j] - 1);
      return out;
    }
    case EditOp::Dim: {
      if (static_cast<std::size_t>(nr * nc) != src.size())
        throw RuntimeError(RK::ElementCountMismatch,
                           "dim " + dims_str(nr, nc) + " of a " + dims_str(src.rows, src.cols) + " matrix");
      Block out = src;
      out.rows = nr;
      out.cols = nc;
      return out;
    }
  }
  return src;
}

}  // namespace dotvm
