#include "dotvm/validator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace dotvm {

using Rule = ValidationError::Rule;

ValidationError::ValidationError(Rule rule, int instr_index, int line, const std::string& message)
    : std::runtime_error("instruction " + std::to_string(instr_index) + " (line " +
                         std::to_string(line) + "): " + std::string(to_string(rule)) + ": " +
                         message),
      rule_(rule),
      instr_index_(instr_index),
      line_(line),
      message_(message) {}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::Rule1Downgrade: return "Rule1Downgrade";
    case Rule::Rule3PseudonymToUnsafe: return "Rule3PseudonymToUnsafe";
    case Rule::UndefinedOperand: return "UndefinedOperand";
    case Rule::DimensionMismatch: return "DimensionMismatch";
    case Rule::DatasetUnknown: return "DatasetUnknown";
    case Rule::LoopBoundTainted: return "LoopBoundTainted";
    case Rule::IllegalConstruct: return "IllegalConstruct";
  }
  return "";
}

std::int64_t iteration_count(std::int64_t from, std::int64_t to, std::int64_t step) {
  if (step > 0) return to < from ? 0 : (to - from) / step + 1;
  if (step < 0) return from < to ? 0 : (from - to) / (-step) + 1;
  return 0;
}

namespace {

struct State {
  std::map<int, MatrixInfo> mats;
  std::map<int, Taint> regs;
  friend bool operator==(const State&, const State&) = default;
};

struct Interval {
  std::int64_t lo = 0, hi = 0;
  bool live = true;  // false inside a loop that never runs
};

struct Value {
  bool is_matrix = false;
  Dims dims{1, 1};
  Taint taint = Taint::Concrete;
};

std::string dims_str(Dims d) { return std::to_string(d.rows) + "x" + std::to_string(d.cols); }

class Validator {
 public:
  explicit Validator(const std::map<std::string, Dims>& datasets) : datasets_(datasets) {}

  TaintedProgram run(const Program& p) {
    taints_.assign(count_instrs(p.instrs), Taint::Concrete);
    State s;
    int index = 0;
    block(p.instrs, s, index);
    return {p, taints_, s.mats, s.regs};
  }

 private:
  const std::map<std::string, Dims>& datasets_;
  std::vector<Taint> taints_;
  std::vector<Interval> loops_;  // index ranges of enclosing loops, outermost first
  int index_ = 0;
  int line_ = 0;

  [[noreturn]] void fail(Rule rule, const std::string& msg) const {
    throw ValidationError(rule, index_, line_, msg);
  }

  // -- operands ---------------------------------------------------------------

  void check_loop_index(int depth) const {
    if (depth < 1 || depth > static_cast<int>(loops_.size()))
      fail(Rule::UndefinedOperand, "loop index \\" + std::to_string(depth) + " is not in scope");
  }

  void check_index(const IndexExpr& e, std::int64_t limit, const char* what) const {
    if (const auto* li = std::get_if<LoopIndex>(&e)) {
      check_loop_index(li->depth);
      const Interval& r = loops_[li->depth - 1];
      if (r.live && (r.lo < 1 || r.hi > limit))
        fail(Rule::DimensionMismatch, std::string(what) + " index \\" + std::to_string(li->depth) + " spans " +
                                          std::to_string(r.lo) + ".." + std::to_string(r.hi) + ", outside 1.." +
                                          std::to_string(limit));
      return;
    }
    const std::int64_t v = std::get<std::int64_t>(e);
    if (v < 1 || v > limit)
      fail(Rule::DimensionMismatch, std::string(what) + " index " + std::to_string(v) +
                                        " outside 1.." + std::to_string(limit));
  }

  const MatrixInfo& matrix(const State& s, int id) const {
    auto it = s.mats.find(id);
    if (it == s.mats.end()) fail(Rule::UndefinedOperand, "matrix $" + std::to_string(id) + " is not defined");
    return it->second;
  }

  Value operand(const State& s, const Operand& o) const {
    return std::visit(
        [&](const auto& v) -> Value {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, MatrixRef>) {
            const MatrixInfo& m = matrix(s, v.id);
            return {true, m.dims, m.taint};
          } else if constexpr (std::is_same_v<T, RegisterRef>) {
            auto it = s.regs.find(v.id);
            if (it == s.regs.end())
              fail(Rule::UndefinedOperand, "register %" + std::to_string(v.id) + " is not defined");
            return {false, {1, 1}, it->second};
          } else if constexpr (std::is_same_v<T, CellRef>) {
            const MatrixInfo& m = matrix(s, v.matrix);
            check_index(v.row, m.dims.rows, "row");
            check_index(v.col, m.dims.cols, "column");
            return {false, {1, 1}, m.taint};
          } else if constexpr (std::is_same_v<T, LoopIndex>) {
            check_loop_index(v.depth);
            return {};
          } else {
            return {};
          }
        },
        o);
  }

  Value scalar(const State& s, const Operand& o, const char* what) const {
    Value v = operand(s, o);
    if (v.is_matrix) fail(Rule::IllegalConstruct, std::string(what) + " needs a scalar operand");
    return v;
  }

  // Elementwise shape rule: matrix operands agree, scalars broadcast.
  Value elementwise(const State& s, const std::vector<Operand>& args) const {
    Value out;
    bool have_matrix = false;
    for (const Operand& a : args) {
      const Value v = operand(s, a);
      out.taint = taint_join(out.taint, v.taint);
      if (!v.is_matrix) continue;
      if (have_matrix && !(v.dims == out.dims))
        fail(Rule::DimensionMismatch,
             "operands are " + dims_str(out.dims) + " and " + dims_str(v.dims));
      out.dims = v.dims;
      out.is_matrix = have_matrix = true;
    }
    return out;
  }

  std::int64_t seq(const Seq& q, std::optional<std::int64_t> limit, const char* what) const {
    const std::int64_t n = seq_length(q);
    if (const auto* o = std::get_if<OrderedSeq>(&q)) {
      if (o->step == 0) fail(Rule::IllegalConstruct, std::string(what) + " sequence has step 0");
      if (n > 0 && limit) {
        const std::int64_t last = o->from + (n - 1) * o->step;
        check_index(o->from, *limit, what);
        check_index(last, *limit, what);
      }
    } else {
      for (const IndexExpr& e : std::get<UnorderedSeq>(q).items) {
        if (limit)
          check_index(e, *limit, what);
        else if (const auto* li = std::get_if<LoopIndex>(&e))
          check_loop_index(li->depth);
      }
    }
    if (n <= 0) fail(Rule::IllegalConstruct, std::string(what) + " sequence is empty");
    return n;
  }

  // -- instructions -----------------------------------------------------------

  void block(const std::vector<Instr>& instrs, State& s, int& index) {
    for (const Instr& in : instrs) {
      index_ = index;
      line_ = in.line;
      const int mine = index++;
      const Taint t = std::visit([&](const auto& n) { return instr(n, s, index); }, in.node);
      taints_[mine] = t;
    }
  }

  Taint instr(const DefMatrix& d, State& s, int&) {
    Taint t = Taint::Concrete;
    std::visit(
        [&](const auto& src) {
          using T = std::decay_t<decltype(src)>;
          if constexpr (std::is_same_v<T, RowsSource>) {
            if (static_cast<std::int64_t>(src.rows.size()) != d.dims.rows)
              fail(Rule::DimensionMismatch, "expected " + std::to_string(d.dims.rows) + " rows, got " +
                                                std::to_string(src.rows.size()));
            for (const auto& row : src.rows) {
              if (static_cast<std::int64_t>(row.size()) != d.dims.cols)
                fail(Rule::DimensionMismatch, "expected " + std::to_string(d.dims.cols) +
                                                  " values per row, got " + std::to_string(row.size()));
              for (const Operand& o : row) t = taint_join(t, scalar(s, o, "row entry").taint);
            }
          } else if constexpr (std::is_same_v<T, DatasetSource>) {
            auto it = datasets_.find(src.name);
            if (it == datasets_.end()) fail(Rule::DatasetUnknown, "dataset `" + src.name + "` is not declared");
            if (!(it->second == d.dims))
              fail(Rule::DimensionMismatch, "dataset `" + src.name + "` is " + dims_str(it->second) +
                                                ", definition says " + dims_str(d.dims));
            t = Taint::Pseudonym;
          } else if constexpr (std::is_same_v<T, OpSource>) {
            t = op_source(src, d.dims, s);
          } else {
            t = bind_source(src, d.dims, s);
          }
        },
        d.source);
    if (d.is_const && t == Taint::Pseudonym)
      fail(Rule::Rule1Downgrade, "const definition of $" + std::to_string(d.id) + " from pseudonym data");
    s.mats[d.id] = {d.dims, t, d.is_const};
    return t;
  }

  Taint op_source(const OpSource& src, Dims dims, const State& s) {
    const Op op = src.op;
    if (op == Op::Empty || op == Op::Rand) return Taint::Concrete;
    if (op == Op::MatMul) {
      const Value a = operand(s, src.args[0]), b = operand(s, src.args[1]);
      if (!a.is_matrix || !b.is_matrix) fail(Rule::IllegalConstruct, "%*% needs matrix operands");
      if (a.dims.cols != b.dims.rows)
        fail(Rule::DimensionMismatch, "%*% of " + dims_str(a.dims) + " and " + dims_str(b.dims));
      expect_dims(Dims{a.dims.rows, b.dims.cols}, dims);
      return taint_join(a.taint, b.taint);
    }
    if (op == Op::Range) {
      expect_dims(Dims{1, 2}, dims);
      return operand(s, src.args[0]).taint;
    }
    const Value v = elementwise(s, src.args);
    if (v.is_matrix) expect_dims(v.dims, dims);
    return v.taint;
  }

  Taint bind_source(const BindSource& b, Dims dims, const State& s) {
    Taint t = Taint::Concrete;
    std::int64_t along = 0;
    for (const Operand& o : b.args) {
      const Value v = operand(s, o);
      t = taint_join(t, v.taint);
      if (!v.is_matrix) {
        ++along;
        continue;
      }
      const std::int64_t across = b.by_columns ? v.dims.rows : v.dims.cols;
      const std::int64_t want = b.by_columns ? dims.rows : dims.cols;
      if (across != want)
        fail(Rule::DimensionMismatch, std::string(b.by_columns ? "cbind" : "rbind") + " operand is " +
                                          dims_str(v.dims) + ", result is " + dims_str(dims));
      along += b.by_columns ? v.dims.cols : v.dims.rows;
    }
    if (along != (b.by_columns ? dims.cols : dims.rows))
      fail(Rule::DimensionMismatch, "bound operands do not fill " + dims_str(dims));
    return t;
  }

  void expect_dims(Dims got, Dims want) const {
    if (!(got == want))
      fail(Rule::DimensionMismatch, "result is " + dims_str(got) + ", definition says " + dims_str(want));
  }

  Taint instr(const ScalarInstr& si, State& s, int&) {
    Taint t = Taint::Concrete;
    const Op op = si.op;
    if (is_summary(op)) {
      t = operand(s, si.args[0]).taint;
    } else if (op == Op::Set) {
      t = scalar(s, si.args[0], "set").taint;
    } else if (op == Op::IndexVar) {
      if (scalar(s, si.args[0], "indexvar").taint == Taint::Pseudonym)
        fail(Rule::Rule3PseudonymToUnsafe, "indexvar of a pseudonym");
    } else if (op == Op::Lookup) {
      const Value table = operand(s, si.args[0]);
      if (!table.is_matrix) fail(Rule::IllegalConstruct, "lookup table must be a matrix");
      if (table.taint == Taint::Pseudonym) fail(Rule::Rule3PseudonymToUnsafe, "lookup table is a pseudonym");
      t = scalar(s, si.args[1], "lookup").taint;
    } else {
      for (const Operand& a : si.args) t = taint_join(t, scalar(s, a, mnemonic(op).data()).taint);
    }
    s.regs[si.dest] = t;
    return t;
  }

  Taint instr(const EditInstr& e, State& s, int&) {
    switch (e.op) {
      case EditOp::Update: {
        matrix(s, e.dest);
        MatrixInfo& dest = s.mats.at(e.dest);
        const std::int64_t r = seq(e.rows, dest.dims.rows, "row");
        const std::int64_t c = seq(e.cols, dest.dims.cols, "column");
        const Value src = operand(s, e.src);
        if (src.is_matrix && !(src.dims == Dims{r, c}))
          fail(Rule::DimensionMismatch, "update region is " + dims_str({r, c}) + ", source is " +
                                            dims_str(src.dims));
        if (dest.is_const && src.taint == Taint::Pseudonym)
          fail(Rule::Rule1Downgrade, "update of const $" + std::to_string(e.dest) + " with pseudonym data");
        dest.taint = taint_join(dest.taint, src.taint);
        return dest.taint;
      }
      case EditOp::Slice:
      case EditOp::SliceConst: {
        const Value src = operand(s, e.src);
        const std::int64_t r = seq(e.rows, src.dims.rows, "row");
        const std::int64_t c = seq(e.cols, src.dims.cols, "column");
        const bool is_const = e.op == EditOp::SliceConst;
        if (is_const && src.taint == Taint::Pseudonym)
          fail(Rule::Rule3PseudonymToUnsafe, "slice const of a pseudonym");
        s.mats[e.dest] = {{r, c}, src.taint, is_const};
        return src.taint;
      }
      case EditOp::Dim: {
        const Value src = operand(s, e.src);
        const std::int64_t r = seq(e.rows, std::nullopt, "row");
        const std::int64_t c = seq(e.cols, std::nullopt, "column");
        if (r * c != src.dims.rows * src.dims.cols)
          fail(Rule::DimensionMismatch, "dim " + dims_str({r, c}) + " of a " + dims_str(src.dims) + " matrix");
        s.mats[e.dest] = {{r, c}, src.taint, false};
        return src.taint;
      }
    }
    return Taint::Concrete;
  }

  Taint instr(const SelectInstr& sel, State& s, int&) {
    const std::vector<Operand> args = {sel.cond, sel.on_true, sel.on_false};
    if (const auto* reg = std::get_if<RegisterRef>(&sel.dest)) {
      Taint t = Taint::Concrete;
      for (const Operand& a : args) t = taint_join(t, scalar(s, a, "select into a register").taint);
      s.regs[reg->id] = t;
      return t;
    }
    const int id = std::get<MatrixRef>(sel.dest).id;
    const Value v = elementwise(s, args);
    if (!v.is_matrix) fail(Rule::IllegalConstruct, "select into a matrix needs a matrix operand");
    auto it = s.mats.find(id);
    if (it != s.mats.end() && it->second.is_const && v.taint == Taint::Pseudonym)
      fail(Rule::Rule1Downgrade, "select into const $" + std::to_string(id) + " with pseudonym data");
    s.mats[id] = {v.dims, v.taint, false};
    return v.taint;
  }

  Interval bound(const State& s, const Operand& o, const char* what) const {
    if (const auto* lit = std::get_if<Literal>(&o)) {
      if (lit->is_nan() || lit->value != std::trunc(lit->value) || std::abs(lit->value) > 1e15)
        fail(Rule::IllegalConstruct, std::string("loop ") + what + " is not an integer");
      const auto v = static_cast<std::int64_t>(lit->value);
      return {v, v};
    }
    if (const auto* li = std::get_if<LoopIndex>(&o)) {
      check_loop_index(li->depth);
      return loops_[li->depth - 1];
    }
    if (operand(s, o).taint == Taint::Pseudonym)
      fail(Rule::LoopBoundTainted, std::string("loop ") + what + " depends on a pseudonym");
    fail(Rule::IllegalConstruct, std::string("loop ") + what + " must be an integer or loop index");
  }

  State join(const State& a, const State& b) const {
    State out;
    for (const auto& [id, ma] : a.mats) {
      auto it = b.mats.find(id);
      if (it == b.mats.end()) continue;
      if (!(ma.dims == it->second.dims))
        fail(Rule::DimensionMismatch, "$" + std::to_string(id) + " changes shape across loop iterations (" +
                                          dims_str(ma.dims) + " vs " + dims_str(it->second.dims) + ")");
      out.mats[id] = {ma.dims, taint_join(ma.taint, it->second.taint), ma.is_const && it->second.is_const};
    }
    for (const auto& [id, ta] : a.regs) {
      auto it = b.regs.find(id);
      if (it != b.regs.end()) out.regs[id] = taint_join(ta, it->second);
    }
    return out;
  }

  Taint instr(const ForLoop& loop, State& s, int& index) {
    if (loop.index != static_cast<int>(loops_.size()) + 1)
      fail(Rule::IllegalConstruct, "forloop " + std::to_string(loop.index) + " at nesting depth " +
                                       std::to_string(loops_.size() + 1));
    const Interval from = bound(s, loop.from, "start");
    const Interval to = bound(s, loop.to, "end");
    const Interval step_iv = bound(s, loop.step, "step");
    if (!std::holds_alternative<Literal>(loop.step) || step_iv.lo == 0)
      fail(Rule::IllegalConstruct, "loop step must be a nonzero integer literal");
    const std::int64_t step = step_iv.lo;

    const std::int64_t min_iters =
        step > 0 ? iteration_count(from.hi, to.lo, step) : iteration_count(from.lo, to.hi, step);
    const std::int64_t max_iters =
        step > 0 ? iteration_count(from.lo, to.hi, step) : iteration_count(from.hi, to.lo, step);
    Interval range = step > 0 ? Interval{from.lo, std::max(from.lo, to.hi)}
                              : Interval{std::min(to.lo, from.hi), from.hi};
    range.live = max_iters > 0 && (loops_.empty() || loops_.back().live);

    const int body_start = index;
    const int saved_index = index_, saved_line = line_;
    loops_.push_back(range);
    State head = s, post;
    while (true) {
      post = head;
      index = body_start;
      block(loop.body, post, index);
      index_ = saved_index;
      line_ = saved_line;
      State next = join(s, post);
      if (next == head) break;
      head = std::move(next);
    }
    loops_.pop_back();
    s = min_iters >= 1 ? post : head;
    return Taint::Concrete;
  }
};

}  // namespace

TaintedProgram validate(const Program& program, const std::map<std::string, Dims>& datasets) {
  return Validator(datasets).run(program);
}

TaintedProgram validate(const Program& program) { return validate(program, program.declared_datasets); }

}  // namespace dotvm
