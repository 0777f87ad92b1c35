#include "random_program.hpp"

#include <cmath>
#include <limits>

namespace dotvm::testing {

namespace {

class Gen {
 public:
  explicit Gen(std::mt19937_64& rng) : rng_(rng) {}

  Program program() {
    Program p;
    p.instrs = block(0, 1 + pick(12));
    for_each_instr(p.instrs, [&](const Instr& in) {
      if (const auto* d = std::get_if<DefMatrix>(&in.node))
        if (const auto* ds = std::get_if<DatasetSource>(&d->source)) p.declared_datasets.emplace(ds->name, d->dims);
    });
    return p;
  }

 private:
  std::mt19937_64& rng_;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 1; }
  int id() { return 1 + pick(20); }
  std::int64_t natural() { return 1 + pick(9); }

  Literal literal() {
    switch (pick(5)) {
      case 0: return Literal{std::numeric_limits<double>::quiet_NaN()};
      case 1: return Literal{static_cast<double>(pick(2001) - 1000)};
      case 2: return Literal{(pick(2001) - 1000) / 64.0};
      default: return Literal{std::uniform_real_distribution<double>(-1e6, 1e6)(rng_)};
    }
  }

  IndexExpr index(int depth) {
    if (depth > 0 && coin()) return LoopIndex{1 + pick(depth)};
    return static_cast<std::int64_t>(pick(7) - 1);
  }

  Operand scalar(int depth) {
    switch (pick(depth > 0 ? 4 : 3)) {
      case 0: return RegisterRef{id()};
      case 1: return CellRef{id(), index(depth), index(depth)};
      case 2: return literal();
      default: return LoopIndex{1 + pick(depth)};
    }
  }

  Operand operand(int depth) {
    if (pick(3) == 0) return MatrixRef{id()};
    return scalar(depth);
  }

  std::vector<Operand> operands(Op op, int depth) {
    const auto [lo, hi] = arity(op);
    std::vector<Operand> out;
    const int n = lo + pick(hi - lo + 1);
    for (int i = 0; i < n; ++i) out.push_back(operand(depth));
    return out;
  }

  Seq seq(int depth) {
    if (coin()) return OrderedSeq{pick(9) - 2, pick(9) - 2, pick(7) - 3};
    UnorderedSeq u;
    const int n = 1 + pick(4);
    for (int i = 0; i < n; ++i) u.items.push_back(index(depth));
    return u;
  }

  Op op_where(bool (*ok)(Op)) {
    while (true) {
      const auto op = static_cast<Op>(pick(static_cast<int>(Op::Range) + 1));
      if (ok(op)) return op;
    }
  }

  DefMatrix def(int depth) {
    DefMatrix d;
    d.id = id();
    d.dims = {natural(), natural()};
    d.is_const = coin();
    switch (pick(4)) {
      case 0: {
        RowsSource rows;
        const int nr = 1 + pick(3);
        for (int r = 0; r < nr; ++r) {
          std::vector<Operand> row;
          const int nc = 1 + pick(3);
          for (int c = 0; c < nc; ++c) row.push_back(scalar(depth));
          rows.rows.push_back(std::move(row));
        }
        d.source = std::move(rows);
        break;
      }
      case 1: {
        static const char* kNames[] = {"geno", "x", "graph", "d2"};
        d.source = DatasetSource{kNames[pick(4)]};
        break;
      }
      case 2: {
        const Op op = op_where(allowed_in_matrix_instr);
        d.source = OpSource{op, operands(op, depth)};
        break;
      }
      default: {
        BindSource b{coin(), {}};
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) b.args.push_back(operand(depth));
        d.source = std::move(b);
      }
    }
    return d;
  }

  Instr instr(int depth) {
    Instr in;
    const int kind = pick(depth < 2 ? 5 : 4);
    switch (kind) {
      case 0: in.node = def(depth); break;
      case 1: {
        const Op op = op_where(allowed_in_scalar_instr);
        in.node = ScalarInstr{op, id(), operands(op, depth)};
        break;
      }
      case 2: {
        const auto op = static_cast<EditOp>(pick(4));
        const Operand src = op == EditOp::Update ? operand(depth) : Operand{MatrixRef{id()}};
        in.node = EditInstr{op, id(), seq(depth), seq(depth), src};
        break;
      }
      case 3: {
        const Operand dest = coin() ? Operand{MatrixRef{id()}} : Operand{RegisterRef{id()}};
        in.node = SelectInstr{dest, operand(depth), operand(depth), operand(depth)};
        break;
      }
      default: {
        ForLoop loop;
        loop.index = depth + 1;
        auto bound = [&]() -> Operand {
          if (depth > 0 && coin()) return LoopIndex{1 + pick(depth)};
          return Literal{static_cast<double>(pick(21) - 5)};
        };
        loop.from = bound();
        loop.to = bound();
        loop.step = Literal{static_cast<double>(pick(5) - 2)};
        loop.body = block(depth + 1, pick(5));
        in.node = std::move(loop);
      }
    }
    return in;
  }

  std::vector<Instr> block(int depth, int n) {
    std::vector<Instr> out;
    for (int i = 0; i < n; ++i) out.push_back(instr(depth));
    return out;
  }
};

}  // namespace

Program random_program(std::mt19937_64& rng) { return Gen(rng).program(); }

}  // namespace dotvm::testing
