// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "dotvm/audit.hpp"
#include "dotvm/dataset.hpp"
#include "dotvm/evaluator.hpp"
#include "dotvm/fixed.hpp"
#include "dotvm/opcount.hpp"
#include "dotvm/parser.hpp"
#include "dotvm/validator.hpp"
#include "oracles.hpp"
#include "programs.hpp"
#include "random_program.hpp"

using namespace dotvm;
using namespace dotvm::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

Block load(const RawDataset& d, std::optional<Dims> dims = std::nullopt) {
  return load_dataset(d.name, encode_dataset(d), dims);
}

RunResult run_text(const std::string& text, const std::map<std::string, Block>& data) {
  return run(validate(parse(text)), data);
}

// -- 1: NA truth table --------------------------------------------------------

Outcome truth_table() {
  Outcome out;
  const FixedScalar f = FixedScalar::from_int(0), t = FixedScalar::from_int(1), na = FixedScalar::na();
  struct Row {
    FixedScalar a, b, and_v, or_v;
    const char* label;
  };
  const Row rows[] = {
      {f, f, f, f, "0,0"},     {f, t, f, t, "0,1"},     {t, f, f, t, "1,0"},
      {t, t, t, t, "1,1"},     {f, na, f, na, "0,NA"},  {t, na, na, t, "1,NA"},
      {na, f, f, na, "NA,0"},  {na, t, na, t, "NA,1"},  {na, na, na, na, "NA,NA"},
  };
  for (const Row& r : rows) {
    if (!(fixed::logic(fixed::LogicOp::And, r.a, r.b) == r.and_v)) out.fail(std::string("& at ") + r.label);
    if (!(fixed::logic(fixed::LogicOp::Or, r.a, r.b) == r.or_v)) out.fail(std::string("| at ") + r.label);

    // Same table through the evaluator, with a pseudonym operand.
    Block d(1, 2, Taint::Pseudonym);
    d.cells = {r.a, r.b};
    const RunResult res = run_text(
        "def $1 [1:1] [1:2]\n\tdataset v\nend 1\n& %1 $1@(1,1) $1@(1,2)\n| %2 $1@(1,1) $1@(1,2)\n", {{"v", d}});
    if (!(res.registers.at(1).value == r.and_v)) out.fail(std::string("DOT & at ") + r.label);
    if (!(res.registers.at(2).value == r.or_v)) out.fail(std::string("DOT | at ") + r.label);
  }
  if (out.ok) out.detail = "9 entries each for & and |, library and DOT";
  return out;
}

// -- 2: fixed-point accuracy --------------------------------------------------

struct Domain {
  std::string name;
  std::function<std::pair<double, double>(std::mt19937_64&)> draw;
  std::function<FixedScalar(FixedScalar, FixedScalar)> fixed_op;
  std::function<double(double, double)> oracle;
};

double r_mod(double a, double b) {
  const double m = std::fmod(a, b);
  return (m != 0 && ((m < 0) != (b < 0))) ? m + b : m;
}

std::vector<Domain> domains() {
  using U = std::uniform_real_distribution<double>;
  auto sym = [](double lim) { return [lim](std::mt19937_64& g) { return std::pair{U(-lim, lim)(g), 0.0}; }; };
  auto arith = [](fixed::ArithOp op) { return [op](FixedScalar a, FixedScalar b) { return fixed::arith(op, a, b); }; };
  auto math = [](fixed::MathOp op) { return [op](FixedScalar a, FixedScalar) { return fixed::math1(op, a); }; };
  auto signed_range = [](std::mt19937_64& g, double lo, double hi) {
    const double m = std::exp(U(std::log(lo), std::log(hi))(g));
    return U(0, 1)(g) < 0.5 ? -m : m;
  };
  using A = fixed::ArithOp;
  using M = fixed::MathOp;
  return {
      {"+", [](auto& g) { return std::pair{U(-1e6, 1e6)(g), U(-1e6, 1e6)(g)}; }, arith(A::Add),
       [](double a, double b) { return a + b; }},
      {"-", [](auto& g) { return std::pair{U(-1e6, 1e6)(g), U(-1e6, 1e6)(g)}; }, arith(A::Sub),
       [](double a, double b) { return a - b; }},
      {"*", [](auto& g) { return std::pair{U(-1e4, 1e4)(g), U(-1e4, 1e4)(g)}; }, arith(A::Mul),
       [](double a, double b) { return a * b; }},
      {"/", [=](auto& g) { return std::pair{U(-1e6, 1e6)(g), signed_range(g, 1e-3, 1e3)}; }, arith(A::Div),
       [](double a, double b) { return a / b; }},
      {"%%", [=](auto& g) { return std::pair{U(-1e6, 1e6)(g), signed_range(g, 1e-2, 1e3)}; }, arith(A::Mod),
       r_mod},
      {"^",
       [](auto& g) {
         if (U(0, 1)(g) < 0.2) return std::pair{U(-30, 30)(g), std::floor(U(-4, 5)(g))};
         return std::pair{U(0.01, 50)(g), U(-4, 4)(g)};
       },
       arith(A::Pow), [](double a, double b) { return std::pow(a, b); }},
      {"abs", sym(1e6), math(M::Abs), [](double a, double) { return std::abs(a); }},
      {"sign", sym(1e6), math(M::Sign), [](double a, double) { return double((a > 0) - (a < 0)); }},
      {"neg", sym(1e6), math(M::Neg), [](double a, double) { return -a; }},
      {"sqrt", [](auto& g) { return std::pair{U(0, 1e6)(g), 0.0}; }, math(M::Sqrt),
       [](double a, double) { return std::sqrt(a); }},
      {"floor", sym(1e6), math(M::Floor), [](double a, double) { return std::floor(a); }},
      {"ceiling", sym(1e6), math(M::Ceiling), [](double a, double) { return std::ceil(a); }},
      {"exp", sym(20), math(M::Exp), [](double a, double) { return std::exp(a); }},
      {"log", [](auto& g) { return std::pair{U(1e-6, 20)(g), 0.0}; }, math(M::Log),
       [](double a, double) { return std::log(a); }},
      {"sin", sym(1e3), math(M::Sin), [](double a, double) { return std::sin(a); }},
      {"cos", sym(1e3), math(M::Cos), [](double a, double) { return std::cos(a); }},
      {"tan", sym(1e3), math(M::Tan), [](double a, double) { return std::tan(a); }},
  };
}

Outcome accuracy() {
  Outcome out;
  std::mt19937_64 rng(20240601);
  double worst = 0;
  std::string worst_op;
  for (const Domain& d : domains()) {
    for (int i = 0; i < 10000; ++i) {
      auto [x, y] = d.draw(rng);
      const FixedScalar fx = fixed::from_double(x), fy = fixed::from_double(y);
      // The oracle sees exactly the representable inputs.
      const double want = d.oracle(fixed::to_double(fx), fixed::to_double(fy));
      if (!std::isfinite(want) || std::abs(want) >= 2147483648.0) {
        --i;
        continue;
      }
      const FixedScalar got = d.fixed_op(fx, fy);
      if (got.tag != Tag::Num) {
        out.fail(d.name + "(" + std::to_string(x) + ", " + std::to_string(y) + ") is " + fixed::format(got));
        continue;
      }
      const double ratio = std::abs(fixed::to_double(got) - want) / tolerance(want);
      if (ratio > worst) worst = ratio, worst_op = d.name;
      if (ratio > 1)
        out.fail(d.name + "(" + std::to_string(x) + ", " + std::to_string(y) + ") off by " +
                 std::to_string(ratio) + " tolerances");
    }
  }
  if (out.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "17 ops x 10^4 inputs, worst %.3f of tolerance (%s)", worst, worst_op.c_str());
    out.detail = buf;
  }
  return out;
}

// -- 3: op-count invariance ---------------------------------------------------

FixedScalar random_operand(std::mt19937_64& g) {
  std::uniform_int_distribution<int> kind(0, 9);
  switch (kind(g)) {
    case 0: return FixedScalar::na();
    case 1: return FixedScalar::nan();
    case 2: return FixedScalar::pos_inf();
    case 3: return FixedScalar::neg_inf();
    case 4: return FixedScalar::from_int(std::uniform_int_distribution<int>(-3, 3)(g));
    case 5: return std::uniform_int_distribution<int>(0, 1)(g) ? FixedScalar::max_num() : FixedScalar::min_num();
    case 6: return FixedScalar::from_raw(static_cast<std::int64_t>(g()));
    default: return fixed::from_double(std::uniform_real_distribution<double>(-1e3, 1e3)(g));
  }
}

double random_double(std::mt19937_64& g) {
  switch (std::uniform_int_distribution<int>(0, 5)(g)) {
    case 0: return fixed::na_real();
    case 1: return std::numeric_limits<double>::quiet_NaN();
    case 2: return std::uniform_int_distribution<int>(0, 1)(g) ? INFINITY : -INFINITY;
    case 3: return std::bit_cast<double>(g());
    default: return std::uniform_real_distribution<double>(-1e10, 1e10)(g);
  }
}

Outcome opcount_invariance() {
  Outcome out;
  std::mt19937_64 rng(77);
  std::vector<std::pair<std::string, std::function<void(FixedScalar, FixedScalar, FixedScalar)>>> ops;
  for (int k = 0; k <= static_cast<int>(fixed::ArithOp::Pow); ++k)
    ops.push_back({"arith" + std::to_string(k),
                   [k](auto a, auto b, auto) { fixed::arith(static_cast<fixed::ArithOp>(k), a, b); }});
  for (int k = 0; k <= static_cast<int>(fixed::MathOp::Neg); ++k)
    ops.push_back({"math" + std::to_string(k),
                   [k](auto a, auto, auto) { fixed::math1(static_cast<fixed::MathOp>(k), a); }});
  for (int k = 0; k <= static_cast<int>(fixed::CompareOp::Ge); ++k)
    ops.push_back({"compare" + std::to_string(k),
                   [k](auto a, auto b, auto) { fixed::compare(static_cast<fixed::CompareOp>(k), a, b); }});
  for (int k = 0; k <= static_cast<int>(fixed::LogicOp::Not); ++k)
    ops.push_back({"logic" + std::to_string(k),
                   [k](auto a, auto b, auto) { fixed::logic(static_cast<fixed::LogicOp>(k), a, b); }});
  for (int k = 0; k <= static_cast<int>(fixed::ClassOp::IsInf); ++k)
    ops.push_back({"class" + std::to_string(k),
                   [k](auto a, auto, auto) { fixed::is_class(static_cast<fixed::ClassOp>(k), a); }});
  ops.push_back({"select", [](auto a, auto b, auto c) { fixed::ct_select(a, b, c); }});
  ops.push_back({"to_double", [](auto a, auto, auto) { (void)fixed::to_double(a); }});

  for (const auto& [name, fn] : ops) {
    std::optional<OpCount> first;
    for (int i = 0; i < 10000 && out.ok; ++i) {
      const FixedScalar a = random_operand(rng), b = random_operand(rng), c = random_operand(rng);
      OpCount count;
      {
        CountScope scope(count);
        fn(a, b, c);
      }
      if (!first) first = count;
      else if (!(count == *first))
        out.fail(name + " on (" + fixed::format(a) + ", " + fixed::format(b) + "): " + count.describe() +
                 " vs " + first->describe());
    }
  }
  std::optional<OpCount> first;
  for (int i = 0; i < 10000 && out.ok; ++i) {
    const double x = random_double(rng);
    OpCount count;
    {
      CountScope scope(count);
      (void)fixed::from_double(x);
    }
    if (!first) first = count;
    else if (!(count == *first)) out.fail("from_double(" + std::to_string(x) + ")");
  }
  if (out.ok) out.detail = std::to_string(ops.size() + 1) + " opcodes x 10^4 operand tuples";
  return out;
}

// -- 4: trace independence ----------------------------------------------------

Outcome trace_independence() {
  Outcome out;
  const std::int64_t rows = 1000, cols = 60;
  const std::pair<const char*, DotProgram> programs[] = {
      {"genotype", genotype_counts(rows, cols)},
      {"zero-negatives", zero_negatives(rows, cols)},
      {"allele-sharing", allele_sharing(rows, cols)},
  };
  std::string summary;
  for (const auto& [name, prog] : programs) {
    AuditConfig cfg;
    cfg.rows = rows;
    cfg.cols = cols;
    cfg.trials = 10;
    cfg.seed = 1954;
    const AuditReport report = audit(validate(parse(prog.text)), cfg);
    if (!report.ok()) {
      const Divergence& d = *report.divergence;
      out.fail(std::string(name) + " diverges at record " + std::to_string(d.record) + " (" + d.regimen +
               ", trial " + std::to_string(d.trial) + ")");
    }
    if (!summary.empty()) summary += ", ";
    summary += std::string(name) + " " + std::to_string(report.runs) + "x" + std::to_string(report.trace_length);
  }
  if (out.ok) out.detail = "runs x records: " + summary;
  return out;
}

// -- 5: semantic equivalence --------------------------------------------------

Outcome semantic_equivalence() {
  Outcome out;
  std::mt19937_64 rng(31337);
  const std::int64_t rows = 1000, cols = 60;
  int checked = 0;
  auto check = [&](const std::string& what, const Block& got, const RMatrix& want) {
    ++checked;
    if (std::string m = mismatch(got, want); !m.empty()) out.fail(what + ": " + m);
  };
  for (const Regimen& reg : {Regimen{"na30", 0.3, 0}, Regimen{"zero70", 0, 0.7}}) {
    const RawDataset x = random_dataset("x", rows, cols, reg, rng);
    const RawDataset geno = random_dataset("geno", rows, cols, reg, rng);
    const RMatrix rx = from_raw(x), rg = from_raw(geno);

    const DotProgram zn = zero_negatives(rows, cols);
    check("zero-negatives/" + reg.name, run_text(zn.text, {{"x", load(x)}}).matrices.at(zn.outputs[0]),
          zero_negatives_ref(rx));

    const DotProgram gc = genotype_counts(rows, cols);
    const RunResult gr = run_text(gc.text, {{"geno", load(geno)}});
    const auto gref = genotype_counts_ref(rg);
    for (int k = 0; k < 3; ++k)
      check("genotype n" + std::to_string(k) + "/" + reg.name, gr.matrices.at(gc.outputs[k]), gref[k]);

    const DotProgram as = allele_sharing(rows, cols);
    check("allele-sharing/" + reg.name, run_text(as.text, {{"geno", load(geno)}}).matrices.at(as.outputs[0]),
          allele_sharing_ref(rg));
  }
  for (int trial = 0; trial < 5; ++trial) {
    const RawDataset geno = random_genotypes("geno", 200, 20, 0.05, rng);
    const DotProgram hwe = hwe_chisq(200, 20);
    const RunResult r = run_text(hwe.text, {{"geno", load(geno)}});
    const auto ref = hwe_chisq_ref(from_raw(geno));
    check("hwe chi-square", r.matrices.at(hwe.outputs[0]), ref[0]);
    check("hwe p-value", r.matrices.at(hwe.outputs[1]), ref[1]);
  }
  if (out.ok) out.detail = std::to_string(checked) + " result matrices within max(2^-28, 1e-5 rel)";
  return out;
}

// -- 6: validation soundness --------------------------------------------------

Outcome validation_soundness() {
  Outcome out;
  try {
    validate(parse(mutation_base()), {{"geno", {2, 2}}});
  } catch (const ValidationError& e) {
    out.fail(std::string("base program rejected: ") + e.what());
  }
  for (const Mutant& m : mutation_corpus()) {
    try {
      validate(parse(m.text), m.datasets);
      out.fail(std::string(to_string(m.rule)) + " mutant accepted");
    } catch (const ValidationError& e) {
      if (e.rule() != m.rule)
        out.fail(std::string(to_string(m.rule)) + " mutant rejected as " + std::string(to_string(e.rule())));
    }
  }
  std::mt19937_64 rng(100);
  for (int i = 0; i < 100; ++i) {
    const Program p = random_program(rng);
    const std::string text = print(p);
    try {
      const Program q = parse(text);
      if (!(q == p)) out.fail("random program " + std::to_string(i) + " changes on parse(print(p))");
      else if (print(q) != text) out.fail("random program " + std::to_string(i) + " prints differently");
    } catch (const ParseError& e) {
      out.fail("random program " + std::to_string(i) + ": " + e.what());
    }
  }
  if (out.ok) out.detail = "7 mutants rejected with the right kind, 100 random round-trips";
  return out;
}

// -- 7: PageRank --------------------------------------------------------------

Outcome pagerank_check() {
  Outcome out;
  const std::int64_t n = 50;
  const double damping = 0.85;
  std::mt19937_64 rng(4242);
  const RawDataset graph = random_graph("graph", n, 0.1, rng);
  const DotProgram pr = pagerank(n, 100, damping);
  const RunResult r = run_text(pr.text, {{"graph", load(graph)}});
  const Block& rank = r.matrices.at(pr.outputs[0]);
  const std::vector<double> want = pagerank_ref(from_raw(graph), damping);

  std::vector<double> got(static_cast<std::size_t>(n));
  double max_err = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    got[i] = fixed::to_double(rank.at(i, 0));
    max_err = std::max(max_err, std::abs(got[i] - want[i]));
  }
  auto top10 = [](const std::vector<double>& s) {
    std::vector<int> idx(s.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return s[a] > s[b]; });
    idx.resize(10);
    return idx;
  };
  if (top10(got) != top10(want)) out.fail("top-10 order differs");
  if (!(max_err <= 1e-4)) out.fail("max score error " + std::to_string(max_err));
  if (out.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "top-10 order matches, max score error %.2e", max_err);
    out.detail = buf;
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    double budget_s;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "NA truth table", 1, truth_table},
      {2, "fixed-point accuracy", 30, accuracy},
      {3, "op-count invariance", 60, opcount_invariance},
      {4, "trace independence", 300, trace_independence},
      {5, "semantic equivalence", 120, semantic_equivalence},
      {6, "validation soundness", 10, validation_soundness},
      {7, "PageRank", 30, pagerank_check},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) o.fail("took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_s) + " s");
    std::printf("%s criterion %d (%s) %.2fs: %s\n", o.ok ? "PASS" : "FAIL", c.number, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  return failed ? 1 : 0;
}
