// dotvm: check, run and audit data-oblivious transcripts.
//
// Exit codes: 0 ok, 1 I/O, 2 language/validation (and usage), 3 runtime,
// 4 audit divergence.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dotvm/audit.hpp"
#include "dotvm/dataset.hpp"
#include "dotvm/evaluator.hpp"
#include "dotvm/parser.hpp"
#include "dotvm/validator.hpp"

namespace fs = std::filesystem;
using namespace dotvm;

namespace {

enum Exit { kOk = 0, kIo = 1, kLanguage = 2, kRuntime = 3, kDivergence = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read `" + path + "`");
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read `" + path + "`");
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write `" + path.string() + "`");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write `" + path.string() + "`");
}

std::string summary(const RunResult& r) {
  std::ostringstream out;
  for (const auto& [id, b] : r.matrices) {
    out << "$" << id << " " << b.rows << "x" << b.cols << " " << to_string(b.taint) << "\n";
    for (std::int64_t i = 0; i < b.rows; ++i) {
      for (std::int64_t j = 0; j < b.cols; ++j) out << (j ? " " : "") << fixed::format(b.at(i, j));
      out << "\n";
    }
  }
  for (const auto& [id, s] : r.registers)
    out << "%" << id << " " << to_string(s.taint) << "\n" << fixed::format(s.value) << "\n";
  return out.str();
}

int cmd_check(const std::string& dot) {
  const TaintedProgram tp = validate(parse(read_text(dot)));
  std::cout << "ok: " << count_instrs(tp.program.instrs) << " instructions, "
            << tp.program.declared_datasets.size() << " dataset(s)\n";
  return kOk;
}

int cmd_run(const std::string& dot, const std::vector<std::string>& bindings, const std::string& out_dir,
            std::uint64_t seed, const std::string& trace_path) {
  const Program program = parse(read_text(dot));

  std::map<std::string, std::string> paths;
  for (const std::string& b : bindings) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == b.size()) {
      std::cerr << "error: --data expects name=path, got `" << b << "`\n";
      return kLanguage;
    }
    const std::string name = b.substr(0, eq);
    if (!program.declared_datasets.count(name)) {
      std::cerr << "error: program declares no dataset `" << name << "`\n";
      return kLanguage;
    }
    if (!paths.emplace(name, b.substr(eq + 1)).second) {
      std::cerr << "error: dataset `" << name << "` bound twice\n";
      return kLanguage;
    }
  }
  for (const auto& [name, dims] : program.declared_datasets)
    if (!paths.count(name)) {
      std::cerr << "error: no --data binding for dataset `" << name << "`\n";
      return kLanguage;
    }

  // Shapes come from the files; validation then checks them against the
  // definitions before any cell is converted.
  std::map<std::string, RawDataset> raw;
  std::map<std::string, Dims> shapes;
  for (const auto& [name, path] : paths) {
    RawDataset d = decode_dataset(read_bytes(path));
    shapes[name] = {static_cast<std::int64_t>(d.rows), static_cast<std::int64_t>(d.cols)};
    raw.emplace(name, std::move(d));
  }
  const TaintedProgram tp = validate(program, shapes);

  std::map<std::string, Block> data;
  for (const auto& [name, path] : paths)
    data.emplace(name, load_dataset(name, encode_dataset(raw.at(name)), program.declared_datasets.at(name)));

  const RunResult result = run(tp, data, RunOptions{seed});

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create `" + out_dir + "`: " + ec.message());
  const fs::path out(out_dir);
  for (const auto& [id, b] : result.matrices)
    write_bytes(out / ("matrix_" + std::to_string(id) + ".bin"), export_block("m" + std::to_string(id), b));
  for (const auto& [id, s] : result.registers) {
    Block one(1, 1, s.taint);
    one.cells[0] = s.value;
    write_bytes(out / ("register_" + std::to_string(id) + ".bin"), export_block("r" + std::to_string(id), one));
  }
  write_text(out / "summary.txt", summary(result));
  if (!trace_path.empty()) {
    std::string text;
    for (const auto& rec : result.trace) text += format_record(rec) + "\n";
    write_text(trace_path, text);
  }
  std::cout << "ok: " << result.trace.size() << " trace records, " << result.matrices.size() << " matrices, "
            << result.registers.size() << " registers\n";
  return kOk;
}

int cmd_audit(const std::string& dot, std::int64_t rows, std::int64_t cols, int trials, std::uint64_t seed,
              const std::string& fault) {
  const TaintedProgram tp = validate(parse(read_text(dot)));
  AuditConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.trials = trials;
  cfg.seed = seed;
  if (fault == "branch-on-tag") {
    cfg.run_options.fault = Fault::BranchOnTag;
    cfg.run_options.guard = false;
  }
  AuditReport report;
  try {
    report = audit(tp, cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLanguage;
  }
  if (report.ok()) {
    std::cout << "ok: " << report.runs << " runs over " << cfg.regimens.size()
              << " regimens, identical traces of " << report.trace_length << " records\n";
    return kOk;
  }
  const Divergence& d = *report.divergence;
  std::cout << "DIVERGENCE at record " << d.record << " (regimen " << d.regimen << ", trial " << d.trial << ")\n"
            << "  expected: " << d.expected << "\n"
            << "  actual:   " << d.actual << "\n";
  return kDivergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dotvm: validate, run and audit data-oblivious transcripts"};
  app.require_subcommand(1);

  std::string dot;
  auto* check = app.add_subcommand("check", "parse and validate a DOT file");
  check->add_option("dot", dot, "DOT file")->required();

  std::vector<std::string> bindings;
  std::string out_dir, trace_path;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "evaluate a DOT on datasets");
  run_cmd->add_option("dot", dot, "DOT file")->required();
  run_cmd->add_option("--data", bindings, "dataset binding name=path (repeatable)");
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  run_cmd->add_option("--seed", seed, "seed for `rand`");
  run_cmd->add_option("--trace", trace_path, "write the trace here");

  std::int64_t rows = 0, cols = 0;
  int trials = 10;
  std::string fault;
  auto* audit_cmd = app.add_subcommand("audit", "compare traces across random datasets");
  audit_cmd->add_option("dot", dot, "DOT file")->required();
  audit_cmd->add_option("--rows", rows, "dataset rows")->required()->check(CLI::PositiveNumber);
  audit_cmd->add_option("--cols", cols, "dataset columns")->required()->check(CLI::PositiveNumber);
  audit_cmd->add_option("--trials", trials, "datasets per regimen")->required()->check(CLI::PositiveNumber);
  audit_cmd->add_option("--seed", seed, "generator seed");
  audit_cmd->add_option("--fault", fault)->check(CLI::IsMember({"branch-on-tag"}))->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kLanguage;
  }

  try {
    if (*check) return cmd_check(dot);
    if (*run_cmd) return cmd_run(dot, bindings, out_dir, seed, trace_path);
    return cmd_audit(dot, rows, cols, trials, seed, fault);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << dot << ":" << e.what() << "\n";
    return kLanguage;
  } catch (const ValidationError& e) {
    std::cerr << dot << ": " << e.what() << "\n";
    return kLanguage;
  } catch (const RuntimeError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}
