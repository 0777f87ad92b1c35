#include "dotvm/audit.hpp"

#include <array>
#include <stdexcept>

#include "dotvm/fixed.hpp"

namespace dotvm {

std::vector<Regimen> default_regimens() {
  std::vector<Regimen> out;
  for (int p = 10; p <= 50; p += 10) out.push_back({"na" + std::to_string(p), p / 100.0, 0});
  for (int p = 50; p <= 90; p += 10) out.push_back({"zero" + std::to_string(p), 0, p / 100.0});
  return out;
}

RawDataset random_dataset(const std::string& name, std::int64_t rows, std::int64_t cols, const Regimen& regimen,
                          std::mt19937_64& rng) {
  static constexpr std::array<double, 6> kValues = {1.0, 2.0, -1.0, 3.0, 0.5, -2.5};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, kValues.size() - 1);
  RawDataset d{name, static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(cols), {}};
  d.values.resize(static_cast<std::size_t>(rows * cols));
  for (double& v : d.values) {
    const double r = u(rng);
    if (r < regimen.na_fraction)
      v = fixed::na_real();
    else if (r < regimen.na_fraction + regimen.zero_fraction)
      v = 0.0;
    else
      v = kValues[pick(rng)];
  }
  return d;
}

AuditReport audit(const TaintedProgram& program, const AuditConfig& config) {
  for (const auto& [name, dims] : program.program.declared_datasets)
    if (dims.rows != config.rows || dims.cols != config.cols)
      throw std::invalid_argument("dataset `" + name + "` is declared " + std::to_string(dims.rows) + "x" +
                                  std::to_string(dims.cols) + ", audit shape is " + std::to_string(config.rows) +
                                  "x" + std::to_string(config.cols));

  std::mt19937_64 rng(config.seed);
  AuditReport report;
  std::optional<RunResult> reference;
  for (const Regimen& regimen : config.regimens) {
    for (int trial = 0; trial < config.trials; ++trial) {
      std::map<std::string, Block> data;
      for (const auto& [name, dims] : program.program.declared_datasets) {
        const RawDataset raw = random_dataset(name, dims.rows, dims.cols, regimen, rng);
        data.emplace(name, load_dataset(name, encode_dataset(raw), dims));
      }
      RunOptions opts = config.run_options;
      opts.seed = config.seed;
      RunResult r = run(program, data, opts);
      ++report.runs;
      if (!reference) {
        report.trace_length = r.trace.size();
        reference = std::move(r);
        continue;
      }
      if (auto at = first_divergence(*reference, r)) {
        auto describe = [&](const RunResult& x) -> std::string {
          if (*at >= x.trace.size()) return "<end>";
          return format_record(x.trace[*at]) + " steps=" + std::to_string(x.step_counts[*at]);
        };
        report.divergence = Divergence{regimen.name, trial, *at, describe(*reference), describe(r)};
        return report;
      }
    }
  }
  return report;
}

}  // namespace dotvm
