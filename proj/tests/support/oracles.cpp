#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dotvm/fixed.hpp"

namespace dotvm::testing {

RMatrix from_raw(const RawDataset& d) {
  RMatrix out(static_cast<std::int64_t>(d.rows), static_cast<std::int64_t>(d.cols));
  for (std::size_t i = 0; i < d.values.size(); ++i)
    if (!fixed::is_na_real(d.values[i])) out.cells[i] = d.values[i];
  return out;
}

RMatrix zero_negatives_ref(RMatrix x) {
  for (std::int64_t i = 0; i < x.rows; ++i) {
    Cell& c = x.at(i, 0);
    if (c && *c < 0) c = 0.0;
  }
  return x;
}

std::vector<RMatrix> genotype_counts_ref(const RMatrix& geno) {
  std::vector<RMatrix> out(3, RMatrix(geno.rows, 1));
  for (std::int64_t i = 0; i < geno.rows; ++i) {
    double n[3] = {0, 0, 0};
    for (std::int64_t j = 0; j < geno.cols; ++j) {
      const Cell& c = geno.at(i, j);
      if (!c) continue;
      for (int k = 0; k < 3; ++k)
        if (*c == k) n[k] += 1;
    }
    for (int k = 0; k < 3; ++k) out[k].at(i, 0) = n[k];
  }
  return out;
}

RMatrix allele_sharing_ref(const RMatrix& geno) {
  RMatrix out(1, geno.cols);
  out.at(0, 0) = 0.0;
  for (std::int64_t j = 1; j < geno.cols; ++j) {
    double dist = 0, present = 0;
    for (std::int64_t i = 0; i < geno.rows; ++i) {
      const Cell &a = geno.at(i, 0), &b = geno.at(i, j);
      if (!a || !b) continue;
      dist += std::abs(*a - *b);
      present += 1;
    }
    out.at(0, j) = dist / (2 * present);
  }
  return out;
}

std::vector<RMatrix> hwe_chisq_ref(const RMatrix& geno) {
  RMatrix chi(geno.rows, 1), p(geno.rows, 1);
  for (std::int64_t i = 0; i < geno.rows; ++i) {
    double obs[3] = {0, 0, 0};
    for (std::int64_t j = 0; j < geno.cols; ++j)
      if (const Cell& c = geno.at(i, j); c)
        for (int k = 0; k < 3; ++k)
          if (*c == k) obs[k] += 1;
    const double n = obs[0] + obs[1] + obs[2];
    const double f = (2 * obs[0] + obs[1]) / (2 * n);
    const double exp[3] = {n * f * f, 2 * n * f * (1 - f), n * (1 - f) * (1 - f)};
    double x = 0;
    for (int k = 0; k < 3; ++k) x += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
    chi.at(i, 0) = x;
    p.at(i, 0) = std::erfc(std::sqrt(x / 2));
  }
  return {chi, p};
}

std::vector<double> pagerank_ref(const RMatrix& adjacency, double damping) {
  const std::int64_t n = adjacency.rows;
  std::vector<double> out_degree(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) out_degree[j] += adjacency.at(i, j).value_or(0);
  std::vector<double> r(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n)), next(r.size());
  for (int it = 0; it < 10000; ++it) {
    double delta = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      double acc = 0;
      for (std::int64_t j = 0; j < n; ++j) acc += adjacency.at(i, j).value_or(0) / out_degree[j] * r[j];
      next[i] = damping * acc + (1 - damping) / static_cast<double>(n);
      delta = std::max(delta, std::abs(next[i] - r[i]));
    }
    r.swap(next);
    if (delta < 1e-15) break;
  }
  return r;
}

RawDataset random_genotypes(const std::string& name, std::int64_t rows, std::int64_t cols, double na,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RawDataset d{name, static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(cols), {}};
  d.values.resize(static_cast<std::size_t>(rows * cols));
  for (std::int64_t i = 0; i < rows; ++i) {
    const double f = 0.1 + 0.8 * u(rng);
    for (std::int64_t j = 0; j < cols; ++j) {
      double& v = d.values[static_cast<std::size_t>(i * cols + j)];
      if (u(rng) < na) {
        v = fixed::na_real();
        continue;
      }
      v = (u(rng) < f ? 1.0 : 0.0) + (u(rng) < f ? 1.0 : 0.0);
    }
  }
  return d;
}

RawDataset random_graph(const std::string& name, std::int64_t nodes, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> pick(0, nodes - 2);
  RawDataset d{name, static_cast<std::uint64_t>(nodes), static_cast<std::uint64_t>(nodes), {}};
  d.values.assign(static_cast<std::size_t>(nodes * nodes), 0.0);
  auto cell = [&](std::int64_t i, std::int64_t j) -> double& { return d.values[static_cast<std::size_t>(i * nodes + j)]; };
  for (std::int64_t j = 0; j < nodes; ++j) {
    bool any = false;
    for (std::int64_t i = 0; i < nodes; ++i)
      if (i != j && u(rng) < density) cell(i, j) = 1.0, any = true;
    if (!any) {
      const std::int64_t i = pick(rng);
      cell(i < j ? i : i + 1, j) = 1.0;
    }
  }
  return d;
}

double tolerance(double want, double rel) { return std::max(std::ldexp(1.0, -28), rel * std::abs(want)); }

std::string mismatch(const FixedScalar& got, const Cell& want, double rel) {
  std::ostringstream out;
  out.precision(17);
  if (!want) {
    if (got.tag == Tag::Na) return {};
    out << "want NA, got " << fixed::format(got, 17);
    return out.str();
  }
  const double w = *want;
  const Tag expect = std::isnan(w) ? Tag::NaN : std::isinf(w) ? (w > 0 ? Tag::PosInf : Tag::NegInf) : Tag::Num;
  if (got.tag != expect) {
    out << "want " << w << ", got " << fixed::format(got, 17);
    return out.str();
  }
  if (expect != Tag::Num) return {};
  const double g = fixed::to_double(got);
  if (std::abs(g - w) <= tolerance(w, rel)) return {};
  out << "want " << w << ", got " << g << " (error " << std::abs(g - w) << ")";
  return out.str();
}

std::string mismatch(const Block& got, const RMatrix& want, double rel) {
  if (got.rows != want.rows || got.cols != want.cols)
    return "shape " + std::to_string(got.rows) + "x" + std::to_string(got.cols) + ", want " +
           std::to_string(want.rows) + "x" + std::to_string(want.cols);
  for (std::int64_t i = 0; i < got.rows; ++i)
    for (std::int64_t j = 0; j < got.cols; ++j)
      if (std::string m = mismatch(got.at(i, j), want.at(i, j), rel); !m.empty())
        return "cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): " + m;
  return {};
}

}  // namespace dotvm::testing
