#pragma once

// DOT generators for the end-to-end programs. Each returns the text plus the
// ids of the matrices that hold its results.

#include <cstdint>
#include <string>
#include <vector>

namespace dotvm::testing {

struct DotProgram {
  std::string text;
  std::vector<int> outputs;
};

// for (i in 1:nrow(x)) if (x[i,1] < 0) x[i,1] <- 0
// Dataset `x`; output is $1 itself.
DotProgram zero_negatives(std::int64_t rows, std::int64_t cols);

// geno[(geno!=0) & (geno!=1) & (geno!=2)] <- NA
// n_k <- apply(geno==k, 1, sum, na.rm=T) for k = 0, 1, 2
// Dataset `geno`; outputs n0, n1, n2 as rows x 1.
DotProgram genotype_counts(std::int64_t rows, std::int64_t cols);

// Allele-sharing distance of every column (individual) to column 1:
// sum |g1 - gj| / (2 * #SNPs where both are present). Dataset `geno`;
// output is 1 x cols with entry 1 fixed at 0.
DotProgram allele_sharing(std::int64_t rows, std::int64_t cols);

// Per-SNP (row) Hardy-Weinberg chi-square with 1 df, and its upper-tail
// p-value via a fixed-term erfc. Dataset `geno`; outputs chi, p (rows x 1).
DotProgram hwe_chisq(std::int64_t rows, std::int64_t cols);

// Power iteration r <- d * M r + (1 - d) / n, M the column-normalised
// adjacency (A[i,j] = 1 when j links to i). Dataset `graph`; output is r.
DotProgram pagerank(std::int64_t nodes, int iterations, double damping);

// The Chebyshev erfc used by hwe_chisq, evaluated in doubles.
double erfc_cheb(double z);

}  // namespace dotvm::testing
