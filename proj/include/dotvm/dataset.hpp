#pragma once

// Binary dataset format, used for inputs and exported results:
//
//   "DOVE" u8 version=1 u8 reserved=0 u16 name_len name[name_len]
//   u64 rows u64 cols f64[rows*cols]           (all little-endian, row-major)
//
// NA cells are NaNs whose low 32-bit word is 1954.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dotvm/ast.hpp"
#include "dotvm/block.hpp"

namespace dotvm {

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { MalformedHeader, DimensionMismatch, TruncatedPayload };
  DatasetError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(DatasetError::Kind kind);

struct RawDataset {
  std::string name;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> values;
};

std::vector<std::uint8_t> encode_dataset(const RawDataset& d);
RawDataset decode_dataset(std::span<const std::uint8_t> bytes);

// Decodes and converts every cell with from_double. The result is a
// Pseudonym block. `name` must match the header; `expected` (if given) must
// match its dims.
Block load_dataset(std::string_view name, std::span<const std::uint8_t> bytes,
                   std::optional<Dims> expected = std::nullopt);

// Exports a block in the same format (cells via to_double).
std::vector<std::uint8_t> export_block(std::string_view name, const Block& b);

}  // namespace dotvm
