#include "dotvm/dataset.hpp"

#include <bit>
#include <cstring>

namespace dotvm {

DatasetError::DatasetError(Kind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

std::string_view to_string(DatasetError::Kind kind) {
  switch (kind) {
    case DatasetError::Kind::MalformedHeader: return "MalformedHeader";
    case DatasetError::Kind::DimensionMismatch: return "DimensionMismatch";
    case DatasetError::Kind::TruncatedPayload: return "TruncatedPayload";
  }
  return "";
}

namespace {

constexpr std::uint8_t kVersion = 1;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint64_t le(int bytes, DatasetError::Kind kind, const char* what) {
    need(bytes, kind, what);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += bytes;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, DatasetError::Kind kind, const char* what) {
    need(n, kind, what);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;

  void need(std::size_t n, DatasetError::Kind kind, const char* what) const {
    if (b_.size() - pos_ < n) throw DatasetError(kind, std::string("input ends inside ") + what);
  }
};

}  // namespace

std::vector<std::uint8_t> encode_dataset(const RawDataset& d) {
  std::vector<std::uint8_t> out = {'D', 'O', 'V', 'E', kVersion, 0};
  put_le(out, d.name.size(), 2);
  out.insert(out.end(), d.name.begin(), d.name.end());
  put_le(out, d.rows, 8);
  put_le(out, d.cols, 8);
  out.reserve(out.size() + 8 * d.values.size());
  for (double v : d.values) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

RawDataset decode_dataset(std::span<const std::uint8_t> bytes) {
  using K = DatasetError::Kind;
  Reader r(bytes);
  const auto magic = r.take(4, K::MalformedHeader, "magic");
  if (std::memcmp(magic.data(), "DOVE", 4) != 0) throw DatasetError(K::MalformedHeader, "bad magic");
  if (r.le(1, K::MalformedHeader, "version") != kVersion)
    throw DatasetError(K::MalformedHeader, "unsupported version");
  if (r.le(1, K::MalformedHeader, "reserved byte") != 0)
    throw DatasetError(K::MalformedHeader, "reserved byte is not zero");
  const auto n = r.le(2, K::MalformedHeader, "name length");
  const auto name = r.take(n, K::MalformedHeader, "name");

  RawDataset d;
  d.name.assign(name.begin(), name.end());
  d.rows = r.le(8, K::MalformedHeader, "rows");
  d.cols = r.le(8, K::MalformedHeader, "cols");
  if (d.rows == 0 || d.cols == 0) throw DatasetError(K::MalformedHeader, "empty dimensions");
  if (d.rows > (1ULL << 31) || d.cols > (1ULL << 31) || d.rows * d.cols > (1ULL << 34))
    throw DatasetError(K::MalformedHeader, "dimensions too large");

  const std::uint64_t cells = d.rows * d.cols;
  if (r.remaining() < cells * 8)
    throw DatasetError(K::TruncatedPayload, "header says " + std::to_string(cells) + " cells, payload has " +
                                                std::to_string(r.remaining() / 8));
  if (r.remaining() > cells * 8) throw DatasetError(K::MalformedHeader, "trailing bytes after payload");
  d.values.resize(cells);
  for (auto& v : d.values) v = std::bit_cast<double>(r.le(8, K::TruncatedPayload, "payload"));
  return d;
}

Block load_dataset(std::string_view name, std::span<const std::uint8_t> bytes, std::optional<Dims> expected) {
  const RawDataset d = decode_dataset(bytes);
  if (d.name != name)
    throw DatasetError(DatasetError::Kind::MalformedHeader,
                       "file holds dataset `" + d.name + "`, expected `" + std::string(name) + "`");
  const Dims dims{static_cast<std::int64_t>(d.rows), static_cast<std::int64_t>(d.cols)};
  if (expected && !(*expected == dims))
    throw DatasetError(DatasetError::Kind::DimensionMismatch,
                       "`" + d.name + "` is " + std::to_string(dims.rows) + "x" + std::to_string(dims.cols) +
                           ", program declares " + std::to_string(expected->rows) + "x" +
                           std::to_string(expected->cols));
  Block b(dims.rows, dims.cols, Taint::Pseudonym);
  for (std::size_t i = 0; i < b.cells.size(); ++i) b.cells[i] = fixed::from_double(d.values[i]);
  return b;
}

std::vector<std::uint8_t> export_block(std::string_view name, const Block& b) {
  RawDataset d{std::string(name), static_cast<std::uint64_t>(b.rows), static_cast<std::uint64_t>(b.cols), {}};
  d.values.reserve(b.cells.size());
  for (const auto& c : b.cells) d.values.push_back(fixed::to_double(c));
  return encode_dataset(d);
}

}  // namespace dotvm
