#pragma once
//
// On-disk containers for compressed matrices.
//
// Binary container, all integers and doubles little-endian:
//
//   bytes 0-3   magic "RSMT"
//   u32         container version (1)
//   u32         format tag: 1 = HODLR, 2 = HBS, 3 = HBS-ID
//   u64         N
//   u64         leaf size m
//   u32         built levels
//   u32         flags (bit 0: leaf diagonals present)
//   u64         node count
//   fields, in the fixed per-format order of visit_fields()
//
// A matrix field is u64 rows, u64 cols, then rows*cols column-major doubles.
// A real vector is u64 length then doubles; an index vector is u64 length
// then i64 values. The tree itself is rebuilt from (N, m).
//
// The sidecar variant writes the same header fields and a field table as
// JSON next to a raw blob holding the payloads back to back.
//

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "rsmat/hbs.hpp"
#include "rsmat/hodlr.hpp"

namespace rsmat {

enum class FormatTag : std::uint32_t { hodlr = 1, hbs = 2, hbsid = 3 };

using CompressedMatrix = std::variant<HodlrMatrix, HbsMatrix, HbsIdMatrix>;

inline constexpr std::uint32_t kContainerVersion = 1;

// Malformed, truncated or inconsistent container.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FormatTag format_of(const CompressedMatrix& m);
const char* format_name(FormatTag tag);
// "hodlr", "hbs", "hbsid"; throws std::invalid_argument otherwise.
FormatTag parse_format(const std::string& name);

std::string to_bytes(const CompressedMatrix& m);
CompressedMatrix from_bytes(const std::string& bytes);

// Writes through a temporary file and a rename.
void save_compressed(const std::string& path, const CompressedMatrix& m);
// Throws std::runtime_error if the file cannot be read, FormatError if it
// does not parse.
CompressedMatrix load_compressed(const std::string& path);

void save_sidecar(const std::string& json_path, const std::string& blob_path, const CompressedMatrix& m);
CompressedMatrix load_sidecar(const std::string& json_path, const std::string& blob_path);

// Shape consistency of every stored block with the tree; throws FormatError
// naming the first offending field.
void check_shapes(const CompressedMatrix& m);
void check_shapes(const HodlrMatrix& h);
void check_shapes(const HbsMatrix& h);
void check_shapes(const HbsIdMatrix& h);

Index compressed_size(const CompressedMatrix& m);
Index compressed_max_rank(const CompressedMatrix& m);
std::int64_t compressed_storage_bytes(const CompressedMatrix& m);
int compressed_depth(const CompressedMatrix& m);
DenseMatrix compressed_apply(const CompressedMatrix& m, const DenseMatrix& x, bool adjoint = false,
                             Exec exec = Exec::parallel);
DenseMatrix compressed_apply_truncated(const CompressedMatrix& m, int level, const DenseMatrix& x,
                                       bool adjoint = false, Exec exec = Exec::parallel);

}  // namespace rsmat
