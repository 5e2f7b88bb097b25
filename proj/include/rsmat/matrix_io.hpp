#pragma once
//
// Dense matrix files.
//
// Binary: u64 rows, u64 cols (little-endian), then rows*cols little-endian
// doubles in column-major order. Nothing else; file size is exactly
// 16 + 8*rows*cols bytes.
//
// Text (paths ending in ".txt"): first non-comment line "rows cols", then one
// line per matrix row with whitespace-separated values. Lines starting with
// '#' are ignored. Values are written with %.17g so they round-trip exactly.
//

#include <string>

#include "rsmat/dense.hpp"

namespace rsmat {

bool is_text_path(const std::string& path);

// Throws std::runtime_error on I/O failure or malformed content.
DenseMatrix read_dense(const std::string& path);
void write_dense(const std::string& path, const DenseMatrix& m);

std::string dense_to_bytes(const DenseMatrix& m);
DenseMatrix dense_from_bytes(const std::string& bytes);
std::string dense_to_text(const DenseMatrix& m);
DenseMatrix dense_from_text(const std::string& text);

// Writes `path.tmp.<pid>` and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace rsmat
