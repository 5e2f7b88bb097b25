#include "rsmat/matrix_io.hpp"

#include <unistd.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsmat {

static_assert(std::endian::native == std::endian::little, "matrix files assume a little-endian host");

bool is_text_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0;
}

std::string dense_to_bytes(const DenseMatrix& m) {
  std::string out(16 + static_cast<std::size_t>(m.size()) * sizeof(double), '\0');
  const auto rows = static_cast<std::uint64_t>(m.rows()), cols = static_cast<std::uint64_t>(m.cols());
  std::memcpy(out.data(), &rows, 8);
  std::memcpy(out.data() + 8, &cols, 8);
  if (m.size() > 0) std::memcpy(out.data() + 16, m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  return out;
}

DenseMatrix dense_from_bytes(const std::string& bytes) {
  if (bytes.size() < 16) throw std::runtime_error("matrix file too short for its header");
  std::uint64_t rows = 0, cols = 0;
  std::memcpy(&rows, bytes.data(), 8);
  std::memcpy(&cols, bytes.data() + 8, 8);
  const std::uint64_t payload = bytes.size() - 16;
  if (payload % 8 != 0 || rows > (1ULL << 40) || cols > (1ULL << 40) ||
      (rows != 0 && cols > payload / 8 / rows) || rows * cols * 8 != payload)
    throw std::runtime_error("matrix file size does not match its header (" + std::to_string(rows) + " x " +
                             std::to_string(cols) + ")");
  std::vector<double> vals(static_cast<std::size_t>(rows * cols));
  if (!vals.empty()) std::memcpy(vals.data(), bytes.data() + 16, payload);
  return DenseMatrix(static_cast<Index>(rows), static_cast<Index>(cols), std::move(vals));
}

std::string dense_to_text(const DenseMatrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

DenseMatrix dense_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw std::runtime_error("matrix text is empty");
  Index rows = -1, cols = -1;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> rows >> cols) || (hs >> extra) || rows < 0 || cols < 0)
      throw std::runtime_error("matrix text header must be 'rows cols'");
  }
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!next_line()) throw std::runtime_error("matrix text ends after " + std::to_string(i) + " rows");
    std::istringstream rs(line);
    for (Index j = 0; j < cols; ++j)
      if (!(rs >> m(i, j))) throw std::runtime_error("matrix text row " + std::to_string(i) + " is short");
    std::string extra;
    if (rs >> extra) throw std::runtime_error("matrix text row " + std::to_string(i) + " has extra values");
  }
  if (next_line()) throw std::runtime_error("matrix text has more rows than its header says");
  return m;
}

DenseMatrix read_dense(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return is_text_path(path) ? dense_from_text(ss.str()) : dense_from_bytes(ss.str());
}

void write_dense(const std::string& path, const DenseMatrix& m) {
  write_file_atomic(path, is_text_path(path) ? dense_to_text(m) : dense_to_bytes(m));
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed for " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

}  // namespace rsmat
