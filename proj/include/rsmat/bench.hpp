#pragma once
//
// Benchmark harness: operator construction by name, compression in any
// format, randomized error estimate, and CSV reports.
//
// Config files are either JSON (first non-blank character '{') or lines of
// `key = value` with '#' comments. Keys:
//
//   kernel        planted-hodlr | planted-hbs | logcurve | bie-doublelayer | frontal | product
//   format        hodlr | hbs | hbsid
//   sizes         list of N, e.g. "400, 800, 1600"
//   leaf_size     m
//   samples       sample width (HODLR) or fixed rank r (HBS); alias "rank"
//   eps           tolerance
//   relative      true | false: HODLR truncation relative to sigma_1
//   seed          64-bit seed
//   planted_rank  rank of the planted kernels
//   frontal_width grid width of the frontal kernel (odd)
//   repetitions   timing repetitions (median reported)
//   error_trials  probes for the error estimate
//   exec          serial | parallel
//   output        CSV path
//

#include <cstdint>
#include <string>
#include <vector>

#include "rsmat/oracle.hpp"
#include "rsmat/serialize.hpp"

namespace rsmat {

struct BenchConfig {
  std::string kernel = "logcurve";
  std::string format = "hbsid";
  std::vector<Index> sizes{400, 800, 1600, 3200};
  Index leaf_size = 64;
  Index samples = 45;
  double eps = 1e-9;
  bool relative = false;
  std::uint64_t seed = 1;
  Index planted_rank = 5;
  Index frontal_width = 41;
  int repetitions = 3;
  int error_trials = 10;
  Exec exec = Exec::parallel;
  std::string output;
};

// Throws std::invalid_argument on unknown keys, bad values or unknown
// kernel / format names.
BenchConfig parse_config(const std::string& text);
BenchConfig load_config(const std::string& path);
void check_config(const BenchConfig& c);

struct CompressionReport {
  Index n = 0;
  Index n_matvec_apply = 0;
  Index n_matvec_adjoint = 0;
  double t_compress_seconds = 0.0;
  double t_net_seconds = 0.0;
  double t_apply_seconds = 0.0;
  std::int64_t storage_bytes = 0;
  double storage_per_dof = 0.0;
  double error_e = 0.0;
  Index max_rank_k = 0;
  std::string format;
  std::uint64_t seed = 0;
  double eps = 0.0;
  Index sample_width = 0;

  friend bool operator==(const CompressionReport&, const CompressionReport&) = default;
};

// max over `trials` random unit vectors w of |A w - C w| / |A w|. Probes with
// A w = 0 are skipped; throws std::runtime_error if every probe is skipped.
double estimate_error(const LinearOracle& reference, const LinearOracle& compressed, int trials = 10,
                      std::uint64_t seed = 0);

// The operator handed to the compressor and the one errors are measured
// against. They differ only for the product kernel, whose black box is a
// product of compressed factors while the reference is the exact product.
struct BenchOperator {
  OraclePtr black_box;
  OraclePtr reference;
};
BenchOperator make_operator(const BenchConfig& c, Index n);

struct CompressOptions {
  FormatTag format = FormatTag::hbsid;
  Index samples = 45;
  double eps = 1e-9;
  bool relative = false;
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;
};

CompressedMatrix compress(const LinearOracle& op, const IndexTree& tree, const CompressOptions& opts);

std::vector<CompressionReport> run_benchmark(const BenchConfig& c);

std::string reports_to_csv(const std::vector<CompressionReport>& reports);
std::vector<CompressionReport> reports_from_csv(const std::string& csv);

}  // namespace rsmat
