// rsmat: compress, apply, inspect and validate rank-structured matrices.
//
// Exit codes: 0 success, 1 validation failure (including a container that
// does not parse), 2 usage error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rsmat/bench.hpp"
#include "rsmat/compressed_oracle.hpp"
#include "rsmat/matrix_io.hpp"
#include "rsmat/parallel.hpp"
#include "rsmat/serialize.hpp"
#include "rsmat/validate.hpp"

using namespace rsmat;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kIo = 3 };

// Bad flags or inconsistent inputs; mapped to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CompressArgs {
  std::string input;
  std::string kernel;
  Index n = 0;
  std::string config;
  std::string format = "hbsid";
  double eps = 1e-9;
  Index rank = 45;
  Index leaf_size = 64;
  std::uint64_t seed = 1;
  bool relative = false;
  Index frontal_width = 41;
  std::string out;
};

struct ApplyArgs {
  std::string matrix;
  std::string input;
  bool adjoint = false;
  std::optional<int> level;
  std::string out;
};

struct BenchArgs {
  std::string config;
  std::string out;
};

void print_summary(const CompressedMatrix& m) {
  const Index n = compressed_size(m);
  const auto bytes = compressed_storage_bytes(m);
  std::printf("format        %s\n", format_name(format_of(m)));
  std::printf("N             %lld\n", static_cast<long long>(n));
  std::printf("leaf size     %lld\n", static_cast<long long>(std::visit([](const auto& h) { return h.tree.leaf_size(); }, m)));
  std::printf("levels        %d\n", compressed_depth(m));
  std::printf("max rank k    %lld\n", static_cast<long long>(compressed_max_rank(m)));
  std::printf("storage M     %lld bytes (%.2f scalars per DOF)\n", static_cast<long long>(bytes),
              static_cast<double>(bytes) / (8.0 * static_cast<double>(n)));
}

int run_compress(const CompressArgs& a) {
  if (a.input.empty() == a.kernel.empty()) throw UsageError("compress needs exactly one of --input or --kernel");
  if (!(a.eps > 0.0)) throw UsageError("--eps must be positive");
  if (a.rank < 1) throw UsageError("--rank must be positive");
  if (a.leaf_size < 1) throw UsageError("--leaf-size must be positive");
  CompressOptions opts;
  try {
    opts.format = parse_format(a.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  opts.samples = a.rank;
  opts.eps = a.eps;
  opts.relative = a.relative;
  opts.seed = a.seed;

  OraclePtr black_box, reference;
  if (!a.input.empty()) {
    DenseMatrix m = read_dense(a.input);
    if (m.rows() != m.cols() || m.rows() == 0) throw UsageError("input matrix must be square and nonempty");
    black_box = reference = dense_oracle(std::move(m));
  } else {
    BenchConfig c = a.config.empty() ? BenchConfig{} : load_config(a.config);
    c.kernel = a.kernel;
    c.format = a.format;
    c.leaf_size = a.leaf_size;
    c.samples = a.rank;
    c.eps = a.eps;
    c.relative = a.relative;
    c.seed = a.seed;
    c.frontal_width = a.frontal_width;
    if (a.n < 1) throw UsageError("--kernel needs --n");
    c.sizes = {a.n};
    check_config(c);
    const BenchOperator op = make_operator(c, a.n);
    black_box = op.black_box;
    reference = op.reference;
  }

  const IndexTree tree(black_box->dim(), a.leaf_size);
  auto result = std::make_shared<const CompressedMatrix>(compress(*black_box, tree, opts));
  save_compressed(a.out, *result);
  print_summary(*result);
  std::printf("probe error E %.3e\n", estimate_error(*reference, *compressed_oracle(result), 10, a.seed));
  std::printf("wrote         %s\n", a.out.c_str());
  return kOk;
}

int run_apply(const ApplyArgs& a) {
  const CompressedMatrix m = load_compressed(a.matrix);
  const DenseMatrix x = read_dense(a.input);
  if (x.rows() != compressed_size(m))
    throw UsageError("input has " + std::to_string(x.rows()) + " rows, matrix is " + std::to_string(compressed_size(m)));
  DenseMatrix y;
  if (a.level) {
    if (*a.level < 0 || *a.level > compressed_depth(m))
      throw UsageError("--level must lie in [0, " + std::to_string(compressed_depth(m)) + "]");
    y = compressed_apply_truncated(m, *a.level, x, a.adjoint);
  } else {
    y = compressed_apply(m, x, a.adjoint);
  }
  write_dense(a.out, y);
  return kOk;
}

int run_info(const std::string& path) {
  print_summary(load_compressed(path));
  return kOk;
}

int run_validate(const std::string& path) {
  const ValidationReport r = validate(load_compressed(path));
  for (const auto& c : r.checks)
    std::printf("%-36s %s  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.detail.c_str());
  std::printf("%s\n", r.passed() ? "all invariants hold" : "validation FAILED");
  return r.passed() ? kOk : kInvalid;
}

int run_bench(const BenchArgs& a) {
  BenchConfig c = load_config(a.config);
  if (!a.out.empty()) c.output = a.out;
  const std::string csv = reports_to_csv(run_benchmark(c));
  if (c.output.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file_atomic(c.output, csv);
    std::fputs(csv.c_str(), stdout);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads();
  CLI::App app{"Black-box compression of rank-structured matrices"};
  app.require_subcommand(1);

  CompressArgs ca;
  auto* compress_cmd = app.add_subcommand("compress", "Compress a dense matrix file or a built-in operator");
  compress_cmd->add_option("--input", ca.input, "Dense matrix file (binary, or text if *.txt)");
  compress_cmd->add_option("--kernel", ca.kernel, "planted-hodlr | planted-hbs | logcurve | bie-doublelayer | frontal | product");
  compress_cmd->add_option("--n", ca.n, "Operator size for --kernel");
  compress_cmd->add_option("--config", ca.config, "Benchmark config supplying kernel defaults");
  compress_cmd->add_option("--format", ca.format, "hodlr | hbs | hbsid")->capture_default_str();
  compress_cmd->add_option("--eps", ca.eps, "Truncation tolerance")->capture_default_str();
  compress_cmd->add_option("--rank", ca.rank, "Sample width (HODLR) or sample rank (HBS)")->capture_default_str();
  compress_cmd->add_option("--leaf-size", ca.leaf_size, "Maximum leaf size")->capture_default_str();
  compress_cmd->add_option("--seed", ca.seed, "Random seed")->capture_default_str();
  compress_cmd->add_flag("--relative", ca.relative, "HODLR truncation relative to the largest singular value");
  compress_cmd->add_option("--frontal-width", ca.frontal_width, "Grid width of the frontal kernel")->capture_default_str();
  compress_cmd->add_option("--out", ca.out, "Output container")->required();

  ApplyArgs aa;
  auto* apply_cmd = app.add_subcommand("apply", "Apply a compressed matrix to the columns of a dense file");
  apply_cmd->add_option("matrix", aa.matrix, "Compressed container")->required();
  apply_cmd->add_option("--input", aa.input, "Dense right-hand sides")->required();
  apply_cmd->add_flag("--adjoint", aa.adjoint, "Apply the transpose");
  apply_cmd->add_option("--level", aa.level, "Apply only the sibling blocks on levels 1..level");
  apply_cmd->add_option("--out", aa.out, "Output dense file")->required();

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "Summarize a compressed container");
  info_cmd->add_option("matrix", info_path, "Compressed container")->required();

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Run the structural invariant checks");
  validate_cmd->add_option("matrix", validate_path, "Compressed container")->required();

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep and emit CSV");
  bench_cmd->add_option("--config", ba.config, "Benchmark config file")->required();
  bench_cmd->add_option("--out", ba.out, "CSV output path (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compress_cmd) return run_compress(ca);
    if (*apply_cmd) return run_apply(aa);
    if (*info_cmd) return run_info(info_path);
    if (*validate_cmd) return run_validate(validate_path);
    if (*bench_cmd) return run_bench(ba);
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  }
  return kUsage;
}
