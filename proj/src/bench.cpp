#include "rsmat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rsmat/compressed_oracle.hpp"
#include "rsmat/operators.hpp"
#include "rsmat/rng.hpp"

namespace rsmat {

namespace {

const std::vector<std::string> kKernels{"planted-hodlr", "planted-hbs", "logcurve", "bie-doublelayer", "frontal", "product"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream ss(v);
  T out{};
  std::string extra;
  if (!(ss >> out) || (ss >> extra)) throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
  return out;
}

std::vector<Index> parse_sizes(const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream ss(s);
  std::vector<Index> out;
  std::string tok;
  while (ss >> tok) out.push_back(parse_number<Index>("sizes", tok));
  return out;
}

void set_key(BenchConfig& c, const std::string& key, const std::string& v) {
  if (key == "kernel") c.kernel = v;
  else if (key == "format") c.format = v;
  else if (key == "sizes" || key == "n") c.sizes = parse_sizes(v);
  else if (key == "leaf_size") c.leaf_size = parse_number<Index>(key, v);
  else if (key == "samples" || key == "rank") c.samples = parse_number<Index>(key, v);
  else if (key == "eps") c.eps = parse_number<double>(key, v);
  else if (key == "relative") c.relative = parse_bool(v);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "planted_rank") c.planted_rank = parse_number<Index>(key, v);
  else if (key == "frontal_width") c.frontal_width = parse_number<Index>(key, v);
  else if (key == "repetitions") c.repetitions = parse_number<int>(key, v);
  else if (key == "error_trials") c.error_trials = parse_number<int>(key, v);
  else if (key == "exec") {
    if (v != "serial" && v != "parallel") throw std::invalid_argument("exec must be serial or parallel");
    c.exec = v == "serial" ? Exec::serial : Exec::parallel;
  } else if (key == "output") c.output = v;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += json_scalar(e) + " ";
    return out;
  }
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
    return buf;
  }
  throw std::invalid_argument("unsupported JSON value in config");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* kCsvHeader =
    "n,n_matvec_apply,n_matvec_adjoint,t_compress_seconds,t_net_seconds,t_apply_seconds,storage_bytes,"
    "storage_per_dof,error_e,max_rank_k,format,seed,eps,sample_width";

}  // namespace

void check_config(const BenchConfig& c) {
  if (std::find(kKernels.begin(), kKernels.end(), c.kernel) == kKernels.end())
    throw std::invalid_argument("unknown kernel '" + c.kernel + "'");
  parse_format(c.format);
  if (c.sizes.empty()) throw std::invalid_argument("config needs at least one size");
  for (Index n : c.sizes)
    if (n < 1) throw std::invalid_argument("sizes must be positive");
  if (c.leaf_size < 1) throw std::invalid_argument("leaf_size must be positive");
  if (c.samples < 1) throw std::invalid_argument("samples must be positive");
  if (!(c.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (c.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  if (c.error_trials < 1) throw std::invalid_argument("error_trials must be positive");
  if (c.planted_rank < 0) throw std::invalid_argument("planted_rank must be nonnegative");
}

BenchConfig parse_config(const std::string& text) {
  BenchConfig c;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) set_key(c, it.key(), trim(json_scalar(it.value())));
  } else {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
      set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  check_config(c);
  return c;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

double estimate_error(const LinearOracle& reference, const LinearOracle& compressed, int trials, std::uint64_t seed) {
  if (reference.dim() != compressed.dim()) throw std::invalid_argument("estimate_error: dimension mismatch");
  if (trials < 1) throw std::invalid_argument("estimate_error: need at least one probe");
  const Index n = reference.dim();
  RandomStream rng = RandomStream(seed).derive({0x65727272ULL});
  DenseMatrix w = gaussian_block(n, trials, rng);
  for (Index j = 0; j < trials; ++j) {
    const double s = norm_fro(w.col_range(j, 1));
    for (Index i = 0; i < n; ++i) w(i, j) /= s;
  }
  const DenseMatrix aw = reference.apply(w);
  const DenseMatrix cw = compressed.apply(w);
  double worst = 0.0;
  int used = 0;
  for (Index j = 0; j < trials; ++j) {
    const double denom = norm_fro(aw.col_range(j, 1));
    if (denom == 0.0) continue;
    ++used;
    const double e = norm_fro(subtract(aw.col_range(j, 1), cw.col_range(j, 1))) / denom;
    if (!(e <= worst)) worst = e;
  }
  if (used == 0) throw std::runtime_error("estimate_error: reference vanished on every probe");
  return worst;
}

BenchOperator make_operator(const BenchConfig& c, Index n) {
  const IndexTree tree(n, c.leaf_size);
  if (c.kernel == "planted-hodlr") {
    auto op = dense_oracle(planted_hodlr_matrix(tree, c.planted_rank, c.seed));
    return {op, op};
  }
  if (c.kernel == "planted-hbs") {
    auto op = dense_oracle(planted_hbs_matrix(tree, c.planted_rank, c.seed));
    return {op, op};
  }
  if (c.kernel == "logcurve") {
    auto op = single_layer_oracle(star_curve(), n, c.exec);
    return {op, op};
  }
  if (c.kernel == "bie-doublelayer") {
    auto op = double_layer_oracle(star_curve(), n, c.exec);
    return {op, op};
  }
  if (c.kernel == "frontal") {
    auto op = schur_frontal_oracle(c.frontal_width, n, c.seed);
    return {op, op};
  }
  if (c.kernel == "product") {
    const DenseMatrix s = single_layer_matrix(star_curve(), n, c.exec);
    const DenseMatrix d = double_layer_matrix(star_curve(), n, c.exec);
    auto reference = dense_oracle(matmul(s, d));
    HodlrOptions ho;
    ho.samples = c.samples;
    ho.eps = c.eps;
    ho.relative = c.relative;
    ho.exec = c.exec;
    ho.seed = RandomStream(c.seed).derive({1}).key();
    auto hs = std::make_shared<const HodlrMatrix>(hodlr_compress(DenseOracle(s), tree, ho));
    ho.seed = RandomStream(c.seed).derive({2}).key();
    auto hd = std::make_shared<const HodlrMatrix>(hodlr_compress(DenseOracle(d), tree, ho));
    return {product_oracle(compressed_oracle(hs, c.exec), compressed_oracle(hd, c.exec)), reference};
  }
  throw std::invalid_argument("unknown kernel '" + c.kernel + "'");
}

CompressedMatrix compress(const LinearOracle& op, const IndexTree& tree, const CompressOptions& opts) {
  if (opts.format == FormatTag::hodlr) {
    HodlrOptions ho;
    ho.samples = opts.samples;
    ho.eps = opts.eps;
    ho.relative = opts.relative;
    ho.seed = opts.seed;
    ho.exec = opts.exec;
    return hodlr_compress(op, tree, ho);
  }
  HbsOptions hb;
  hb.rank = opts.samples;
  hb.seed = opts.seed;
  hb.exec = opts.exec;
  HbsMatrix h = hbs_compress(op, tree, hb);
  if (opts.format == FormatTag::hbs) return h;
  return hbs_to_hbsid(h, opts.eps, opts.exec);
}

std::vector<CompressionReport> run_benchmark(const BenchConfig& c) {
  check_config(c);
  CompressOptions opts;
  opts.format = parse_format(c.format);
  opts.samples = c.samples;
  opts.eps = c.eps;
  opts.relative = c.relative;
  opts.seed = c.seed;
  opts.exec = c.exec;

  std::vector<CompressionReport> out;
  for (Index n : c.sizes) {
    const IndexTree tree(n, c.leaf_size);
    const BenchOperator op = make_operator(c, n);
    auto counting = std::make_shared<CountingOracle>(op.black_box);

    std::vector<double> t_compress, t_net, t_apply;
    std::shared_ptr<const CompressedMatrix> result;
    CompressionReport r;
    for (int rep = 0; rep < c.repetitions; ++rep) {
      counting->reset();
      const auto t0 = std::chrono::steady_clock::now();
      auto m = std::make_shared<const CompressedMatrix>(compress(*counting, tree, opts));
      const double total = seconds_since(t0);
      t_compress.push_back(total);
      t_net.push_back(std::clamp(total - counting->oracle_seconds(), 0.0, total));
      r.n_matvec_apply = counting->matvec_count();
      r.n_matvec_adjoint = counting->adjoint_count();
      result = std::move(m);
    }
    RandomStream xs = RandomStream(c.seed).derive({3});
    const DenseMatrix x = gaussian_block(n, 1, xs);
    for (int rep = 0; rep < c.repetitions; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const DenseMatrix y = compressed_apply(*result, x, false, c.exec);
      t_apply.push_back(seconds_since(t0));
    }

    r.n = n;
    r.t_compress_seconds = median(t_compress);
    r.t_net_seconds = std::min(median(t_net), r.t_compress_seconds);
    r.t_apply_seconds = median(t_apply);
    r.storage_bytes = compressed_storage_bytes(*result);
    r.storage_per_dof = static_cast<double>(r.storage_bytes) / (8.0 * static_cast<double>(n));
    r.error_e = estimate_error(*op.reference, *compressed_oracle(result, c.exec), c.error_trials,
                               RandomStream(c.seed).derive({4}).key());
    r.max_rank_k = compressed_max_rank(*result);
    r.format = c.format;
    r.seed = c.seed;
    r.eps = c.eps;
    r.sample_width = c.samples;
    out.push_back(r);
  }
  return out;
}

std::string reports_to_csv(const std::vector<CompressionReport>& reports) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) {
    out += std::to_string(r.n) + "," + std::to_string(r.n_matvec_apply) + "," + std::to_string(r.n_matvec_adjoint) +
           "," + g17(r.t_compress_seconds) + "," + g17(r.t_net_seconds) + "," + g17(r.t_apply_seconds) + "," +
           std::to_string(r.storage_bytes) + "," + g17(r.storage_per_dof) + "," + g17(r.error_e) + "," +
           std::to_string(r.max_rank_k) + "," + r.format + "," + std::to_string(r.seed) + "," + g17(r.eps) + "," +
           std::to_string(r.sample_width) + "\n";
  }
  return out;
}

std::vector<CompressionReport> reports_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw std::invalid_argument("CSV header does not match");
  std::vector<CompressionReport> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(trim(line));
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected 14 fields");
    CompressionReport r;
    r.n = parse_number<Index>("n", f[0]);
    r.n_matvec_apply = parse_number<Index>("n_matvec_apply", f[1]);
    r.n_matvec_adjoint = parse_number<Index>("n_matvec_adjoint", f[2]);
    r.t_compress_seconds = std::stod(f[3]);
    r.t_net_seconds = std::stod(f[4]);
    r.t_apply_seconds = std::stod(f[5]);
    r.storage_bytes = parse_number<std::int64_t>("storage_bytes", f[6]);
    r.storage_per_dof = std::stod(f[7]);
    r.error_e = std::stod(f[8]);
    r.max_rank_k = parse_number<Index>("max_rank_k", f[9]);
    r.format = f[10];
    r.seed = parse_number<std::uint64_t>("seed", f[11]);
    r.eps = std::stod(f[12]);
    r.sample_width = parse_number<Index>("sample_width", f[13]);
    out.push_back(r);
  }
  return out;
}

}  // namespace rsmat
