// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only=1,5,...] [--expect-fail=3,...]
//
// Exit status is 0 when the set of failing criteria equals the expected set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rsmat/bench.hpp"
#include "rsmat/compressed_oracle.hpp"
#include "rsmat/hbs.hpp"
#include "rsmat/hodlr.hpp"
#include "rsmat/linalg.hpp"
#include "rsmat/operators.hpp"
#include "rsmat/rng.hpp"
#include "rsmat/serialize.hpp"
#include "rsmat/validate.hpp"

using namespace rsmat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

// HBS-ID instances collected by criteria 1 and 2 for the structural checks,
// with the dense matrix when the instance is planted.
struct IdInstance {
  std::shared_ptr<const HbsIdMatrix> m;
  std::shared_ptr<const DenseMatrix> planted;
};
std::vector<IdInstance> g_id_instances;

struct SweepRow {
  std::string kernel, format;
  Index n = 0, k = 0;
  double e = 0.0;
};
std::vector<SweepRow> g_sweep;

Outcome planted_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  int trials = 0, failures = 0;
  double worst[3] = {0.0, 0.0, 0.0};
  for (Index n : {256, 512, 1024}) {
    const IndexTree tree(n, 32);
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      const std::uint64_t seed = 1000 * static_cast<std::uint64_t>(n) + trial;
      HodlrOptions ho;
      ho.samples = 15;
      ho.eps = 1e-12;
      ho.seed = seed + 7;
      HbsOptions bo;
      bo.rank = 15;
      bo.seed = seed + 7;

      const auto hodlr_in = std::make_shared<const DenseMatrix>(planted_hodlr_matrix(tree, 5, seed));
      const auto hbs_in = std::make_shared<const DenseMatrix>(planted_hbs_matrix(tree, 5, seed));
      const DenseOracle a_hodlr(*hodlr_in), a_hbs(*hbs_in);

      const auto h1 = std::make_shared<const HodlrMatrix>(hodlr_compress(a_hodlr, tree, ho));
      const auto h2 = std::make_shared<const HodlrMatrix>(hodlr_compress(a_hbs, tree, ho));
      const auto b = std::make_shared<const HbsMatrix>(hbs_compress(a_hbs, tree, bo));
      const auto id = std::make_shared<const HbsIdMatrix>(hbs_to_hbsid(*b, 1e-12));
      const double e[4] = {estimate_error(a_hodlr, *compressed_oracle(h1), 10, seed),
                           estimate_error(a_hbs, *compressed_oracle(h2), 10, seed),
                           estimate_error(a_hbs, *compressed_oracle(b), 10, seed),
                           estimate_error(a_hbs, *compressed_oracle(id), 10, seed)};
      worst[0] = std::max({worst[0], e[0], e[1]});
      worst[1] = std::max(worst[1], e[2]);
      worst[2] = std::max(worst[2], e[3]);
      for (double v : e) failures += !(v <= 1e-10);
      ++trials;
      g_id_instances.push_back({id, hbs_in});
    }
  }
  const double t = seconds_since(t0);
  o.pass = failures == 0 && t < 120.0;
  o.detail = fmt("%d trials x 4 compressions, %d failures; worst E hodlr %.1e hbs %.1e hbsid %.1e; %.1f s (limit 120)",
                 trials, failures, worst[0], worst[1], worst[2], t);
  return o;
}

Outcome smooth_tolerance() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::string rows;
  for (const char* kernel : {"logcurve", "bie-doublelayer"}) {
    for (Index n : {400, 800, 1600, 3200}) {
      BenchConfig c;
      c.kernel = kernel;
      c.leaf_size = 100;
      c.samples = 45;
      c.eps = 1e-9;
      const BenchOperator op = make_operator(c, n);
      const IndexTree tree(n, c.leaf_size);
      for (FormatTag f : {FormatTag::hodlr, FormatTag::hbsid}) {
        CompressOptions co;
        co.format = f;
        co.samples = c.samples;
        co.eps = c.eps;
        co.seed = c.seed;
        const auto m = std::make_shared<const CompressedMatrix>(compress(*op.black_box, tree, co));
        const double e = estimate_error(*op.reference, *compressed_oracle(m), 10, c.seed);
        const Index k = compressed_max_rank(*m);
        g_sweep.push_back({kernel, format_name(f), n, k, e});
        if (f == FormatTag::hbsid)
          g_id_instances.push_back({std::make_shared<const HbsIdMatrix>(std::get<HbsIdMatrix>(*m)), nullptr});
        if (!(e <= 1e-7)) o.pass = false;
        rows += fmt("\n    %-16s %-6s N=%-5lld E=%.2e k=%lld", kernel, format_name(f), static_cast<long long>(n), e,
                    static_cast<long long>(k));
      }
    }
  }
  const double t = seconds_since(t0);
  if (t >= 300.0) o.pass = false;
  o.detail = fmt("E <= 1e-7 on every row; %.1f s (limit 300)", t) + rows;
  return o;
}

Outcome rank_plateau() {
  Outcome o;
  if (g_sweep.empty()) smooth_tolerance();
  std::map<std::pair<std::string, std::string>, std::pair<SweepRow, SweepRow>> ends;
  for (const SweepRow& r : g_sweep) {
    auto key = std::make_pair(r.kernel, r.format);
    auto it = ends.find(key);
    if (it == ends.end()) {
      ends.emplace(key, std::make_pair(r, r));
    } else {
      if (r.n < it->second.first.n) it->second.first = r;
      if (r.n > it->second.second.n) it->second.second = r;
    }
  }
  for (const auto& [key, pair] : ends) {
    const Index d = std::abs(pair.second.k - pair.first.k);
    if (d > 5) o.pass = false;
    o.detail += fmt("\n    %-16s %-6s k(N=%lld)=%lld k(N=%lld)=%lld change %lld %s", key.first.c_str(), key.second.c_str(),
                    static_cast<long long>(pair.first.n), static_cast<long long>(pair.first.k),
                    static_cast<long long>(pair.second.n), static_cast<long long>(pair.second.k),
                    static_cast<long long>(d), d > 5 ? "(> 5)" : "");
  }
  o.detail = "max rank change <= 5 per kernel and format" + o.detail;
  return o;
}

Outcome storage_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::vector<double> hodlr, hbsid;
  std::string rows;
  for (Index n : {512, 1024, 2048, 4096, 8192}) {
    BenchConfig c;
    c.kernel = "logcurve";
    c.leaf_size = 64;
    const BenchOperator op = make_operator(c, n);
    const IndexTree tree(n, c.leaf_size);
    for (FormatTag f : {FormatTag::hodlr, FormatTag::hbsid}) {
      CompressOptions co;
      co.format = f;
      co.samples = c.samples;
      co.eps = c.eps;
      const CompressedMatrix m = compress(*op.black_box, tree, co);
      const double per_dof = static_cast<double>(compressed_storage_bytes(m)) / (8.0 * static_cast<double>(n));
      (f == FormatTag::hodlr ? hodlr : hbsid).push_back(per_dof);
    }
    rows += fmt("\n    N=%-5lld hodlr M/N=%.1f hbsid M/N=%.1f", static_cast<long long>(n), hodlr.back(), hbsid.back());
  }
  for (std::size_t i = 1; i < hodlr.size(); ++i)
    if (!(hodlr[i] > hodlr[i - 1])) o.pass = false;
  const double lo = *std::min_element(hbsid.begin(), hbsid.end());
  const double hi = *std::max_element(hbsid.begin(), hbsid.end());
  const double spread = hi / lo - 1.0;
  if (!(spread <= 0.25)) o.pass = false;
  const double t = seconds_since(t0);
  if (t >= 600.0) o.pass = false;
  o.detail = fmt("hodlr M/N strictly rising; hbsid max/min - 1 = %.3f (limit 0.25); %.1f s (limit 600)", spread, t) + rows;
  return o;
}

Outcome matvec_accounting() {
  Outcome o;
  RandomStream rng(55);
  int mismatches = 0;
  for (int i = 0; i < 20; ++i) {
    const Index n = 64 + static_cast<Index>(rng.next_u64() % 700);
    const Index m = 8 + static_cast<Index>(rng.next_u64() % 60);
    const Index l = 2 + static_cast<Index>(rng.next_u64() % 20);
    const IndexTree tree(n, m);
    const auto inner = dense_oracle(gaussian_block(n, n, static_cast<std::uint64_t>(i)));
    const Index closed_apply = static_cast<Index>(tree.depth()) * 2 * l + tree.max_leaf_size();
    const Index closed_adjoint = static_cast<Index>(tree.depth()) * 2 * l;

    CountingOracle c1(inner);
    HodlrOptions ho;
    ho.samples = l;
    ho.eps = 1e-12;
    ho.seed = static_cast<std::uint64_t>(i);
    hodlr_compress(c1, tree, ho);
    const bool ok1 = c1.matvec_count() == closed_apply && c1.adjoint_count() == closed_adjoint &&
                     hodlr_apply_count(tree, l) == closed_apply && hodlr_adjoint_count(tree, l) == closed_adjoint;

    CountingOracle c2(inner);
    HbsOptions bo;
    bo.rank = l;
    bo.seed = static_cast<std::uint64_t>(i);
    hbs_compress(c2, tree, bo);
    const bool ok2 = c2.matvec_count() == hbs_apply_count(tree, l) && c2.adjoint_count() == hbs_adjoint_count(tree, l);
    if (!ok1 || !ok2) {
      ++mismatches;
      o.detail += fmt("\n    mismatch N=%lld m=%lld l=%lld: hodlr %lld/%lld vs %lld/%lld, hbs %lld/%lld vs %lld/%lld",
                      static_cast<long long>(n), static_cast<long long>(m), static_cast<long long>(l),
                      static_cast<long long>(c1.matvec_count()), static_cast<long long>(c1.adjoint_count()),
                      static_cast<long long>(closed_apply), static_cast<long long>(closed_adjoint),
                      static_cast<long long>(c2.matvec_count()), static_cast<long long>(c2.adjoint_count()),
                      static_cast<long long>(hbs_apply_count(tree, l)), static_cast<long long>(hbs_adjoint_count(tree, l)));
    }
  }
  o.pass = mismatches == 0;
  o.detail = fmt("20 random (N, m, l): %d mismatches against L*2l + max_leaf and L*2l", mismatches) + o.detail;
  return o;
}

Outcome range_finder() {
  Outcome o;
  for (Index k : {1, 5, 20}) {
    int passed = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
      const std::uint64_t seed = 100000 * static_cast<std::uint64_t>(k) + 3 * trial;
      const DenseMatrix a = matmul(gaussian_block(200, k, seed), gaussian_block(k, 200, seed + 1));
      const DenseMatrix q = randomized_range([&](const DenseMatrix& x) { return matmul(a, x); }, 200, k, 10, seed + 2);
      const DenseMatrix res = subtract(a, matmul(q, matmul(q, a, Op::trans, Op::none)));
      const double s1 = svd(a, FixedRank{1}).s[0];
      passed += norm_2(res) <= 1e-11 * s1;
    }
    if (passed < 999) o.pass = false;
    o.detail += fmt("%sk=%lld: %d/1000", o.detail.empty() ? "" : ", ", static_cast<long long>(k), passed);
  }
  o.detail = "residual <= 1e-11 sigma_1 in >= 999/1000; " + o.detail;
  return o;
}

Outcome hbsid_invariants() {
  Outcome o;
  if (g_id_instances.empty()) {
    planted_equivalence();
    smooth_tolerance();
  }
  int unnested = 0, inexact = 0, planted = 0, coupling_fail = 0;
  double worst = 0.0;
  for (const IdInstance& inst : g_id_instances) {
    unnested += !skeletons_nested(*inst.m);
    inexact += !identity_rows_exact(*inst.m);
    if (inst.planted) {
      ++planted;
      const double e = skeleton_coupling_error(*inst.m, *inst.planted);
      worst = std::max(worst, e);
      coupling_fail += !(e <= 1e-8);
    }
  }
  o.pass = unnested == 0 && inexact == 0 && coupling_fail == 0 && !g_id_instances.empty();
  o.detail = fmt("%zu instances: %d not nested, %d inexact identity rows; %d planted, max |B_skel - A| = %.1e (limit 1e-8)",
                 g_id_instances.size(), unnested, inexact, planted, worst);
  return o;
}

Outcome operator_product() {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig c;
  c.kernel = "product";
  c.leaf_size = 64;
  c.samples = 60;
  c.eps = 1e-9;
  const Index n = 1024;
  const BenchOperator op = make_operator(c, n);
  CompressOptions co;
  co.format = FormatTag::hbsid;
  co.samples = c.samples;
  co.eps = c.eps;
  const auto m = std::make_shared<const CompressedMatrix>(compress(*op.black_box, IndexTree(n, c.leaf_size), co));
  const double e = estimate_error(*op.reference, *compressed_oracle(m), 10, 3);
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = e <= 1e-6 && t < 180.0;
  o.detail = fmt("N=1024 hbsid of a product of hodlr factors: E=%.2e (limit 1e-6), k=%lld; %.1f s (limit 180)", e,
                 static_cast<long long>(compressed_max_rank(*m)), t);
  return o;
}

Outcome frontal() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::string rows;
  for (Index n : {400, 800}) {
    BenchConfig c;
    c.kernel = "frontal";
    c.frontal_width = 41;
    c.leaf_size = 50;
    c.samples = 40;
    c.eps = 1e-9;
    const BenchOperator op = make_operator(c, n);
    CompressOptions co;
    co.format = FormatTag::hbsid;
    co.samples = c.samples;
    co.eps = c.eps;
    const auto m = std::make_shared<const CompressedMatrix>(compress(*op.black_box, IndexTree(n, c.leaf_size), co));
    const double e = estimate_error(*op.reference, *compressed_oracle(m), 10, 4);
    const Index k = compressed_max_rank(*m);
    if (!(e <= 1e-8) || k > 25) o.pass = false;
    rows += fmt("\n    N=%-4lld E=%.2e k=%lld", static_cast<long long>(n), e, static_cast<long long>(k));
  }
  const double t = seconds_since(t0);
  if (t >= 300.0) o.pass = false;
  o.detail = fmt("width 41: E <= 1e-8 and k <= 25; %.1f s (limit 300)", t) + rows;
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("rsmat_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const IndexTree tree(1024, 64);
  const auto a = dense_oracle(single_layer_matrix(star_curve(), 1024));
  const DenseMatrix x = gaussian_block(1024, 4, 77);
  int identical = 0, exact = 0, total = 0;
  for (FormatTag f : {FormatTag::hodlr, FormatTag::hbs, FormatTag::hbsid}) {
    CompressOptions co;
    co.format = f;
    co.seed = 12345;
    const std::string p1 = (dir / "a.rsm").string(), p2 = (dir / "b.rsm").string();
    const CompressedMatrix m1 = compress(*a, tree, co);
    save_compressed(p1, m1);
    save_compressed(p2, compress(*a, tree, co));
    identical += slurp(p1) == slurp(p2) && !slurp(p1).empty();
    const CompressedMatrix back = load_compressed(p1);
    exact += compressed_apply(back, x) == compressed_apply(m1, x) &&
             compressed_apply(back, x, true) == compressed_apply(m1, x, true);
    ++total;
  }
  fs::remove_all(dir);
  o.pass = identical == total && exact == total;
  o.detail = fmt("%d/%d formats give bit-identical files, %d/%d apply bit-exactly after reload", identical, total, exact, total);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads();
  std::set<int> only, expected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--only=", 0) == 0) {
      only = parse_list(arg.substr(7));
    } else if (arg.rfind("--expect-fail=", 0) == 0) {
      expected = parse_list(arg.substr(14));
    } else {
      std::fprintf(stderr, "usage: %s [--only=1,2,...] [--expect-fail=3,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"planted-structure oracle equivalence", planted_equivalence},
      {"tolerance adherence on smooth kernels", smooth_tolerance},
      {"rank plateau", rank_plateau},
      {"storage scaling separation", storage_scaling},
      {"matvec accounting", matvec_accounting},
      {"randomized range-finder reliability", range_finder},
      {"HBS-ID structural invariants", hbsid_invariants},
      {"operator-product experiment", operator_product},
      {"frontal-matrix experiment", frontal},
      {"determinism and serialization", determinism},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    const bool known = !o.pass && expected.count(id);
    std::printf("criterion %2d %s  %s%s\n    %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                known ? " (known failure)" : "", o.detail.c_str());
    std::fflush(stdout);
  }

  std::set<int> expected_run;
  for (int id : expected)
    if (only.empty() || only.count(id)) expected_run.insert(id);
  std::printf("%zu failing, %zu expected to fail\n", failed.size(), expected_run.size());
  return failed == expected_run ? 0 : 1;
}
