// Times the serial reference path against the OpenMP kernels on the same
// inputs and checks that both produce bit-identical containers and products.
//
//   bench_serial_parallel [--quick]
//
// Thread count comes from RSMAT_NUM_THREADS or the OpenMP default.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "rsmat/bench.hpp"
#include "rsmat/compressed_oracle.hpp"
#include "rsmat/parallel.hpp"
#include "rsmat/rng.hpp"
#include "rsmat/serialize.hpp"

using namespace rsmat;

namespace {

template <class Fn>
double median_seconds(int reps, Fn&& fn) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int threads = configure_threads();
  const std::vector<Index> sizes = quick ? std::vector<Index>{512} : std::vector<Index>{1024, 2048, 4096};
  const int reps = quick ? 1 : 3;

  std::printf("threads %d\n", threads);
  std::printf("%-16s %-6s %6s %12s %12s %8s %12s %12s %s\n", "kernel", "format", "N", "compress_ser", "compress_par",
              "speedup", "apply_ser", "apply_par", "identical");
  bool all_identical = true;
  for (const char* kernel : {"logcurve", "bie-doublelayer"}) {
    for (Index n : sizes) {
      BenchConfig c;
      c.kernel = kernel;
      c.leaf_size = 64;
      const BenchOperator op = make_operator(c, n);
      const IndexTree tree(n, c.leaf_size);
      const DenseMatrix x = gaussian_block(n, 16, 5);
      for (FormatTag f : {FormatTag::hodlr, FormatTag::hbs, FormatTag::hbsid}) {
        CompressOptions co;
        co.format = f;
        co.samples = c.samples;
        co.eps = c.eps;
        CompressedMatrix ser, par;
        co.exec = Exec::serial;
        const double cs = median_seconds(reps, [&] { ser = compress(*op.black_box, tree, co); });
        co.exec = Exec::parallel;
        const double cp = median_seconds(reps, [&] { par = compress(*op.black_box, tree, co); });
        DenseMatrix ys, yp;
        const double as = median_seconds(reps, [&] { ys = compressed_apply(ser, x, false, Exec::serial); });
        const double ap = median_seconds(reps, [&] { yp = compressed_apply(par, x, false, Exec::parallel); });
        const bool same = to_bytes(ser) == to_bytes(par) && ys == yp;
        all_identical = all_identical && same;
        std::printf("%-16s %-6s %6lld %12.4f %12.4f %8.2f %12.5f %12.5f %s\n", kernel, format_name(f),
                    static_cast<long long>(n), cs, cp, cs / cp, as, ap, same ? "yes" : "NO");
        std::fflush(stdout);
      }
    }
  }
  return all_identical ? 0 : 1;
}
