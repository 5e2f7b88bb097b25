#pragma once
//
// Execution policy shared by the data-parallel kernels.
//
// Every per-node sweep and every kernel-matrix assembly has a serial path
// and an OpenMP path. Work items write disjoint outputs, so both paths
// produce bit-identical results; the serial path is the reference the tests
// compare against.
//

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsmat {

enum class Exec { serial, parallel };

template <class Fn>
void for_each_index(Exec exec, std::int64_t count, Fn&& fn) {
  if (exec == Exec::parallel && count > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) fn(i);
  } else {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
  }
}

// Applies RSMAT_NUM_THREADS (if set) to OpenMP. Dense kernels inside a node
// loop are single-threaded, so the node loops own all the parallelism.
// Returns the OpenMP thread count in effect.
int configure_threads();
int thread_count();

}  // namespace rsmat
