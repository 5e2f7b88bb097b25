#include "rsmat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rsmat {

int configure_threads() {
  if (const char* env = std::getenv("RSMAT_NUM_THREADS")) {
    const int n = std::atoi(env);
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
  }
  return thread_count();
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rsmat
