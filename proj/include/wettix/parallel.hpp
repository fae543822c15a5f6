#pragma once

#ifdef WETTIX_HAVE_OPENMP
#include <omp.h>
#endif

namespace wettix {

// Requested worker count; 0 means the OpenMP default.
inline int team_size(int threads) {
#ifdef WETTIX_HAVE_OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace wettix
