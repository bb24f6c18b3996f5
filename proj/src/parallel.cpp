#include "opdmin/parallel.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opdmin {

void set_num_threads(int t) {
#ifdef _OPENMP
    if (t > 0) omp_set_num_threads(std::min(t, omp_get_num_procs()));
#else
    (void)t;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace opdmin
