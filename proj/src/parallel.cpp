#include "chaosres/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chaosres {

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_worker_count(int workers) {
    if (workers < 1) return;
#ifdef _OPENMP
    omp_set_num_threads(workers);
#endif
}

}  // namespace chaosres
