#pragma once

namespace renoise {

// Worker count for OpenMP regions: omp_get_max_threads() capped by RENOISE_THREADS.
int worker_count();

} // namespace renoise
