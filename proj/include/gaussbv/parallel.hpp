#pragma once

namespace gaussbv {

/// Worker count for data-parallel loops: GAUSSBV_THREADS if set to a
/// positive integer, otherwise the number of available cores.
int worker_count();

}  // namespace gaussbv
