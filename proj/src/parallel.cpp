#include "gaussbv/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace gaussbv {

int worker_count() {
  static const int count = [] {
    if (const char* env = std::getenv("GAUSSBV_THREADS")) {
      try {
        const int n = std::stoi(env);
        if (n > 0) return n;
      } catch (...) {
      }
    }
    return omp_get_num_procs();
  }();
  return count;
}

}  // namespace gaussbv
