#include "salttex/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace salttex {
namespace {

int default_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int threads_from_env() {
  const char* env = std::getenv("SALTTEX_THREADS");
  if (env == nullptr) return 0;
  try {
    int n = std::stoi(env);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

std::atomic<int>& configured() {
  static std::atomic<int> n{threads_from_env()};
  return n;
}

}  // namespace

int worker_threads() {
  int n = configured().load();
  return n > 0 ? n : default_threads();
}

void set_worker_threads(int n) { configured().store(n > 0 ? n : 0); }

}  // namespace salttex
