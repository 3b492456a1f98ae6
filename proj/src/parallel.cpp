#include "localterm/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace localterm {

namespace {
int default_threads() {
  static const int n = omp_get_max_threads();
  return n;
}
}  // namespace

void set_max_jobs(int n) {
  default_threads();
  omp_set_num_threads(n > 0 ? n : default_threads());
}

int max_jobs() { return omp_get_max_threads(); }

std::optional<int> jobs_from_environment() {
  const char* v = std::getenv("LOCALTERM_JOBS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  int n = 0;
  auto [end, ec] = std::from_chars(v, v + std::strlen(v), n);
  if (ec != std::errc() || *end != '\0' || n <= 0) return std::nullopt;
  return n;
}

}  // namespace localterm
