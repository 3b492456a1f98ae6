#pragma once

// Thread-count control for the OpenMP kernels.

#include <optional>

namespace localterm {

// n <= 0 restores the OpenMP default.
void set_max_jobs(int n);
int max_jobs();
// Parses LOCALTERM_JOBS; nullopt when unset or malformed.
std::optional<int> jobs_from_environment();

}  // namespace localterm
