#pragma once

#include <cstddef>

namespace tvs {

// Serial runs the reference loop; Parallel fans independent work items out
// over OpenMP threads. Both reduce partial results in the same fixed order,
// so for a given input they produce bitwise identical output.
enum class Execution { Serial, Parallel };

// Number of OpenMP threads a parallel region would use (1 without OpenMP).
int max_threads();

// Sets the OpenMP thread count for subsequent parallel regions.
void set_threads(int n);

}  // namespace tvs
