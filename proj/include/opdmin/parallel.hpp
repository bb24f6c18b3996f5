#pragma once

namespace opdmin {

// Caps the number of OpenMP threads used by the parallel kernels.
// A value of 0 keeps the runtime default. No-op in serial builds.
void set_num_threads(int t);
int max_threads();

}  // namespace opdmin
