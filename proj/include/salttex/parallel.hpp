#pragma once

namespace salttex {

/// Worker count for data-parallel loops. Reads SALTTEX_THREADS once
/// (0 or unset = runtime default).
int worker_threads();

/// Overrides the worker count for subsequent loops (0 = runtime default).
void set_worker_threads(int n);

}  // namespace salttex
