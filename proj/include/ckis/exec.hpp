#pragma once

namespace ckis {

/// Execution policy for the data-parallel kernels (Gram assembly, candidate
/// sweeps, replicate fans). Parallel results are bit-identical to Serial:
/// every parallel loop writes disjoint slots and reductions stay sequential.
enum class Exec {
  Serial,
  Parallel,
};

}  // namespace ckis
