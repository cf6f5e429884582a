#pragma once

namespace lrdecon {

/// Selects between the serial reference kernels and their OpenMP counterparts.
/// Both paths produce bit-identical output; the serial one is kept for testing
/// and benchmarking.
enum class Exec { kSerial, kParallel };

}  // namespace lrdecon
