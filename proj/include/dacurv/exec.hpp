#pragma once

namespace dacurv {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both produce bitwise-identical results: parallel loops only split
/// independent outputs, never a reduction.
enum class Exec { Serial, Parallel };

}  // namespace dacurv
