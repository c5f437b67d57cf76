#pragma once

#include <functional>

namespace condmix {

// Scalar phase-space observable (x, y) -> A(x, y).
using Observable = std::function<double(double, double)>;

}  // namespace condmix
