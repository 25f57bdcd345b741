#pragma once

#include <functional>

#include "mmx/geometry.hpp"

namespace mmx {

struct GridOptimum {
  Vec point;
  double value = 0;
  long evaluations = 0;
};

// Brute-force maximization over a bounded domain of dimension <= 2: a uniform
// grid with `resolution` points per axis, then a local refinement pass
// (golden section in 1-D, two nested 21x21 grids in 2-D). Ties within 1e-12
// relative keep the lexicographically smallest grid point.
GridOptimum grid_maximize(const std::function<double(const Vec&)>& fn, const Domain& d, int resolution);
GridOptimum grid_minimize(const std::function<double(const Vec&)>& fn, const Domain& d, int resolution);

}  // namespace mmx
