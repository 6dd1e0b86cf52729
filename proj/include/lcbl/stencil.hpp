#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lcbl {

/// Finite-difference weights for the `derivative`-th derivative at 0 from
/// samples at the given offsets (unit spacing).
std::vector<double> fd_weights(std::span<const double> offsets, int derivative);

struct Stencil {
  std::vector<long> offsets;
  std::vector<double> weights;
  bool one_sided = false;
};

/// Stencil of formal accuracy `order` (2 or 4) for the first or second
/// derivative at node `index` of an axis with `count` nodes and unit spacing.
/// Centered when it fits, otherwise shifted to stay inside the axis.
Stencil derivative_stencil(std::size_t index, std::size_t count, int derivative, int order);

}  // namespace lcbl
