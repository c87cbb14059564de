#pragma once

#include <vector>

namespace cartan {

/// A point (x, p) of the cotangent bundle in chart coordinates.
struct CotangentPoint {
  std::vector<double> x;
  std::vector<double> p;

  int dim() const { return static_cast<int>(x.size()); }
};

}  // namespace cartan
