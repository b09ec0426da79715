#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "helab/field.hpp"

namespace helab::test {

/// Samples fn(component, x, y, z) on the grid.
inline PeriodicField sample(const Grid3& grid, Rank rank, const std::function<double(int, double, double, double)>& fn) {
  const int n = grid.n();
  std::vector<double> values(grid.points() * component_count(rank));
  for (int c = 0; c < component_count(rank); ++c) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          values[c * grid.points() + grid.index(i, j, k)] =
              fn(c, grid.coordinate(i), grid.coordinate(j), grid.coordinate(k));
        }
      }
    }
  }
  return PeriodicField(grid, rank, std::move(values));
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const PeriodicField& a, const PeriodicField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline double l2(const PeriodicField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return std::sqrt(s * f.grid().cell_volume());
}

inline double relative_l2(const PeriodicField& a, const PeriodicField& b) { return l2(a - b) / l2(b); }

}  // namespace helab::test
