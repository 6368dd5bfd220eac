#pragma once

#include <algorithm>
#include <array>

namespace hybridte {

// Piecewise-linear congestion penalty: nine lines y_i(U) = a_i*U - b_i whose
// upper envelope doubles its gradient every 5% of utilization above 60%.
// Links at or below 60% cost nothing.
struct CostLine {
  double gradient;
  double intercept;
  double value(double u) const { return gradient * u - intercept; }
};

inline constexpr std::array<CostLine, 9> kCostLines{{
    {0.0, 0.0},
    {1.0, 0.6},
    {2.0, 1.25},
    {4.0, 2.65},
    {8.0, 5.65},
    {16.0, 12.05},
    {32.0, 25.65},
    {64.0, 54.45},
    {128.0, 115.25},
}};

// Upper envelope of the lines, floored at zero.
inline double link_cost(double utilization) {
  double best = 0.0;
  for (const CostLine& line : kCostLines)
    best = std::max(best, line.value(utilization));
  return best;
}

}  // namespace hybridte
