#pragma once

#include <vector>

#include "starkg/errors.hpp"

namespace starkg {

/// Star-shaped network: n half-lines [0, inf), n >= 2, glued at a common
/// vertex (x = 0 on every branch).  Branch k (1-based) carries the wave
/// operator u |-> -c_k u'' + a_k u with speed coefficient c_k > 0 and
/// constant potential a_k; potentials are kept in non-decreasing order so
/// that a_1 is the bottom of the spectrum.
struct StarNetwork {
  std::vector<double> c;
  std::vector<double> a;

  [[nodiscard]] int n() const { return static_cast<int>(c.size()); }

  // 1-based accessors so formulas read like the math they implement
  [[nodiscard]] double c_at(int k) const { return c[static_cast<std::size_t>(k) - 1]; }
  [[nodiscard]] double a_at(int k) const { return a[static_cast<std::size_t>(k) - 1]; }

  [[nodiscard]] double a_min() const { return a.front(); }
  [[nodiscard]] double a_max() const { return a.back(); }

  /// Number of propagating branches at real lambda: p = #{k : a_k < lambda}.
  /// Branches k <= p carry oscillatory waves, branches k > p evanescent ones.
  [[nodiscard]] int band_index(double lambda) const;

  /// True when lambda lies (up to a tiny relative margin) on one of the
  /// thresholds a_k, where several spectral quantities degenerate.
  [[nodiscard]] bool at_threshold(double lambda) const;

  /// Distinct threshold values in increasing order.
  [[nodiscard]] std::vector<double> thresholds() const;
};

/// Throws TooFewBranches / NonPositiveSpeed / UnsortedPotentials when the
/// network description is unusable.  Every public entry point validates the
/// network it receives, so malformed inputs fail fast.
void validate_network(const StarNetwork& net);

/// A point of the network: branch index in 1..n plus distance x >= 0 from the
/// vertex.  All (k, 0) refer to the same physical point.
struct NetworkPoint {
  int branch = 1;
  double x = 0.0;
};

void validate_point(const NetworkPoint& pt, const StarNetwork& net);

/// Vertex-aware equality: (j, 0) == (k, 0) for all j, k.
[[nodiscard]] bool same_point(const NetworkPoint& lhs, const NetworkPoint& rhs);

}  // namespace starkg
