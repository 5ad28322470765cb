#pragma once

#include <vector>

#include "starkg/network.hpp"

namespace starkg {

/// Quadrature nodes/weights in the spectral variable.  Nodes never coincide
/// with a threshold a_k.
struct LambdaGrid {
  std::vector<double> node;
  std::vector<double> weight;

  [[nodiscard]] std::size_t size() const { return node.size(); }
};

struct LambdaGridParams {
  /// Largest spatial extent the grid has to resolve: the integrands behave
  /// like exp(i xi(lambda) x) with |x| up to this scale, and panels are sized
  /// to keep at most ~one oscillation period per Gauss panel.
  double x_scale = 30.0;
  int order = 15;           // Gauss order per panel
  double waves_per_panel = 1.0;
  double edge_width = 2.0;  // width of the substituted zone next to a threshold
  std::size_t max_nodes = 400000;
};

/// Builds a composite Gauss grid on [lo, hi] subdivided at every threshold
/// strictly inside.  On the edge zone next to each threshold t the variable
/// is changed to lambda = t +- s^2, which turns both the inverse-square-root
/// singularity of the spectral weights (equal potentials) and their
/// square-root kinks (distinct potentials) into smooth integrands; the 2s
/// Jacobian is folded into the weights.
LambdaGrid build_window_grid(const StarNetwork& net, double lo, double hi,
                             const LambdaGridParams& params = {});

}  // namespace starkg
