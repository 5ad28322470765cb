#include "starkg/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace starkg {

int StarNetwork::band_index(double lambda) const {
  int p = 0;
  for (double ak : a) {
    if (ak < lambda) ++p;
  }
  return p;
}

bool StarNetwork::at_threshold(double lambda) const {
  for (double ak : a) {
    double scale = 1.0 + std::abs(ak) + std::abs(lambda);
    if (std::abs(lambda - ak) <= 1e-14 * scale) return true;
  }
  return false;
}

std::vector<double> StarNetwork::thresholds() const {
  std::vector<double> t = a;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

void validate_network(const StarNetwork& net) {
  if (net.c.size() != net.a.size()) {
    throw TooFewBranches("speed and potential lists have different lengths (" +
                         std::to_string(net.c.size()) + " vs " +
                         std::to_string(net.a.size()) + ")");
  }
  if (net.n() < 2) {
    throw TooFewBranches("a star network needs at least 2 branches, got " +
                         std::to_string(net.n()));
  }
  for (int k = 1; k <= net.n(); ++k) {
    double ck = net.c_at(k);
    if (!(ck > 0.0) || !std::isfinite(ck)) {
      throw NonPositiveSpeed("c_" + std::to_string(k) + " = " +
                             std::to_string(ck) + " must be finite and > 0");
    }
    if (!std::isfinite(net.a_at(k))) {
      throw UnsortedPotentials("a_" + std::to_string(k) + " is not finite");
    }
  }
  if (!std::is_sorted(net.a.begin(), net.a.end())) {
    throw UnsortedPotentials("potentials must satisfy a_1 <= a_2 <= ... <= a_n");
  }
}

void validate_point(const NetworkPoint& pt, const StarNetwork& net) {
  if (pt.branch < 1 || pt.branch > net.n()) {
    throw UnknownBranch("branch " + std::to_string(pt.branch) +
                        " outside 1.." + std::to_string(net.n()));
  }
  if (!(pt.x >= 0.0) || !std::isfinite(pt.x)) {
    throw OutsideDomain("coordinate x = " + std::to_string(pt.x) +
                        " must be finite and >= 0");
  }
}

bool same_point(const NetworkPoint& lhs, const NetworkPoint& rhs) {
  if (lhs.x == 0.0 && rhs.x == 0.0) return true;
  return lhs.branch == rhs.branch && lhs.x == rhs.x;
}

}  // namespace starkg
