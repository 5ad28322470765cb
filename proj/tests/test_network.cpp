#include <doctest.h>

#include "starkg/errors.hpp"
#include "starkg/network.hpp"

using namespace starkg;

TEST_CASE("network validation rejects malformed descriptions") {
  CHECK_THROWS_AS(validate_network(StarNetwork{{1.0}, {0.0}}), TooFewBranches);
  CHECK_THROWS_AS(validate_network(StarNetwork{{}, {}}), TooFewBranches);
  CHECK_THROWS_AS(validate_network(StarNetwork{{1.0, 1.0}, {0.0}}),
                  TooFewBranches);
  CHECK_THROWS_AS(validate_network(StarNetwork{{1.0, 0.0}, {0.0, 1.0}}),
                  NonPositiveSpeed);
  CHECK_THROWS_AS(validate_network(StarNetwork{{1.0, -2.0}, {0.0, 1.0}}),
                  NonPositiveSpeed);
  CHECK_THROWS_AS(validate_network(StarNetwork{{1.0, 1.0}, {1.0, 0.0}}),
                  UnsortedPotentials);
  CHECK_NOTHROW(validate_network(StarNetwork{{2.0, 0.5}, {-1.0, 3.0}}));
  CHECK_NOTHROW(validate_network(StarNetwork{{1.0, 1.0, 1.0}, {0.0, 0.0, 4.0}}));
}

TEST_CASE("band index counts propagating branches") {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 4.0, 16.0}};
  CHECK(net.band_index(-3.0) == 0);
  CHECK(net.band_index(0.5) == 1);
  CHECK(net.band_index(4.0) == 1);   // a threshold itself is not propagating
  CHECK(net.band_index(7.0) == 2);
  CHECK(net.band_index(16.5) == 3);
  CHECK(net.a_min() == 0.0);
  CHECK(net.a_max() == 16.0);
}

TEST_CASE("thresholds deduplicate and order") {
  const StarNetwork net{{1.0, 1.0, 1.0, 1.0}, {0.0, 4.0, 4.0, 9.0}};
  const std::vector<double> th = net.thresholds();
  REQUIRE(th.size() == 3);
  CHECK(th[0] == 0.0);
  CHECK(th[1] == 4.0);
  CHECK(th[2] == 9.0);
  CHECK(net.at_threshold(4.0));
  CHECK(net.at_threshold(4.0 + 1e-14));
  CHECK_FALSE(net.at_threshold(4.001));
  CHECK_FALSE(net.at_threshold(-1.0));
}

TEST_CASE("point validation and vertex identification") {
  const StarNetwork net{{1.0, 1.0}, {0.0, 2.0}};
  CHECK_NOTHROW(validate_point(NetworkPoint{1, 0.0}, net));
  CHECK_NOTHROW(validate_point(NetworkPoint{2, 5.5}, net));
  CHECK_THROWS_AS(validate_point(NetworkPoint{0, 1.0}, net), UnknownBranch);
  CHECK_THROWS_AS(validate_point(NetworkPoint{3, 1.0}, net), UnknownBranch);
  CHECK_THROWS_AS(validate_point(NetworkPoint{1, -0.1}, net), OutsideDomain);

  CHECK(same_point(NetworkPoint{1, 0.0}, NetworkPoint{2, 0.0}));
  CHECK(same_point(NetworkPoint{1, 1.5}, NetworkPoint{1, 1.5}));
  CHECK_FALSE(same_point(NetworkPoint{1, 1.5}, NetworkPoint{2, 1.5}));
  CHECK_FALSE(same_point(NetworkPoint{1, 0.0}, NetworkPoint{1, 1.0}));
}
