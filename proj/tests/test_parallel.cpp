#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "starkg/parallel.hpp"

using namespace starkg;

TEST_CASE("thread count is sane") {
  CHECK(hardware_threads() >= 1);
}

TEST_CASE("par_for covers every index exactly once") {
  for (ExecPolicy policy : {ExecPolicy::serial, ExecPolicy::parallel}) {
    const std::ptrdiff_t count = 10007;
    std::vector<std::atomic<int>> hits(static_cast<std::size_t>(count));
    for (auto& h : hits) h.store(0);
    par_for(policy, count, [&](std::ptrdiff_t i) {
      hits[static_cast<std::size_t>(i)].fetch_add(1);
    });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  // Empty and single-element ranges.
  int calls = 0;
  par_for(ExecPolicy::serial, 0, [&](std::ptrdiff_t) { ++calls; });
  CHECK(calls == 0);
  par_for(ExecPolicy::parallel, 1, [&](std::ptrdiff_t) { ++calls; });
  CHECK(calls == 1);
}

TEST_CASE("slot writes give bitwise-identical results across policies") {
  // The library's hot loops all follow this pattern: each iteration owns a
  // disjoint output slot and performs its own floating-point reduction, so
  // parallel scheduling cannot change any rounding.
  const std::ptrdiff_t count = 4096;
  auto run = [count](ExecPolicy policy) {
    std::vector<double> out(static_cast<std::size_t>(count));
    par_for(policy, count, [&](std::ptrdiff_t i) {
      double acc = 0.0;
      for (int r = 1; r <= 64; ++r) {
        acc += std::sin(1e-3 * static_cast<double>(i * r)) /
               static_cast<double>(r);
      }
      out[static_cast<std::size_t>(i)] = acc;
    });
    return out;
  };
  const std::vector<double> a = run(ExecPolicy::serial);
  const std::vector<double> b = run(ExecPolicy::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
  }
}
