#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pszkit/parallel.hpp"

using pszkit::Exec;
using pszkit::for_each_index;

TEST_CASE("serial and parallel loops write identical disjoint slices") {
  const std::int64_t n = 1024;
  std::vector<double> a(n, 0.0), b(n, 0.0);
  auto body = [](std::int64_t i) {
    double v = 1.0;
    for (int r = 0; r < 50; ++r) v = v * 1.0000001 + static_cast<double>(i);
    return v;
  };
  for_each_index(n, Exec::serial, [&](std::int64_t i) { a[i] = body(i); });
  for_each_index(n, Exec::parallel, [&](std::int64_t i) { b[i] = body(i); });
  CHECK(a == b);
}

TEST_CASE("every index runs exactly once in both modes") {
  for (Exec mode : {Exec::serial, Exec::parallel}) {
    const std::int64_t n = 777;
    std::vector<std::atomic<int>> hits(n);
    for_each_index(n, mode, [&](std::int64_t i) { ++hits[i]; });
    for (std::int64_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
  }
}

TEST_CASE("zero-length loop is a no-op") {
  bool ran = false;
  for_each_index(0, Exec::serial, [&](std::int64_t) { ran = true; });
  for_each_index(0, Exec::parallel, [&](std::int64_t) { ran = true; });
  CHECK_FALSE(ran);
}

TEST_CASE("exceptions from the parallel loop surface on the caller") {
  CHECK_THROWS_WITH_AS(
      for_each_index(64, Exec::parallel,
                     [&](std::int64_t i) {
                       if (i == 13)
                         throw std::runtime_error("boom at 13");
                     }),
      "boom at 13", std::runtime_error);
}

TEST_CASE("one exception arrives even when many indices throw") {
  std::atomic<int> completed{0};
  try {
    for_each_index(256, Exec::parallel, [&](std::int64_t i) {
      if (i % 3 == 0) throw std::invalid_argument("multi");
      ++completed;
    });
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "multi");
  }
  CHECK(completed.load() <= 256);
}

TEST_CASE("serial exceptions propagate unchanged") {
  CHECK_THROWS_AS(
      for_each_index(8, Exec::serial,
                     [](std::int64_t i) {
                       if (i == 2) throw std::domain_error("serial");
                     }),
      std::domain_error);
}

TEST_CASE("parallel reduction by disjoint partial sums matches serial") {
  const std::int64_t n = 4096;
  std::vector<std::int64_t> partial(n, 0);
  for_each_index(n, Exec::parallel,
                 [&](std::int64_t i) { partial[i] = i * i; });
  const std::int64_t got =
      std::accumulate(partial.begin(), partial.end(), std::int64_t{0});
  std::int64_t want = 0;
  for (std::int64_t i = 0; i < n; ++i) want += i * i;
  CHECK(got == want);
}
