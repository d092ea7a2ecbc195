#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <vector>

#include "pcecv/errors.hpp"
#include "pcecv/parallel.hpp"

using namespace pcecv;

TEST_CASE("parallel_for covers every task exactly once") {
  for (int threads : {1, 2, 5}) {
    std::vector<int> hits(97, 0);
    parallel_for(97, threads, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 97);
    CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
    CHECK(*std::max_element(hits.begin(), hits.end()) == 1);
  }
}

TEST_CASE("parallel_for results are thread-count independent") {
  auto run = [](int threads) {
    std::vector<double> out(40);
    parallel_for(40, threads, [&](int i) {
      double acc = 0.0;
      for (int k = 1; k <= 50; ++k) acc += 1.0 / (i + k);
      out[static_cast<std::size_t>(i)] = acc;
    });
    return out;
  };
  const auto serial = run(1);
  CHECK(run(3) == serial);
  CHECK(run(8) == serial);
}

TEST_CASE("parallel_for rethrows task exceptions") {
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](int i) {
                                 if (i == 7) throw DataError("task 7 broke");
                               }),
                  DataError);
  CHECK_THROWS_AS(parallel_for(4, 0, [](int) {}), ConfigError);
  // Zero tasks are a no-op regardless of thread count.
  parallel_for(0, 3, [](int) { throw DataError("unreachable"); });
}
