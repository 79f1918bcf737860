#include <doctest.h>

#include "gsosel/stats.hpp"

using namespace gsosel;

TEST_SUITE("stats") {

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(x) == 5.0);
  CHECK(stddev(x) == doctest::Approx(2.138089935299395));
  CHECK(stddev(std::vector<double>{3.0}) == 0.0);
}

TEST_CASE("average ranks share ties") {
  CHECK(average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("spearman") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  CHECK(*spearman(a, std::vector<double>{2, 4, 6, 8, 100}) == doctest::Approx(1.0));
  CHECK(*spearman(a, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
  // Ranks (1,2,3,4,5) vs (2,1,4,3,5): 1 - 6·4/(5·24) = 0.8.
  CHECK(*spearman(a, std::vector<double>{2, 1, 4, 3, 5}) == doctest::Approx(0.8));
  CHECK_FALSE(spearman(std::vector<double>{1}, std::vector<double>{1}).has_value());
  CHECK_FALSE(spearman(a, std::vector<double>{3, 3, 3, 3, 3}).has_value());
}

}  // TEST_SUITE
