#include <doctest.h>

#include <cmath>

#include "advperr/rng.hpp"

using namespace advperr;

TEST_CASE("streams are deterministic per seed") {
  Rng a(1), b(1), c(2);
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("uniform ranges") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform(-2.0, 5.0);
    CHECK(v >= -2.0);
    CHECK(v < 5.0);
    CHECK(rng.uniform_int(7) < 7);
  }
}

TEST_CASE("uniform_int is roughly uniform") {
  Rng rng(11);
  int counts[5] = {0};
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_int(5)];
  for (int c : counts) {
    CHECK(c > n / 5 - 4 * 90);  // 4 sigma of Binomial(n, 1/5)
    CHECK(c < n / 5 + 4 * 90);
  }
}

TEST_CASE("normal moments") {
  Rng rng(17);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("gamma mean and chi-squared relation") {
  Rng rng(19);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.gamma(3.0, 2.0);
  CHECK(std::abs(sum / n - 6.0) < 0.1);
  sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.chi_squared(5.0);
  CHECK(std::abs(sum / n - 5.0) < 0.1);
}

TEST_CASE("derive_seed decorrelates streams") {
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
  Rng a(derive_seed(9, 1, 2)), b(derive_seed(9, 1, 3));
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= (a.next_u64() != b.next_u64());
  CHECK(differs);
}
