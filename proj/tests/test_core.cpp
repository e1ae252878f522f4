#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "harlearn/linalg.hpp"
#include "harlearn/metrics.hpp"
#include "harlearn/rng.hpp"

#include "oracles.hpp"

using namespace harlearn;

TEST_CASE("cholesky factors and solves SPD systems") {
  SymMatrix a(3);
  a.set_sym(0, 0, 4.0);
  a.set_sym(1, 1, 5.0);
  a.set_sym(2, 2, 6.0);
  a.set_sym(0, 1, 1.0);
  a.set_sym(0, 2, 0.5);
  a.set_sym(1, 2, 2.0);

  auto f = cholesky(a);
  REQUIRE(f.has_value());

  // solve against an explicit inverse
  std::vector<double> b = {1.0, -2.0, 3.0};
  const auto y = f->solve(b);
  oracles::DenseMat m{3, {4, 1, 0.5, 1, 5, 2, 0.5, 2, 6}};
  double det = 0.0;
  const auto inv = oracles::invert(m, &det);
  for (int i = 0; i < 3; ++i) {
    double expect = 0.0;
    for (int j = 0; j < 3; ++j) expect += inv.at(i, j) * b[j];
    CHECK(y[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(f->log_det() == doctest::Approx(std::log(det)).epsilon(1e-12));

  // quad form = b^T A^-1 b
  double quad = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) quad += b[i] * inv.at(i, j) * b[j];
  CHECK(f->quad_form(b) == doctest::Approx(quad).epsilon(1e-12));
}

TEST_CASE("cholesky rejects indefinite matrices") {
  SymMatrix a(2);
  a.set_sym(0, 0, 1.0);
  a.set_sym(1, 1, 1.0);
  a.set_sym(0, 1, 2.0);  // eigenvalues 3 and -1
  CHECK_FALSE(cholesky(a).has_value());
}

TEST_CASE("rng streams are deterministic and seed-sensitive") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i)
    if (a2.next_u64() != c.next_u64()) differs = true;
  CHECK(differs);

  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("rng uniform and normal are in range and centred") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));

  double nsum = 0.0, nsq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double v = rng.normal();
    nsum += v;
    nsq += v * v;
  }
  CHECK(nsum / 20000.0 == doctest::Approx(0.0).epsilon(0.05));
  CHECK(nsq / 20000.0 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("balanced accuracy basics") {
  ConfusionMatrix perfect(3);
  perfect.add(0, 0);
  perfect.add(1, 1);
  perfect.add(2, 2);
  CHECK(balanced_accuracy(perfect) == doctest::Approx(1.0));

  // recalls 1.0 and 0.5
  ConfusionMatrix two(2);
  two.add(0, 0);
  two.add(0, 0);
  two.add(1, 1);
  two.add(1, 0);
  CHECK(balanced_accuracy(two) == doctest::Approx(0.75));

  ConfusionMatrix missing(2);
  missing.add(0, 0);
  CHECK_THROWS_AS(balanced_accuracy(missing), MissingClassInTest);
}

TEST_CASE("balanced accuracy equals the mean of per-class recalls on random tables") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    ConfusionMatrix confusion(n);
    std::vector<double> recall(n);
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<std::uint64_t> row(n);
      std::uint64_t total = 0;
      for (std::size_t p = 0; p < n; ++p) {
        row[p] = rng.below(20);
        total += row[p];
      }
      if (total == 0) {
        row[t] = 1;
        total = 1;
      }
      for (std::size_t p = 0; p < n; ++p)
        for (std::uint64_t k = 0; k < row[p]; ++k) confusion.add(t, p);
      recall[t] = double(row[t]) / double(total);
    }
    double mean = 0.0;
    for (double r : recall) mean += r;
    mean /= double(n);
    CHECK(balanced_accuracy(confusion) == doctest::Approx(mean).epsilon(1e-12));
  }
}
