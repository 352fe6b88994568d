#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "berest/knn.hpp"
#include "berest/rng.hpp"
#include "oracles.hpp"

using namespace berest;

namespace {

LabeledDataset make_dataset(const Eigen::MatrixXd& x,
                            const std::vector<ClassLabel>& labels) {
  LabeledDataset ds;
  ds.x = x;
  ds.labels = labels;
  return ds;
}

LabeledDataset random_dataset(int n, int d, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Eigen::MatrixXd x(n, d);
  std::vector<ClassLabel> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) x(i, c) = rng.normal();
    labels[static_cast<std::size_t>(i)] =
        rng.uniform01() < 0.5 ? ClassLabel::A : ClassLabel::B;
  }
  // Force both classes nonempty.
  labels[0] = ClassLabel::A;
  labels[static_cast<std::size_t>(n - 1)] = ClassLabel::B;
  return make_dataset(x, labels);
}

LabeledDataset two_clusters(int per_class, double separation) {
  RngStream rng(77, 0);
  Eigen::MatrixXd x(2 * per_class, 2);
  std::vector<ClassLabel> labels;
  for (int i = 0; i < per_class; ++i) {
    x(i, 0) = rng.normal() * 0.1;
    x(i, 1) = rng.normal() * 0.1;
    labels.push_back(ClassLabel::A);
  }
  for (int i = 0; i < per_class; ++i) {
    x(per_class + i, 0) = separation + rng.normal() * 0.1;
    x(per_class + i, 1) = rng.normal() * 0.1;
    labels.push_back(ClassLabel::B);
  }
  return make_dataset(x, labels);
}

}  // namespace

TEST_CASE("degenerate two-point LOO is always wrong") {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 100.0;
  const auto ds = make_dataset(x, {ClassLabel::A, ClassLabel::B});
  CHECK(knn_loo_error(ds, 1) == doctest::Approx(1.0));
}

TEST_CASE("well-separated clusters have zero LOO error") {
  const auto ds = two_clusters(10, 50.0);
  CHECK(knn_loo_error(ds, 1) == doctest::Approx(0.0));
}

TEST_CASE("knn_loo_error matches the brute-force oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto ds = random_dataset(12, 2, 300 + seed);
    for (int k : {1, 3, 5}) {
      CHECK(knn_loo_error(ds, k) ==
            doctest::Approx(oracle::knn_loo_error(ds.x, ds.labels, k)));
    }
  }
}

TEST_CASE("knn_loo_error rejects bad k") {
  const auto ds = random_dataset(8, 2, 1);
  CHECK_THROWS(knn_loo_error(ds, 8));
  CHECK_THROWS(knn_loo_error(ds, 9));
  CHECK_THROWS(knn_loo_error(ds, 2));
  CHECK_THROWS(knn_loo_error(ds, 0));
}

TEST_CASE("lower bound transform is piecewise in k") {
  CHECK(knn_lower_bound(0.0, 1) == doctest::Approx(0.0));
  CHECK(knn_lower_bound(0.5, 1) == doctest::Approx(0.5));
  CHECK(knn_lower_bound(0.3, 4) == doctest::Approx(0.2));
  CHECK(knn_lower_bound(0.3, 2) == doctest::Approx(0.15));
  // Radicand guard: upper > 0.5 at k=1 stays finite.
  CHECK(knn_lower_bound(0.8, 1) == doctest::Approx(0.5));
}

TEST_CASE("knn_estimate scans the range and keeps the bounds ordered") {
  SUBCASE("separated clusters give zero bounds") {
    const auto ds = two_clusters(10, 50.0);
    const auto e = knn_estimate(ds, default_k_range());
    CHECK(e.upper == doctest::Approx(0.0));
    CHECK(e.lower == doctest::Approx(0.0));
    CHECK(e.mid == doctest::Approx(0.0));
  }
  SUBCASE("a 20-point dataset matches an exhaustive scan over odd k") {
    const auto ds = random_dataset(20, 3, 99);
    const auto e = knn_estimate(ds, default_k_range());
    double best_err = 1e300;
    int best_k = 0;
    for (int k = 1; k <= 19; k += 2) {
      const double err = oracle::knn_loo_error(ds.x, ds.labels, k);
      if (err < best_err) {
        best_err = err;
        best_k = k;
      }
    }
    CHECK(e.k0 == best_k);
    CHECK(e.upper == doctest::Approx(best_err));
    CHECK(e.lower == doctest::Approx(knn_lower_bound(best_err, best_k)));
    CHECK(e.mid == doctest::Approx(0.5 * (e.upper + e.lower)));
    CHECK(e.lower <= e.upper);
  }
  SUBCASE("duplicating every point cannot raise the k=1 error") {
    const auto ds = random_dataset(14, 2, 5);
    LabeledDataset doubled = ds;
    doubled.x.conservativeResize(28, 2);
    doubled.x.bottomRows(14) = ds.x;
    doubled.labels.insert(doubled.labels.end(), ds.labels.begin(),
                          ds.labels.end());
    const double base = oracle::knn_loo_error(ds.x, ds.labels, 1);
    CHECK(knn_loo_error(doubled, 1) <= base + 1e-12);
  }
}

TEST_CASE("neighbor ranks are metric-scale invariant") {
  // Squared vs plain Euclidean and any positive scaling preserve ranks.
  const auto ds = random_dataset(30, 3, 17);
  LabeledDataset scaled = ds;
  scaled.x *= 37.5;
  for (int k : {1, 5, 9}) {
    const double base = knn_loo_error(ds, k);
    CHECK(knn_loo_error(scaled, k) == doctest::Approx(base));
    CHECK(oracle::knn_loo_error(ds.x, ds.labels, k) == doctest::Approx(base));
  }
}

TEST_CASE("presentation order never changes the estimate") {
  const auto ds = random_dataset(25, 2, 23);
  RngStream rng(123, 0);
  const auto base = knn_estimate(ds, default_k_range());

  std::vector<Eigen::Index> perm(25);
  for (Eigen::Index i = 0; i < 25; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    for (Eigen::Index i = 24; i > 0; --i) {
      const auto j = rng.uniform_int(0, i);
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    LabeledDataset shuffled;
    shuffled.x.resize(25, 2);
    shuffled.labels.resize(25);
    for (Eigen::Index i = 0; i < 25; ++i) {
      shuffled.x.row(i) = ds.x.row(perm[static_cast<std::size_t>(i)]);
      shuffled.labels[static_cast<std::size_t>(i)] =
          ds.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    const auto e = knn_estimate(shuffled, default_k_range());
    CHECK(e.upper == base.upper);
    CHECK(e.lower == base.lower);
    CHECK(e.k0 == base.k0);
  }
}

TEST_CASE("k_range silently truncates at n") {
  const auto ds = random_dataset(6, 2, 31);
  const auto full = knn_estimate(ds, {1, 3, 5, 7, 9});
  const auto trimmed = knn_estimate(ds, {1, 3, 5});
  CHECK(full.upper == trimmed.upper);
  CHECK(full.k0 == trimmed.k0);
}
