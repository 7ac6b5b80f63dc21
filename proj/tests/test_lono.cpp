#include <random>

#include "doctest.h"

#include "asn/error.hpp"
#include "asn/lono.hpp"
#include "fixtures.hpp"

using namespace asn;

TEST_SUITE("lono") {

TEST_CASE("one model per excluded node") {
  std::mt19937_64 rng(1);
  const auto train = fixture::random_training(rng, 12, 4, 4, 3);
  const auto ens = build_ensemble(train, KernelParams{{3.0, 3.0, 3.0, 3.0}, 0.01});
  REQUIRE(ens.size() == 4);
  CHECK(ens.excluding(1).node_subset() == NodeSubset{2, 3, 4});
  CHECK(ens.excluding(2).node_subset() == NodeSubset{1, 3, 4});
  CHECK(ens.excluding(3).node_subset() == NodeSubset{1, 2, 4});
  CHECK(ens.excluding(4).node_subset() == NodeSubset{1, 2, 3});

  const auto small = fixture::random_training(rng, 6, 2, 2, 3);
  try {
    build_ensemble(small, KernelParams{{1.0, 1.0}, 0.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("baselines") {
  std::mt19937_64 rng(2);
  const auto train = fixture::random_training(rng, 12, 4, 4, 3);
  const auto ens = build_ensemble(train, KernelParams{{3.0, 3.0, 3.0, 3.0}, 0.01});
  const auto obs = fixture::random_point(rng, 4, 3);
  try {
    compute_error_vector(ens, obs);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::State);
  }
  const auto a = record_baseline(ens, obs);
  const auto b = record_baseline(ens, obs);
  CHECK(a.baselines() == b.baselines());
  const auto e = compute_error_vector(a, obs);
  CHECK(e.e == std::vector<double>(4, 0.0));
}

TEST_CASE("error vector is the Euclidean discrepancy") {
  const auto e = error_vector({Vec3::Zero(), Vec3(1.0, 1.0, 1.0)}, {Vec3(3.0, 4.0, 0.0), Vec3(1.0, 1.0, 1.0)});
  CHECK(e.e[0] == 5.0);
  CHECK(e.e[1] == 0.0);
  CHECK_THROWS_AS(error_vector({Vec3::Zero()}, {}), Error);
}

TEST_CASE("excluded node has no influence") {
  std::mt19937_64 rng(3);
  const auto train = fixture::random_training(rng, 15, 5, 4, 5);
  const auto ens = build_ensemble(train, KernelParams{{5.0, 6.0, 7.0, 8.0}, 0.01});
  for (int j = 1; j <= 4; ++j) {
    const auto pre = fixture::random_point(rng, 4, 5);
    const auto with_base = record_baseline(ens, pre);
    auto post = pre;
    post[static_cast<std::size_t>(j - 1)] = fixture::random_feature(rng, j, 5);
    const auto e = compute_error_vector(with_base, post);
    CHECK(e.e[static_cast<std::size_t>(j - 1)] == 0.0);
    for (int m = 1; m <= 4; ++m)
      if (m != j) CHECK(e.e[static_cast<std::size_t>(m - 1)] > 0.0);
  }
}

}
