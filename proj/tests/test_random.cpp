#include <set>

#include "doctest.h"

#include "asn/random.hpp"

using namespace asn;

TEST_SUITE("random") {

TEST_CASE("derived seeds") {
  static_assert(derive_seed(1, {2, 3}) == derive_seed(derive_seed(1, {2}), {3}));
  CHECK(derive_seed(1, {2}) != derive_seed(1, {3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (std::uint64_t t = 0; t < 50; ++t) seen.insert(derive_seed(s, {t}));
  CHECK(seen.size() == 2500);
}

}
