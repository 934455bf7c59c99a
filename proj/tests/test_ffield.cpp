#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pmc/ffield.hpp"
#include "pmc/rng.hpp"

using pmc::FieldElement;
using pmc::FiniteField;

namespace {

const std::vector<std::pair<std::uint32_t, std::uint32_t>> kGrid = {
    {2, 1}, {3, 1}, {2, 2}, {5, 1},  {7, 1}, {2, 3}, {3, 2}, {11, 1}, {13, 1},
    {2, 4}, {5, 2}, {3, 3}, {2, 5},  {7, 2}, {2, 6}, {3, 4}, {101, 1}, {2, 7}};

}  // namespace

TEST_CASE("construction examples") {
  const FiniteField f2(2, 1);
  CHECK(f2.generator().code == 1);
  CHECK(f2.q() == 2);

  const FiniteField f9(3, 2);
  CHECK(f9.q() == 9);
  std::set<std::uint32_t> dlogs;
  for (std::uint32_t c = 1; c < 9; ++c) dlogs.insert(f9.dlog(f9.element(c)));
  CHECK(dlogs.size() == 8);  // generator order is exactly q-1
  CHECK(*dlogs.rbegin() == 7);

  const FiniteField f5(5, 1);
  CHECK(f5.generator().code == 2);  // smallest primitive root mod 5
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(FiniteField(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(FiniteField(6, 2), std::invalid_argument);
  CHECK_THROWS_AS(FiniteField(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(FiniteField(2, 30), std::invalid_argument);  // beyond the table bound
  CHECK_THROWS_AS(FiniteField(5, 4, 100), std::invalid_argument);
}

TEST_CASE("dlog basics") {
  const FiniteField f(7, 1);
  CHECK(f.dlog(f.one()) == 0);
  CHECK(f.dlog(f.generator()) == 1);
  CHECK(f.dlog(f.mul(f.generator(), f.generator())) == 2);
  CHECK_THROWS_AS(f.dlog(f.zero()), std::domain_error);
}

TEST_CASE("arithmetic basics") {
  const FiniteField f5(5, 1);
  CHECK(f5.inv(f5.one()) == f5.one());
  CHECK(f5.mul(f5.element(2), f5.element(3)) == f5.one());
  CHECK(f5.inv(f5.element(2)) == f5.element(3));
  CHECK_THROWS_AS(f5.inv(f5.zero()), std::domain_error);
  CHECK_THROWS_AS(f5.pow(f5.zero(), -1), std::domain_error);
  CHECK(f5.pow(f5.zero(), 3) == f5.zero());
  CHECK(f5.pow(f5.zero(), 0) == f5.one());

  for (const auto& [p, k] : kGrid) {
    const FiniteField f(p, k);
    for (std::uint32_t c = 1; c < f.q(); ++c)
      REQUIRE(f.pow(f.element(c), f.q() - 1) == f.one());
  }
}

TEST_CASE("dlog/exp bijectivity over the whole grid") {
  for (const auto& [p, k] : kGrid) {
    const FiniteField f(p, k);
    std::set<std::uint32_t> seen;
    for (std::uint32_t l = 0; l < f.order(); ++l) {
      const FieldElement x = f.exp(l);
      REQUIRE(!x.is_zero());
      REQUIRE(f.dlog(x) == l);
      seen.insert(x.code);
    }
    REQUIRE(seen.size() == f.order());
  }
}

TEST_CASE("dlog homomorphism properties") {
  pmc::CounterRng rng(0x5EED);
  for (const auto& [p, k] : kGrid) {
    const FiniteField f(p, k);
    const std::uint32_t m = f.order();
    for (int iter = 0; iter < 30; ++iter) {
      const FieldElement x = f.exp(rng.next_below(m));
      const FieldElement y = f.exp(rng.next_below(m));
      CHECK(f.dlog(f.mul(x, y)) == (static_cast<std::uint64_t>(f.dlog(x)) + f.dlog(y)) % m);
      const long long a = static_cast<long long>(rng.next_below(41)) - 20;
      const long long expect = ((a * f.dlog(x)) % m + m) % m;
      CHECK(f.dlog(f.pow(x, a)) == static_cast<std::uint64_t>(expect));
      CHECK(f.pow(x, -a) == f.inv(f.pow(x, a)));
    }
  }
}

TEST_CASE("field axioms on random triples") {
  pmc::CounterRng rng(0xD15C0);
  for (const auto& [p, k] : {std::pair<std::uint32_t, std::uint32_t>{3, 2}, {2, 4}, {7, 1}}) {
    const FiniteField f(p, k);
    for (int iter = 0; iter < 50; ++iter) {
      const FieldElement a = f.element(static_cast<std::uint32_t>(rng.next_below(f.q())));
      const FieldElement b = f.element(static_cast<std::uint32_t>(rng.next_below(f.q())));
      const FieldElement c = f.element(static_cast<std::uint32_t>(rng.next_below(f.q())));
      CHECK(f.add(a, b) == f.add(b, a));
      CHECK(f.mul(a, b) == f.mul(b, a));
      CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      CHECK(f.add(a, f.neg(a)) == f.zero());
      CHECK(f.sub(a, b) == f.add(a, f.neg(b)));
    }
  }
}

TEST_CASE("deterministic construction") {
  for (const auto& [p, k] : {std::pair<std::uint32_t, std::uint32_t>{3, 2}, {2, 6}, {5, 2}}) {
    const FiniteField a(p, k), b(p, k);
    CHECK(a == b);
  }
}

TEST_CASE("canonical element text form") {
  const FiniteField f9(3, 2);
  // "1,2" means 1 + 2x
  const FieldElement x = f9.parse("1,2");
  CHECK(x.code == 1 + 2 * 3);
  CHECK(f9.to_string(x) == "1,2");
  for (std::uint32_t c = 0; c < 9; ++c)
    CHECK(f9.parse(f9.to_string(f9.element(c))) == f9.element(c));
  CHECK_THROWS_AS(f9.parse("1"), std::invalid_argument);
  CHECK_THROWS_AS(f9.parse("1,2,0"), std::invalid_argument);
  CHECK_THROWS_AS(f9.parse("3,0"), std::invalid_argument);
}
