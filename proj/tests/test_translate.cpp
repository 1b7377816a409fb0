#include <set>

#include "doctest.h"
#include "kt/error.hpp"
#include "kt/translate.hpp"
#include "test_util.hpp"

using namespace kt;

namespace {

// Example 2's shape: source {Grad, AgeOver25, GoodCredit}, target {Student,
// HighCreditScore}; AgeOver25 has no correspondence.
Schema example2_source() {
  return Schema({{"Grad", {"false", "true"}},
                 {"AgeOver25", {"false", "true"}},
                 {"GoodCredit", {"false", "true"}}});
}

Schema example2_target() {
  return Schema({{"Student", {"false", "true"}},
                 {"HighCreditScore", {"false", "true"}}});
}

Mapping example2_mapping() {
  Correspondence grad{{0}, {0}, {0.9, 0.1, 0.2, 0.8}};
  Correspondence credit{{2}, {1}, {0.85, 0.15, 0.1, 0.9}};
  return Mapping(example2_source(), example2_target(), {grad, credit});
}

LogLinearModel example2_model() {
  // one pairwise feature per clique is enough to carry the structure
  return LogLinearModel(example2_source(),
                        {Feature({{0, 1}, {1, 1}}, 1.1),
                         Feature({{1, 1}, {2, 1}}, -0.9)});
}

}  // namespace

TEST_CASE("structure_to_cliques thresholds strictly and deduplicates") {
  const Schema s = example2_source();
  const LogLinearModel m(s, {Feature({{0, 1}, {1, 1}}, 0.5),
                             Feature({{0, 0}, {1, 0}}, -0.7),
                             Feature({{2, 1}}, 0.1)});
  const auto cliques = structure_to_cliques(m, 0.1);
  // |0.1| > 0.1 is false, so the singleton drops; the two pairwise features
  // share one clique
  REQUIRE(cliques.size() == 1u);
  CHECK(cliques[0] == Clique{0, 1});

  CHECK(structure_to_cliques(m, 0.05).size() == 2u);
  CHECK_THROWS_AS(structure_to_cliques(m, -1.0), ContractError);
}

TEST_CASE("eliminate_unmapped reproduces Example 2's merge") {
  const auto out = eliminate_unmapped({{0, 1}, {1, 2}}, example2_mapping());
  REQUIRE(out.size() == 1u);
  CHECK(out[0] == Clique{0, 2});
}

TEST_CASE("eliminate_unmapped: lone clique loses the variable") {
  const auto out = eliminate_unmapped({{0, 1}}, example2_mapping());
  REQUIRE(out.size() == 1u);
  CHECK(out[0] == Clique{0});
}

TEST_CASE("eliminate_unmapped: clique of only unmapped variables vanishes") {
  const auto out = eliminate_unmapped({{1}}, example2_mapping());
  CHECK(out.empty());
}

TEST_CASE("eliminate_unmapped merges every pair through the victim") {
  // three cliques share the unmapped variable 1: all three pairwise unions
  const auto out =
      eliminate_unmapped({{0, 1}, {1, 2}, {1}}, example2_mapping());
  // {0,1}+{1,2} -> {0,2}; {0,1}+{1} -> {0}; {1,2}+{1} -> {2}
  const std::set<Clique> got(out.begin(), out.end());
  CHECK(got == std::set<Clique>{{0, 2}, {0}, {2}});
}

TEST_CASE("translate_cliques rewrites through correspondences") {
  const auto out = translate_cliques({{0, 2}}, example2_mapping());
  REQUIRE(out.size() == 1u);
  CHECK(out[0] == Clique{0, 1});  // {Student, HighCreditScore}
}

TEST_CASE("translate_cliques takes the product over covering correspondences") {
  // source variable 0 covered by two correspondences -> two output cliques
  const Schema src({{"a", {"f", "t"}}});
  const Schema tgt({{"x", {"f", "t"}}, {"y", {"f", "t"}}});
  Correspondence c1{{0}, {0}, {0.8, 0.2, 0.3, 0.7}};
  Correspondence c2{{0}, {1}, {0.6, 0.4, 0.4, 0.6}};
  const Mapping m(src, tgt, {c1, c2});
  const auto out = translate_cliques({{0}}, m);
  const std::set<Clique> got(out.begin(), out.end());
  CHECK(got == std::set<Clique>{{0}, {1}});
}

TEST_CASE("translate_cliques throws on an uncovered variable") {
  CHECK_THROWS_AS(translate_cliques({{1}}, example2_mapping()), ContractError);
}

TEST_CASE("expand_cliques builds the full domain product at weight zero") {
  const Schema tgt({{"x", {"a", "b", "c"}}, {"y", {"f", "t"}}});
  const Structure st = expand_cliques({{0, 1}, {1}}, tgt);
  // 3*2 products for the pair plus 2 singleton values
  REQUIRE(st.size() == 8u);
  std::set<std::vector<Literal>> seen;
  for (const Feature& f : st.features) {
    CHECK(f.weight() == 0.0);
    CHECK(seen.insert(f.literals()).second);
  }
  CHECK_THROWS_AS(expand_cliques({{0, 1}}, tgt, 5), ContractError);
}

TEST_CASE("Example 2 end-to-end gives exactly {{Student, HighCreditScore}}") {
  const Structure st =
      translate_structure(example2_model(), example2_mapping(), 0.1);
  // every feature spans exactly the pair {0, 1}, one per value combination
  REQUIRE(st.size() == 4u);
  for (const Feature& f : st.features) {
    REQUIRE(f.literals().size() == 2u);
    CHECK(f.literals()[0].var == 0u);
    CHECK(f.literals()[1].var == 1u);
  }
}

TEST_CASE("translate_structure rejects a model over the wrong schema") {
  ktt::TestRng rng(3);
  const Schema other = ktt::random_schema(rng, 3, 2, "z");
  const LogLinearModel m(other, {});
  CHECK_THROWS_AS(translate_structure(m, example2_mapping(), 0.1),
                  ContractError);
}

TEST_CASE("translation drops structure entirely below the threshold") {
  const Structure st =
      translate_structure(example2_model(), example2_mapping(), 5.0);
  CHECK(st.size() == 0u);
}
