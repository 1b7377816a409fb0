#include <cmath>

#include "doctest.h"
#include "kt/enumerate.hpp"
#include "kt/error.hpp"
#include "kt/model.hpp"
#include "test_util.hpp"

using namespace kt;

namespace {

Schema two_binary() {
  return Schema({{"a", {"f", "t"}}, {"b", {"f", "t"}}});
}

}  // namespace

TEST_CASE("schema validates names and domains") {
  CHECK_THROWS_AS(Schema({{"a", {"f", "t"}}, {"a", {"f", "t"}}}), ContractError);
  CHECK_THROWS_AS(Schema(std::vector<Variable>{{"a", {"only"}}}), ContractError);
  CHECK_THROWS_AS(Schema({{"a", {"x", "x"}}}), ContractError);

  const Schema s = two_binary();
  CHECK(s.index_of("b") == 1u);
  CHECK(!s.index_of("c").has_value());
  CHECK(s.require("a") == 0u);
  CHECK_THROWS_AS(s.require("zz"), ContractError);
  CHECK(s.value_index(0, "t") == 1u);
  CHECK_THROWS_AS(s.value_index(0, "q"), ContractError);
}

TEST_CASE("feature canonicalizes and validates literals") {
  const Schema s = two_binary();
  const Feature f({{1, 0}, {0, 1}}, 0.5);
  CHECK(f.literals()[0].var == 0u);  // sorted by variable
  CHECK(f.literals()[1].var == 1u);
  CHECK_THROWS_AS(Feature({{0, 0}, {0, 1}}, 1.0), ContractError);
  CHECK_THROWS_AS(Feature({}, 1.0), ContractError);

  CHECK(f.satisfied_by({1, 0}));
  CHECK(!f.satisfied_by({1, 1}));
  CHECK(f.with_weight(-2.0).weight() == -2.0);
  (void)s;
}

TEST_CASE("model rejects out-of-range literals") {
  const Schema s = two_binary();
  CHECK_THROWS_AS(LogLinearModel(s, {Feature({{2, 0}}, 1.0)}), ContractError);
  CHECK_THROWS_AS(LogLinearModel(s, {Feature({{0, 5}}, 1.0)}), ContractError);
}

TEST_CASE("energy sums satisfied weights") {
  const Schema s = two_binary();
  const LogLinearModel m(s, {Feature({{0, 1}}, 0.7), Feature({{0, 1}, {1, 1}}, -0.2)});
  CHECK(energy(m, {1, 1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(energy(m, {0, 1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(energy(m, {1}), ContractError);
  CHECK_THROWS_AS(energy(m, {1, 2}), ContractError);
}

TEST_CASE("assignment space order: first variable most significant") {
  const Schema s({{"a", {"x", "y", "z"}}, {"b", {"f", "t"}}});
  const AssignmentSpace space(s);
  CHECK(space.size() == 6u);
  Assignment a = space.first();
  CHECK(a == Assignment{0, 0});
  CHECK(space.next(a));
  CHECK(a == Assignment{0, 1});
  CHECK(space.next(a));
  CHECK(a == Assignment{1, 0});
  CHECK(space.index_of({2, 1}) == 5u);
  CHECK(space.at(4) == Assignment{2, 0});

  // matches the test-side enumeration convention
  const auto all = ktt::all_assignments(s);
  Assignment b = space.first();
  std::size_t i = 0;
  do {
    CHECK(b == all[i++]);
  } while (space.next(b));
  CHECK(i == all.size());
}

TEST_CASE("enumeration cap enforced") {
  std::vector<Variable> vars;
  for (int i = 0; i < 25; ++i)
    vars.push_back({"v" + std::to_string(i), {"f", "t"}});
  const Schema s(std::move(vars));
  CHECK_THROWS_AS(AssignmentSpace{s}, OracleTooLargeError);
  CHECK_THROWS_AS(exact_log_partition(LogLinearModel(s, {})), OracleTooLargeError);
}

TEST_CASE("exact distribution matches the direct-exp oracle on random models") {
  ktt::TestRng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const Schema s = ktt::random_schema(rng, 2 + rng.uniform_int(3), 3);
    const LogLinearModel m = ktt::random_model(rng, s, 1 + rng.uniform_int(8), 2.0);
    const auto lib = exact_distribution(m);
    const auto oracle = ktt::oracle_distribution(m);
    REQUIRE(lib.size() == oracle.size());
    CHECK(ktt::max_abs_diff(lib, oracle) < 1e-12);
  }
}

TEST_CASE("exact_marginal agrees with summing the distribution") {
  ktt::TestRng rng(7);
  const Schema s = ktt::random_schema(rng, 3, 3);
  const LogLinearModel m = ktt::random_model(rng, s, 6, 1.5);
  const auto dist = ktt::oracle_distribution(m);
  const auto all = ktt::all_assignments(s);
  const Literal lit{1, 1};
  double want = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i][lit.var] == static_cast<std::int32_t>(lit.value)) want += dist[i];
  CHECK(exact_marginal(m, lit) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("log_sum_exp is stable and exact on knowns") {
  CHECK(log_sum_exp(std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // values this large overflow exp(); the log-space form must not
  CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST_CASE("exact_kl: zero on self, positive across, renaming invariant") {
  ktt::TestRng rng(11);
  const Schema s = ktt::random_schema(rng, 3, 2);
  const LogLinearModel p = ktt::random_model(rng, s, 5, 1.5);
  const LogLinearModel q = ktt::random_model(rng, s, 5, 1.5);
  CHECK(exact_kl(p, p) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(exact_kl(p, q) > 0.0);

  const LogLinearModel renamed = rename_variables(p, {"x", "y", "z"});
  CHECK(renamed.schema().var(0).name == "x");
  CHECK(ktt::max_abs_diff(exact_distribution(renamed), exact_distribution(p)) <
        1e-15);
  CHECK_THROWS_AS(exact_kl(p, renamed), ContractError);  // schemas differ
}

TEST_CASE("validate_dataset catches ragged and out-of-range rows") {
  const Schema s = two_binary();
  Dataset d;
  d.schema = s;
  d.instances = {{0, 1}, {1, 0}};
  CHECK_NOTHROW(validate_dataset(d));
  d.instances.push_back({1});
  CHECK_THROWS_AS(validate_dataset(d), ContractError);
  d.instances.back() = {1, 7};
  CHECK_THROWS_AS(validate_dataset(d), ContractError);
}
