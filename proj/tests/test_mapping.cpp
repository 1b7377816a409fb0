#include <cmath>

#include "doctest.h"
#include "kt/error.hpp"
#include "kt/mapping.hpp"
#include "test_util.hpp"

using namespace kt;

namespace {

Schema src2() { return Schema({{"a", {"f", "t"}}, {"b", {"f", "t"}}}); }
Schema tgt2() { return Schema({{"x", {"f", "t"}}, {"y", {"f", "t"}}}); }

Mapping identity2() {
  Correspondence ca{{0}, {0}, {1.0, 0.0, 0.0, 1.0}};
  Correspondence cb{{1}, {1}, {1.0, 0.0, 0.0, 1.0}};
  return Mapping(src2(), tgt2(), {ca, cb});
}

}  // namespace

TEST_CASE("correspondence indexing conventions") {
  const Schema s({{"a", {"x", "y", "z"}}, {"b", {"f", "t"}}});
  const Schema t({{"p", {"f", "t"}}, {"q", {"u", "v", "w"}}});
  Correspondence c;
  c.source_vars = {0, 1};
  c.target_vars = {0, 1};
  CHECK(c.row_count(s) == 6u);
  CHECK(c.col_count(t) == 6u);
  // first variable most significant
  CHECK(c.row_of({2, 1}, s) == 5u);
  CHECK(c.row_of({1, 0}, s) == 2u);
  c.table.assign(36, 1.0 / 6.0);
  CHECK(c.prob(5, 4, t) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("mapping construction validates structure") {
  Correspondence bad_idx{{7}, {0}, {1.0, 0.0, 0.0, 1.0}};
  CHECK_THROWS_AS(Mapping(src2(), tgt2(), {bad_idx}), ContractError);
  Correspondence bad_dim{{0}, {0}, {1.0, 0.0}};
  CHECK_THROWS_AS(Mapping(src2(), tgt2(), {bad_dim}), ContractError);
}

TEST_CASE("validate_mapping flags probabilistic violations") {
  SUBCASE("ok") {
    const auto diags = validate_mapping(identity2());
    CHECK(mapping_ok(diags));
  }
  SUBCASE("unnormalized row is an error") {
    Correspondence c{{0}, {0}, {0.9, 0.0, 0.0, 1.0}};
    Correspondence cb{{1}, {1}, {1.0, 0.0, 0.0, 1.0}};
    const auto diags = validate_mapping(Mapping(src2(), tgt2(), {c, cb}));
    CHECK(!mapping_ok(diags));
  }
  SUBCASE("negative entry is an error") {
    Correspondence c{{0}, {0}, {1.1, -0.1, 0.0, 1.0}};
    Correspondence cb{{1}, {1}, {1.0, 0.0, 0.0, 1.0}};
    CHECK(!mapping_ok(validate_mapping(Mapping(src2(), tgt2(), {c, cb}))));
  }
  SUBCASE("overlapping target variables are an error") {
    Correspondence c1{{0}, {0}, {1.0, 0.0, 0.0, 1.0}};
    Correspondence c2{{1}, {0}, {1.0, 0.0, 0.0, 1.0}};
    CHECK(!mapping_ok(validate_mapping(Mapping(src2(), tgt2(), {c1, c2}))));
  }
  SUBCASE("uncovered target variable is only a warning") {
    Correspondence c{{0}, {0}, {1.0, 0.0, 0.0, 1.0}};
    const auto diags = validate_mapping(Mapping(src2(), tgt2(), {c}));
    CHECK(mapping_ok(diags));
    REQUIRE(!diags.empty());
    CHECK(diags[0].severity == Diagnostic::Severity::kWarning);
  }
}

TEST_CASE("unmapped variable queries") {
  Correspondence c{{0}, {1}, {1.0, 0.0, 0.0, 1.0}};
  const Mapping m(src2(), tgt2(), {c});
  CHECK(m.unmapped_target_vars() == std::vector<std::uint32_t>{0});
  CHECK(m.unmapped_source_vars() == std::vector<std::uint32_t>{1});
  CHECK(m.source_var_mapped(0));
  CHECK(!m.source_var_mapped(1));
}

TEST_CASE("correspondence log-weight features carry log p") {
  const Schema s = src2();
  const Schema t = tgt2();
  Correspondence c{{0}, {0}, {0.7, 0.3, 0.2, 0.8}};
  const auto feats = correspondence_log_weights(c, s, t, ZeroPolicy::kReject, 2);
  REQUIRE(feats.size() == 4u);
  // row 1 (a=t), col 0 (x=f): weight log 0.2; target index shifted by 2
  bool found = false;
  for (const Feature& f : feats) {
    if (f.literals() == std::vector<Literal>{{0, 1}, {2, 0}}) {
      CHECK(f.weight() == doctest::Approx(std::log(0.2)));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("zero policy") {
  const Schema s = src2();
  const Schema t = tgt2();
  Correspondence c{{0}, {0}, {1.0, 0.0, 0.0, 1.0}};
  const std::uint32_t offset = static_cast<std::uint32_t>(s.size());
  CHECK_THROWS_AS(
      correspondence_log_weights(c, s, t, ZeroPolicy::kReject, offset),
      ContractError);
  const auto feats = correspondence_log_weights(
      c, s, t, ZeroPolicy::kClampRenormalize, offset);
  REQUIRE(feats.size() == 4u);
  // clamped row: {1, 1e-6} renormalized
  const double z = 1.0 + 1e-6;
  for (const Feature& f : feats) {
    const double p = std::exp(f.weight());
    const bool diag = f.literals()[0].value == f.literals()[1].value;
    CHECK(p == doctest::Approx(diag ? 1.0 / z : 1e-6 / z).epsilon(1e-9));
  }
}

TEST_CASE("joint schema naming and layout") {
  const Schema joint = build_joint_schema(src2(), tgt2());
  REQUIRE(joint.size() == 4u);
  CHECK(joint.var(0).name == "a");
  CHECK(joint.var(2).name == "x'");
  CHECK(joint.var(3).name == "y'");
}

TEST_CASE("joint model marginal equals brute-force Eq. 1 on random pairs") {
  ktt::TestRng rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    const Schema src = ktt::random_schema(rng, 2 + rng.uniform_int(2), 3, "s");
    const LogLinearModel source = ktt::random_model(rng, src, 5, 1.5);
    const Mapping m = ktt::random_mapping(rng, src);
    const JointModel joint = build_joint_model(source, m);
    CHECK(joint.n_source_vars == src.size());
    const auto lib = implied_target_distribution(joint);
    const auto oracle = ktt::oracle_implied(source, m);
    REQUIRE(lib.size() == oracle.size());
    CHECK(ktt::max_abs_diff(lib, oracle) < 1e-9);
  }
}

TEST_CASE("joint model requires matching schema and clean mapping") {
  ktt::TestRng rng(5);
  const Schema other = ktt::random_schema(rng, 2, 2, "w");
  const LogLinearModel wrong(other, {});
  CHECK_THROWS_AS(build_joint_model(wrong, identity2()), ContractError);

  Correspondence bad{{0}, {0}, {0.9, 0.0, 0.0, 1.0}};  // row sums to 0.9
  Correspondence cb{{1}, {1}, {1.0, 0.0, 0.0, 1.0}};
  const Mapping m(src2(), tgt2(), {bad, cb});
  const LogLinearModel source(src2(), {});
  CHECK_THROWS_AS(build_joint_model(source, m, ZeroPolicy::kClampRenormalize),
                  ContractError);
}

TEST_CASE("deterministic identity mapping pushes the distribution through") {
  ktt::TestRng rng(9);
  const LogLinearModel source = ktt::random_model(rng, src2(), 4, 1.5);
  const JointModel joint =
      build_joint_model(source, identity2(), ZeroPolicy::kClampRenormalize);
  const auto implied = implied_target_distribution(joint);
  const auto src_dist = ktt::oracle_distribution(source);
  // clamping at 1e-6 perturbs the copy by O(1e-6)
  CHECK(ktt::max_abs_diff(implied, src_dist) < 1e-4);
  for (std::size_t i = 0; i < implied.size(); ++i)
    CHECK(implied[i] == doctest::Approx(src_dist[i]).epsilon(1e-4));
}
