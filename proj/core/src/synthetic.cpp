#include "kt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "kt/enumerate.hpp"
#include "kt/error.hpp"
#include "kt/rng.hpp"
#include "kt/sampling.hpp"
#include "kt/translate.hpp"

namespace kt {
namespace {

// Seed streams for the independent pieces of a task bundle.
enum : std::uint64_t {
  kStreamModel = 1,
  kStreamMapping = 2,
  kStreamSourceTrain = 3,
  kStreamSourceTest = 4,
  kStreamTargetTrain = 5,
  kStreamTargetTest = 6,
  kStreamSizes = 7,
};

Dataset draw_iid(const Schema& schema, std::span<const double> table,
                 std::uint32_t n, std::uint64_t seed, const char* component) {
  AssignmentSpace space(schema);
  Rng rng(seed);
  Dataset data;
  data.schema = schema;
  data.instances.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i)
    data.instances.push_back(space.at(rng.categorical(table)));
  data.provenance = {{"format_version", 1},
                     {"generator", "synthetic-iid"},
                     {"component", component},
                     {"seed", seed},
                     {"n_samples", n}};
  return data;
}

// Eq. 1 by direct summation, zero-safe (no log-weights involved).
std::vector<double> brute_implied(const LogLinearModel& source,
                                  const Mapping& m) {
  const std::vector<double> p_src = exact_distribution(source);
  AssignmentSpace src_space(source.schema());
  AssignmentSpace tgt_space(m.target_schema());
  std::vector<double> out(tgt_space.size(), 0.0);

  Assignment x = src_space.first();
  std::uint64_t xi = 0;
  do {
    Assignment t = tgt_space.first();
    std::uint64_t ti = 0;
    do {
      double p = p_src[xi];
      for (const Correspondence& c : m.correspondences()) {
        std::uint64_t col = 0;
        for (std::uint32_t tv : c.target_vars)
          col = col * m.target_schema().var(tv).domain.size() + t[tv];
        p *= c.prob(c.row_of(x, m.source_schema()), col, m.target_schema());
      }
      // Unmapped target variables are uniform under the mapping semantics.
      for (std::uint32_t tv : m.unmapped_target_vars())
        p /= static_cast<double>(m.target_schema().var(tv).domain.size());
      out[ti] += p;
      ++ti;
    } while (tgt_space.next(t));
    ++xi;
  } while (src_space.next(x));
  return out;
}

}  // namespace

SyntheticTask make_synthetic_task(const SyntheticSpec& spec) {
  if (spec.n_attributes < 2 || spec.n_bins < 2)
    throw ContractError("make_synthetic_task: need >= 2 attributes and bins");
  if (spec.mapping_noise < 0.0 || spec.mapping_noise > 1.0)
    throw ContractError("make_synthetic_task: noise must be in [0, 1]");

  const std::uint32_t k = spec.n_bins;
  std::vector<Variable> src_vars, tgt_vars;
  for (std::uint32_t a = 0; a < spec.n_attributes; ++a) {
    std::vector<std::string> src_domain, tgt_domain;
    for (std::uint32_t b = 0; b < k; ++b) {
      src_domain.push_back("b" + std::to_string(b));
      tgt_domain.push_back("q" + std::to_string(b));
    }
    src_vars.push_back({"attr" + std::to_string(a), src_domain});
    tgt_vars.push_back({"attr" + std::to_string(a) + "_t", tgt_domain});
  }
  const Schema source_schema(src_vars);
  const Schema target_schema(tgt_vars);

  // Source model: singletons everywhere plus a pairwise chain, weights
  // moderate so no configuration becomes effectively deterministic.
  Rng model_rng(derive_seed(spec.seed, kStreamModel));
  std::vector<Feature> features;
  for (std::uint32_t a = 0; a < spec.n_attributes; ++a)
    for (std::uint32_t b = 0; b < k; ++b)
      features.push_back(Feature({{a, b}}, 0.6 * (2.0 * model_rng.uniform() - 1.0)));
  for (std::uint32_t a = 0; a + 1 < spec.n_attributes; ++a)
    for (std::uint32_t b1 = 0; b1 < k; ++b1)
      for (std::uint32_t b2 = 0; b2 < k; ++b2)
        features.push_back(
            Feature({{a, b1}, {a + 1, b2}}, 1.2 * (2.0 * model_rng.uniform() - 1.0)));
  LogLinearModel source_model(source_schema, std::move(features));

  // Per-attribute correspondence tables. With granularity mismatch the
  // target re-bins [0,1): overlap of equal-width source bins with randomly
  // shifted target cuts. Without it, a random value permutation.
  Rng map_rng(derive_seed(spec.seed, kStreamMapping));
  std::vector<Correspondence> corrs, clean_corrs;
  for (std::uint32_t a = 0; a < spec.n_attributes; ++a) {
    std::vector<double> table(static_cast<std::size_t>(k) * k, 0.0);
    if (spec.granularity_mismatch) {
      // Target cuts: source cuts jittered within their cells, kept sorted.
      std::vector<double> cuts(k + 1, 0.0);
      cuts[k] = 1.0;
      for (std::uint32_t c = 1; c < k; ++c)
        cuts[c] = (static_cast<double>(c) - 0.45 + 0.9 * map_rng.uniform()) /
                  static_cast<double>(k);
      std::sort(cuts.begin(), cuts.end());
      for (std::uint32_t i = 0; i < k; ++i) {
        const double lo = static_cast<double>(i) / k;
        const double hi = static_cast<double>(i + 1) / k;
        for (std::uint32_t j = 0; j < k; ++j) {
          const double overlap =
              std::max(0.0, std::min(hi, cuts[j + 1]) - std::max(lo, cuts[j]));
          table[static_cast<std::size_t>(i) * k + j] = overlap * k;
        }
      }
    } else {
      std::vector<std::uint32_t> perm(k);
      std::iota(perm.begin(), perm.end(), 0u);
      for (std::uint32_t i = k - 1; i > 0; --i)
        std::swap(perm[i], perm[map_rng.uniform_int(static_cast<int>(i) + 1)]);
      for (std::uint32_t i = 0; i < k; ++i)
        table[static_cast<std::size_t>(i) * k + perm[i]] = 1.0;
    }
    // The clean table is how the domains really relate; the noisy blend is
    // the imperfect mapping handed to the translation methods. Target data
    // is drawn from the clean-mapping distribution, so noise degrades the
    // knowledge without touching the ground truth.
    clean_corrs.push_back({{a}, {a}, table});
    if (spec.mapping_noise > 0.0) {
      for (std::uint32_t i = 0; i < k; ++i)
        for (std::uint32_t j = 0; j < k; ++j)
          table[static_cast<std::size_t>(i) * k + j] =
              (1.0 - spec.mapping_noise) * table[static_cast<std::size_t>(i) * k + j] +
              spec.mapping_noise / static_cast<double>(k);
    }
    corrs.push_back({{a}, {a}, std::move(table)});
  }
  Mapping mapping(source_schema, target_schema, std::move(corrs));
  const Mapping clean_mapping(source_schema, target_schema,
                              std::move(clean_corrs));

  SyntheticTask task;
  task.source_model = std::move(source_model);
  task.mapping = std::move(mapping);
  task.implied_target = brute_implied(task.source_model, task.mapping);
  task.true_target = brute_implied(task.source_model, clean_mapping);

  const std::vector<double> src_table = exact_distribution(task.source_model);
  task.source_train =
      draw_iid(source_schema, src_table, spec.n_source_train,
               derive_seed(spec.seed, kStreamSourceTrain), "source_train");
  task.source_test =
      draw_iid(source_schema, src_table, spec.n_source_test,
               derive_seed(spec.seed, kStreamSourceTest), "source_test");
  task.target_train =
      draw_iid(target_schema, task.true_target, spec.n_target_train,
               derive_seed(spec.seed, kStreamTargetTrain), "target_train");
  task.target_test =
      draw_iid(target_schema, task.true_target, spec.n_target_test,
               derive_seed(spec.seed, kStreamTargetTest), "target_test");

  // Manual structure: the true source cliques carried across the
  // attribute-wise mapping (index-identical here).
  std::vector<Clique> cliques = structure_to_cliques(task.source_model, 0.0);
  task.manual_structure = expand_cliques(cliques, target_schema);
  return task;
}

RelationalTask make_relational_task(const RelationalSpec& spec) {
  if (spec.mapping_noise < 0.0 || spec.mapping_noise > 0.5)
    throw ContractError("make_relational_task: noise must be in [0, 0.5]");

  RelationalTask task;
  task.source_schema = RelationalSchema(
      {"student", "prof", "course"},
      {{"Teaches", {"prof", "course"}},
       {"Tas", {"student", "course"}},
       {"AdvisedBy", {"student", "prof"}},
       {"Grad", {"student"}}});
  task.target_schema = RelationalSchema(
      {"student", "prof", "course"},
      {{"Instructor", {"prof", "course"}},
       {"Assists", {"student", "course"}},
       {"WorksWith", {"student", "prof"}},
       {"Senior", {"student"}}});

  Rng rng(derive_seed(spec.seed, kStreamModel));
  auto w = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  const auto s = fo::var("s", "student");
  const auto p = fo::var("p", "prof");
  const auto c = fo::var("c", "course");
  auto atom = [](const char* pred, std::vector<fo::Term> args) {
    return fo::Atom{pred, std::move(args)};
  };
  task.source_mln = {
      // Sparsity priors on every predicate.
      {{{atom("Teaches", {p, c}), false}}, w(-1.2, -0.4)},
      {{{atom("Tas", {s, c}), false}}, w(-1.2, -0.4)},
      {{{atom("AdvisedBy", {s, p}), false}}, w(-1.2, -0.4)},
      {{{atom("Grad", {s}), false}}, w(-0.8, 0.2)},
      // A TA in a professor's course tends to be advised by them.
      {{{atom("Teaches", {p, c}), false},
        {atom("Tas", {s, c}), false},
        {atom("AdvisedBy", {s, p}), false}},
       w(0.8, 1.6)},
      // Advisees tend to be grad students.
      {{{atom("AdvisedBy", {s, p}), false}, {atom("Grad", {s}), false}},
       w(0.6, 1.4)},
  };

  // Per-predicate noisy-identity correspondences.
  const char* pairs[4][2] = {{"Teaches", "Instructor"},
                             {"Tas", "Assists"},
                             {"AdvisedBy", "WorksWith"},
                             {"Grad", "Senior"}};
  // The clean mapping is predicate renaming; the methods get a noisy blend
  // of it, mirroring the propositional generator: data reflects the clean
  // relationship, knowledge passes through the noisy one.
  RelationalMapping clean_mapping;
  task.mapping.source = clean_mapping.source = task.source_schema;
  task.mapping.target = clean_mapping.target = task.target_schema;
  for (const auto& [src_pred, tgt_pred] : pairs) {
    FoCorrespondence fc;
    fc.source_atoms = {task.source_schema.atom(src_pred)};
    fc.target_atoms = {task.target_schema.atom(tgt_pred)};
    fc.table = {1.0, 0.0, 0.0, 1.0};
    clean_mapping.correspondences.push_back(fc);
    const double flip0 = spec.mapping_noise * (0.6 + 0.8 * rng.uniform());
    const double flip1 = spec.mapping_noise * (0.6 + 0.8 * rng.uniform());
    fc.table = {1.0 - flip0, flip0, flip1, 1.0 - flip1};
    task.mapping.correspondences.push_back(std::move(fc));
  }

  // Seeded training-database sizes drive the constants heuristic.
  Rng size_rng(derive_seed(spec.seed, kStreamSizes));
  for (std::uint32_t d = 0; d < 4; ++d)
    task.train_db_sizes.push_back(
        {{"student", static_cast<std::uint32_t>(3 + size_rng.uniform_int(4))},
         {"prof", static_cast<std::uint32_t>(1 + size_rng.uniform_int(2))},
         {"course", static_cast<std::uint32_t>(2 + size_rng.uniform_int(2))}});
  task.sizes = constants_heuristic(task.train_db_sizes, spec.scalar);

  task.source_grounding = ground(task.source_schema, task.source_mln, task.sizes);
  task.target_grounding = ground(task.target_schema, {}, task.sizes);
  task.ground_mapping = expand_mapping(task.mapping, task.sizes);

  // Ground-truth target structure: the source structure pushed through the
  // (per-predicate) mapping, grounded at the task sizes, duplicates merged.
  const std::vector<FirstOrderFeature> translated =
      translate_structure_fo(task.source_mln, task.mapping, 0.0);
  const Grounding manual =
      ground(task.target_schema, translated, task.sizes);
  std::set<std::vector<Literal>> seen;
  for (const Feature& f : manual.model.features())
    if (seen.insert(f.literals()).second)
      task.manual_structure.features.push_back(f.with_weight(0.0));

  // Databases: Gibbs over the source ground model; targets drawn through
  // the clean ground mapping, which is exactly an implied-distribution
  // (Eq. 1) draw from the true relationship.
  const Mapping clean_ground = expand_mapping(clean_mapping, task.sizes);
  auto draw_dbs = [&](std::uint32_t n, std::uint64_t stream, const char* component) {
    SamplerConfig sc;
    sc.n_samples = n;
    sc.seed = derive_seed(spec.seed, stream);
    Dataset src = gibbs_sample(task.source_grounding.model, sc);
    Dataset tgt;
    tgt.schema = clean_ground.target_schema();
    Rng trng(derive_seed(sc.seed, 0x7472616e));
    for (const Assignment& x : src.instances)
      tgt.instances.push_back(
          sample_target_given_source(clean_ground, x, trng));
    tgt.provenance = {{"format_version", 1},
                      {"generator", "relational-implied"},
                      {"component", component},
                      {"seed", sc.seed},
                      {"n_samples", n}};
    src.provenance["component"] = std::string(component) + "_source";
    return std::make_pair(std::move(src), std::move(tgt));
  };
  auto [src_train, tgt_train] =
      draw_dbs(spec.n_train_dbs, kStreamTargetTrain, "train");
  auto [src_test, tgt_test] =
      draw_dbs(spec.n_test_dbs, kStreamTargetTest, "test");
  task.source_train = std::move(src_train);
  task.target_train = std::move(tgt_train);
  task.source_test = std::move(src_test);
  task.target_test = std::move(tgt_test);
  return task;
}

}  // namespace kt
