#pragma once

#include <cstdint>
#include <vector>

#include "kt/learning.hpp"
#include "kt/mapping.hpp"
#include "kt/model.hpp"
#include "kt/relational.hpp"

namespace kt {

/// NBA-shaped propositional task: a handful of discretized attributes whose
/// source and target schemas bin the same quantities differently.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::uint32_t n_attributes = 4;
  std::uint32_t n_bins = 5;
  /// Target bins are a random repartition of [0,1] (equal-width source bins
  /// vs shifted cuts). Off: target bins are a value permutation.
  bool granularity_mismatch = true;
  /// Mixes each correspondence row toward uniform: (1-noise)*row + noise/k.
  double mapping_noise = 0.0;
  std::uint32_t n_source_train = 1000;
  std::uint32_t n_source_test = 500;
  std::uint32_t n_target_train = 1000;
  std::uint32_t n_target_test = 500;
};

struct SyntheticTask {
  LogLinearModel source_model;
  /// The mapping handed to the translation methods. With nonzero
  /// mapping_noise its tables are a noisy blend of the clean relationship,
  /// so the knowledge is an imperfect description of the target domain.
  Mapping mapping;
  Dataset source_train, source_test;  // i.i.d. exact draws from the source
  Dataset target_train, target_test;  // i.i.d. exact draws from true_target
  /// Distribution the mapping + source model imply, AssignmentSpace order
  /// (generator side; tests recompute it independently).
  std::vector<double> implied_target;
  /// Distribution the target data is actually drawn from: the source model
  /// pushed through the clean (noise-free) relationship. Equal to
  /// implied_target when mapping_noise is 0.
  std::vector<double> true_target;
  /// Ground-truth target cliques expanded to features ("manual" structure).
  Structure manual_structure;
};

SyntheticTask make_synthetic_task(const SyntheticSpec& spec);

/// University-shaped relational task: 3 types, 4 source and 4 target
/// predicates, per-predicate noisy correspondences, domain sizes from the
/// constants heuristic over seeded training databases.
struct RelationalSpec {
  std::uint64_t seed = 1;
  double mapping_noise = 0.1;
  double scalar = 0.5;  // constants heuristic multiplier
  std::uint32_t n_train_dbs = 40;
  std::uint32_t n_test_dbs = 10;
};

struct RelationalTask {
  RelationalSchema source_schema, target_schema;
  std::vector<FirstOrderFeature> source_mln;
  RelationalMapping mapping;
  std::vector<DomainSizes> train_db_sizes;
  DomainSizes sizes;  // constants_heuristic(train_db_sizes, scalar)
  Grounding source_grounding, target_grounding;
  Mapping ground_mapping;  // expand_mapping at `sizes`
  Dataset source_train, source_test;  // sampled source databases
  Dataset target_train, target_test;  // implied-distribution databases
  /// Ground features of the FO-translated source structure; the task's
  /// "expert" structure for the MS methods.
  Structure manual_structure;
};

RelationalTask make_relational_task(const RelationalSpec& spec);

}  // namespace kt
