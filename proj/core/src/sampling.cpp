#include "kt/sampling.hpp"

#include "kt/conditionals.hpp"
#include "kt/error.hpp"

namespace kt {

Dataset gibbs_sample(const LogLinearModel& model, const SamplerConfig& cfg) {
  if (cfg.thin == 0) throw ContractError("gibbs_sample: thin must be positive");
  if (model.schema().empty())
    throw ContractError("gibbs_sample: model schema has no variables");
  const Schema& schema = model.schema();
  LocalConditionals lc(schema, model.features());
  Rng rng(derive_seed(cfg.seed, 0x67696262));  // chain stream

  Assignment state(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j)
    state[j] = rng.uniform_int(static_cast<int>(schema.var(j).domain.size()));

  std::vector<double> logits(lc.max_domain_size());
  auto sweep = [&] {
    for (std::uint32_t j = 0; j < schema.size(); ++j) {
      std::span<double> l(logits.data(), lc.domain_size(j));
      lc.local_logits(state, j, l);
      state[j] = rng.categorical_logits(l);
    }
  };

  for (std::uint64_t s = 0; s < cfg.burn_in; ++s) sweep();

  Dataset out;
  out.schema = schema;
  out.instances.reserve(cfg.n_samples);
  for (std::uint64_t k = 0; k < cfg.n_samples; ++k) {
    for (std::uint64_t s = 0; s < cfg.thin; ++s) sweep();
    out.instances.push_back(state);
  }
  out.provenance = {{"format_version", 1},
                    {"generator", "gibbs"},
                    {"seed", cfg.seed},
                    {"burn_in", cfg.burn_in},
                    {"thin", cfg.thin},
                    {"n_samples", cfg.n_samples}};
  return out;
}

Assignment sample_target_given_source(const Mapping& m,
                                      const Assignment& source_instance,
                                      Rng& rng) {
  if (source_instance.size() != m.source_schema().size())
    throw ContractError("sample_target_given_source: incomplete source instance");
  const Schema& tgt = m.target_schema();
  Assignment target(tgt.size(), -1);

  for (const Correspondence& c : m.correspondences()) {
    const std::uint64_t row = c.row_of(source_instance, m.source_schema());
    const std::uint64_t cols = c.col_count(tgt);
    if ((row + 1) * cols > c.table.size())
      throw ContractError("sample_target_given_source: missing table row");
    std::span<const double> dist(c.table.data() + row * cols, cols);
    std::uint64_t col = static_cast<std::uint64_t>(rng.categorical(dist));
    for (std::size_t i = c.target_vars.size(); i-- > 0;) {
      const std::uint32_t v = c.target_vars[i];
      const std::uint64_t d = tgt.var(v).domain.size();
      target[v] = static_cast<std::int32_t>(col % d);
      col /= d;
    }
  }
  for (std::uint32_t v = 0; v < tgt.size(); ++v)
    if (target[v] < 0)
      target[v] = rng.uniform_int(static_cast<int>(tgt.var(v).domain.size()));
  return target;
}

Dataset translate_dataset(const Mapping& m, const Dataset& source_data,
                          std::uint64_t n_total, std::uint64_t seed) {
  if (source_data.instances.empty())
    throw ContractError("translate_dataset: empty source dataset");
  if (!(source_data.schema == m.source_schema()))
    throw ContractError("translate_dataset: dataset schema does not match mapping");

  const std::uint64_t n_source = source_data.instances.size();
  const std::uint64_t per_instance = (n_total + n_source - 1) / n_source;

  Dataset out;
  out.schema = m.target_schema();
  out.instances.reserve(n_total);
  for (std::uint64_t i = 0; i < n_source && out.instances.size() < n_total; ++i) {
    Rng rng(derive_seed(seed, i));
    for (std::uint64_t k = 0; k < per_instance && out.instances.size() < n_total; ++k)
      out.instances.push_back(
          sample_target_given_source(m, source_data.instances[i], rng));
  }
  out.provenance = {{"format_version", 1},
                    {"generator", "D_S-translation"},
                    {"seed", seed},
                    {"n_total", n_total},
                    {"n_source_instances", n_source},
                    {"draws_per_instance", per_instance}};
  return out;
}

}  // namespace kt
