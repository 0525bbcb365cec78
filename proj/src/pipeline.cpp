#include "advrisk/pipeline.hpp"

namespace advrisk {

PipelineResult run_pipeline(const GroundSet& g, const TwoClassMeasure& mu,
                            const PrimalConfig& primal_config, const DualConfig& dual_config,
                            std::span<const LossKind> losses) {
  PipelineResult out;
  out.primal = solve_exp_primal(g, mu, primal_config);
  out.eta = eta_hat(out.primal.f);
  out.dual = solve_dual(Loss{LossKind::kExponential}, g, mu, dual_config, &out.primal.f);
  out.losses.assign(losses.begin(), losses.end());
  for (LossKind kind : losses) out.fields.push_back(universal_field(Loss{kind}, out.eta));
  out.certificates = universality_check(out.eta, out.dual, losses, g, mu);
  return out;
}

}  // namespace advrisk
