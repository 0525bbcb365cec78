#pragma once

#include <span>
#include <vector>

#include "advrisk/certify.hpp"
#include "advrisk/dualsolve.hpp"
#include "advrisk/primalsolve.hpp"

namespace advrisk {

// Exponential primal, eta-hat, exponential dual, and one certificate per
// requested loss built from the shared dual masses.
struct PipelineResult {
  PrimalSolution primal;
  EtaField eta;
  DualSolution dual;
  std::vector<LossKind> losses;
  std::vector<Field> fields;  // universal_field per loss
  std::vector<Certificate> certificates;
};

PipelineResult run_pipeline(const GroundSet& g, const TwoClassMeasure& mu,
                            const PrimalConfig& primal_config, const DualConfig& dual_config,
                            std::span<const LossKind> losses);

}  // namespace advrisk
