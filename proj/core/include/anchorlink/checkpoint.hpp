#pragma once

#include <optional>
#include <string>

#include "anchorlink/trainer.hpp"

namespace anchorlink {

/// Versioned JSON snapshot of model parameters, optimizer state and the
/// training position, with a shape header so loads are validated.
struct Checkpoint {
  ModelParams params;
  std::optional<AdamState> adam;
  ThetaKind theta_kind = ThetaKind::CosineScalar;
  std::vector<double> loss_history;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

Checkpoint load_checkpoint(const std::string& path);

std::string theta_kind_name(ThetaKind kind);
ThetaKind theta_kind_from_name(const std::string& name);

std::string strategy_name(SamplingStrategy strategy);
SamplingStrategy strategy_from_name(const std::string& name);

}  // namespace anchorlink
