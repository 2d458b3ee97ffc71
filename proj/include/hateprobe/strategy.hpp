#pragma once

#include <array>
#include <string_view>

#include "hateprobe/schema.hpp"

namespace hateprobe {

enum class AugmentMode { kNone, kInput, kOutput };

// Which augmentations a prompt carries. Definitions combine with at most one
// of explanation / target, never both.
struct StrategyFlags {
  bool use_definition = false;
  AugmentMode explanation_mode = AugmentMode::kNone;
  AugmentMode target_mode = AugmentMode::kNone;

  bool operator==(const StrategyFlags&) const = default;

  bool has_output_mode() const {
    return explanation_mode == AugmentMode::kOutput || target_mode == AugmentMode::kOutput;
  }
  bool has_input_mode() const {
    return explanation_mode == AugmentMode::kInput || target_mode == AugmentMode::kInput;
  }
};

bool is_well_formed(const StrategyFlags& flags);

// The ten strategies in canonical order: vanilla, defn, exp_out, exp_in,
// tar_out, tar_in, defn_exp_out, defn_exp_in, defn_tar_out, defn_tar_in.
const std::array<StrategyFlags, 10>& all_strategies();

std::string_view strategy_name(const StrategyFlags& flags);
// Throws StrategyError for unknown names.
StrategyFlags parse_strategy(std::string_view name);

// Throws StrategyError when the strategy needs something the dataset lacks
// (target modes on a schema without targets).
void validate_for(const StrategyFlags& flags, const DatasetSchema& schema);
bool is_valid_for(const StrategyFlags& flags, const DatasetSchema& schema);

}  // namespace hateprobe
