#include "hateprobe/strategy.hpp"

#include <string>

#include "hateprobe/error.hpp"

namespace hateprobe {

namespace {

using M = AugmentMode;

constexpr std::array<StrategyFlags, 10> kStrategies = {{
    {false, M::kNone, M::kNone},
    {true, M::kNone, M::kNone},
    {false, M::kOutput, M::kNone},
    {false, M::kInput, M::kNone},
    {false, M::kNone, M::kOutput},
    {false, M::kNone, M::kInput},
    {true, M::kOutput, M::kNone},
    {true, M::kInput, M::kNone},
    {true, M::kNone, M::kOutput},
    {true, M::kNone, M::kInput},
}};

constexpr std::array<std::string_view, 10> kNames = {
    "vanilla", "defn",         "exp_out",     "exp_in",       "tar_out",
    "tar_in",  "defn_exp_out", "defn_exp_in", "defn_tar_out", "defn_tar_in",
};

}  // namespace

bool is_well_formed(const StrategyFlags& flags) {
  return flags.explanation_mode == M::kNone || flags.target_mode == M::kNone;
}

const std::array<StrategyFlags, 10>& all_strategies() { return kStrategies; }

std::string_view strategy_name(const StrategyFlags& flags) {
  for (std::size_t i = 0; i < kStrategies.size(); ++i) {
    if (kStrategies[i] == flags) return kNames[i];
  }
  throw StrategyError("explanation and target augmentation cannot be combined");
}

StrategyFlags parse_strategy(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kStrategies[i];
  }
  throw StrategyError("unknown strategy '" + std::string(name) + "'");
}

void validate_for(const StrategyFlags& flags, const DatasetSchema& schema) {
  if (!is_well_formed(flags)) {
    throw StrategyError("explanation and target augmentation cannot be combined");
  }
  if (flags.target_mode != M::kNone && !schema.has_targets) {
    throw StrategyError("targets unavailable for this dataset (" + std::string(to_string(schema.name)) +
                        "); strategy " + std::string(strategy_name(flags)) + " cannot run");
  }
}

bool is_valid_for(const StrategyFlags& flags, const DatasetSchema& schema) {
  return is_well_formed(flags) && (flags.target_mode == M::kNone || schema.has_targets);
}

}  // namespace hateprobe
