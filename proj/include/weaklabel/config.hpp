#pragma once

#include <string>
#include <string_view>

#include "weaklabel/conflearn.hpp"
#include "weaklabel/mtmath.hpp"
#include "weaklabel/sgplg.hpp"
#include "weaklabel/superpixel.hpp"

namespace weaklabel {

/// Every tunable of the toolkit. Defaults are the reference settings:
/// thresholds 0.6 (IRF/SRF) and 0.5 (PED), 13-pixel blocks, delta 1, 80%
/// self-confidence keep, 0.8 trust gate, alpha = beta = 1, EMA 0.99,
/// w_max 0.1.
struct PipelineConfig {
  SlicParams slic;
  SgplgConfig sgplg;
  ClgrConfig clglr;
  LossWeights loss;

  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

/// Pretty-printed JSON with sections slic / sgplg / clglr / loss.
std::string config_to_json(const PipelineConfig& cfg);

/// Applies a partial JSON document on top of `base`. Unknown keys, wrong
/// types and out-of-range values raise ConfigError; `base` is untouched then.
PipelineConfig merge_config(const PipelineConfig& base, std::string_view patch_json);

PipelineConfig load_config_file(const std::string& path);

}  // namespace weaklabel
