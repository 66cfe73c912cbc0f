#pragma once

#include <cstdint>
#include <vector>

#include "weaklabel/image.hpp"
#include "weaklabel/superpixel.hpp"

namespace weaklabel {

/// How far a grown block is from the seed it was reached from.
enum class TrustDistance {
  hops,      ///< breadth-first hop count through the adjacency graph
  centroid,  ///< centroid Euclidean distance in units of the mean block side
};

/// Similarity never exceeds 1, so thresholds in (1, 1.1] switch growth off.
inline constexpr double kMaxSimilarityThreshold = 1.1;

/// Superpixel-guided pseudo-label generation settings.
struct SgplgConfig {
  double threshold_srf_irf = 0.6;
  double threshold_ped = 0.5;
  double trust_init = 0.5;
  double trust_seed = 1.0;
  double decay_per_hop = 0.05;
  TrustDistance distance = TrustDistance::hops;

  /// Similarity threshold applied when growing `cls`.
  double threshold_for(int cls) const noexcept {
    return cls == kPED ? threshold_ped : threshold_srf_irf;
  }
  /// Throws ConfigError on out-of-range values.
  void validate() const;

  bool operator==(const SgplgConfig&) const = default;
};

/// Block-level labels. Vectors are indexed by block id; index 0 is unused.
struct SuperpixelLabels {
  int num_classes = kNumFluidClasses;
  std::vector<std::uint8_t> labels;
  /// Growth distance from the originating seed; -1 for unlabeled blocks.
  std::vector<int> hop_distance;
  /// Seed block each labeled block was reached from (itself for seeds).
  std::vector<int> origin;

  int num_blocks() const noexcept { return static_cast<int>(labels.size()) - 1; }
  bool is_seed(int k) const noexcept { return hop_distance[k] == 0; }
  bool operator==(const SuperpixelLabels&) const = default;
};

/// A block takes class c when any of its pixels is annotated c. Throws
/// SeedConflict if one block holds two different nonzero classes.
SuperpixelLabels seed_superpixel_labels(const LabelMap& points, const SuperpixelMap& map);

/// Breadth-first growth from every seed block. Seeds are expanded class by
/// class (1, 2, 3, ...) and by ascending block id within a class. A candidate
/// neighbor of a frontier block joins when it is still unlabeled and its
/// histogram similarity to that frontier block reaches the class threshold.
/// PED only grows into neighbors whose centroid lies above the frontier block.
SuperpixelLabels grow(const GrayImage& image, const SuperpixelMap& map,
                      const AdjacencyGraph& graph, const SuperpixelLabels& seeds,
                      const SgplgConfig& cfg = {});

LabelMap to_pixel_labels(const SuperpixelLabels& grown, const SuperpixelMap& map);

/// max(seed_trust - 0.1 * distance / 2, 0) for the default decay of 0.05.
double trust_value(double distance, double seed_trust = 1.0, double decay_per_hop = 0.05);

TrustMap build_trust_map(const SuperpixelLabels& grown, const SuperpixelMap& map,
                         const SgplgConfig& cfg = {});

struct PseudoLabels {
  LabelMap labels;
  TrustMap trust;
  SuperpixelMap superpixels;
};

/// slic -> rasterize -> seed -> grow -> pixel labels + trust map.
PseudoLabels generate(const GrayImage& image, const PointAnnotationSet& points,
                      const SgplgConfig& cfg = {}, const SlicParams& slic_params = {});

/// Same pipeline over a precomputed superpixel map.
PseudoLabels generate(const GrayImage& image, const SuperpixelMap& superpixels,
                      const PointAnnotationSet& points, const SgplgConfig& cfg = {});

}  // namespace weaklabel
