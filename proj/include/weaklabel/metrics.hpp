#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "weaklabel/image.hpp"

namespace weaklabel {

/// Per-class pixel tallies; poolable across images with +=.
struct OverlapCounts {
  int num_classes = 0;
  std::vector<std::uint64_t> pred;
  std::vector<std::uint64_t> truth;
  std::vector<std::uint64_t> intersection;

  OverlapCounts& operator+=(const OverlapCounts& other);
};

/// Overlap scores. A class absent from both maps scores 1 and is left out
/// of the means. `mean_dice` averages the foreground classes (1..C-1) only;
/// `mean_iou` averages every present class including background.
struct SegScores {
  std::vector<double> dice_per_class;
  std::vector<double> iou_per_class;
  std::vector<bool> present;
  double mean_dice = 1.0;
  double mean_iou = 1.0;
};

OverlapCounts overlap_counts(const LabelMap& pred, const LabelMap& gt);

SegScores scores_from_counts(const OverlapCounts& counts);

/// Dice and IoU for one pair of maps.
SegScores dice(const LabelMap& pred, const LabelMap& gt);
SegScores miou(const LabelMap& pred, const LabelMap& gt);

/// Per-image averaging: each class score is averaged over the images where
/// that class is present, and the means over images.
SegScores average_scores(std::span<const SegScores> per_image);

}  // namespace weaklabel
