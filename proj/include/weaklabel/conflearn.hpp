#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "weaklabel/image.hpp"

namespace weaklabel {

/// What happens to the trust of a pixel flagged as mislabeled.
enum class TrustRefinement {
  set_delta,  ///< replace it with ClgrConfig::delta
  keep,       ///< leave the trust map untouched ("static")
};

struct ClgrConfig {
  double keep_fraction = 0.8;
  double trust_gate = 0.8;
  double delta = 1.0;
  TrustRefinement trust_mode = TrustRefinement::set_delta;

  void validate() const;
  bool operator==(const ClgrConfig&) const = default;
};

/// Per-class mean self-probability. Empty for classes nobody is labeled with.
struct ClassThresholds {
  std::vector<std::optional<double>> t;
};

/// Confusion counts between given and latent labels, their row-calibrated
/// version and the normalized joint. Matrices are row-major m x m with rows
/// indexed by the given label.
struct JointEstimate {
  int num_classes = 0;
  std::vector<std::uint64_t> confusion;
  std::vector<double> calibrated;
  std::vector<double> joint;

  std::uint64_t c(int i, int j) const { return confusion[static_cast<std::size_t>(i) * num_classes + j]; }
  double c_tilde(int i, int j) const { return calibrated[static_cast<std::size_t>(i) * num_classes + j]; }
  double q(int i, int j) const { return joint[static_cast<std::size_t>(i) * num_classes + j]; }
};

/// One bit per pixel: 1 marks a pixel judged mislabeled.
class ErrorMap {
 public:
  ErrorMap(int width, int height, std::vector<std::uint8_t> bits);
  ErrorMap(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const;
  /// As a two-class label map (0 = kept, 1 = flagged).
  LabelMap as_label_map() const;

  bool operator==(const ErrorMap&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

ClassThresholds class_thresholds(const ProbMap& probs, const LabelMap& labels);

/// Counts each pixel labeled i under the latent class j with the largest
/// probability among classes whose probability reaches their threshold.
/// Pixels that reach no threshold are not counted. Only `confusion` is set.
JointEstimate confusion(const ProbMap& probs, const LabelMap& labels, const ClassThresholds& t);

/// Rescales each confusion row to the number of pixels carrying that label
/// and normalizes to a joint distribution. Throws DegenerateJoint when the
/// confusion matrix is all zero.
JointEstimate calibrate_and_joint(const JointEstimate& est, const LabelMap& labels);

/// Prune-by-noise-rate: for every off-diagonal (i, j), the round(n * Q[i][j])
/// pixels labeled i with the highest probability of class j. Sorted, unique.
std::vector<std::size_t> pbnr_candidates(const ProbMap& probs, const LabelMap& labels,
                                         const JointEstimate& joint);

struct ErrorEstimate {
  JointEstimate joint;
  ErrorMap errors;
};

/// Full estimate: thresholds, joint, PBNR candidates, then the candidates
/// with the lowest self-confidence (keep_fraction of them) together with
/// every candidate whose trust is below trust_gate.
ErrorEstimate estimate_errors(const ProbMap& probs, const LabelMap& labels, const TrustMap& trust,
                              const ClgrConfig& cfg = {});

ErrorMap estimate_error_map(const ProbMap& probs, const LabelMap& labels, const TrustMap& trust,
                            const ClgrConfig& cfg = {});

/// Flagged pixels take the predicted argmax (ties to the smaller id).
LabelMap refine_labels(const LabelMap& pseudo, const ProbMap& probs, const ErrorMap& err);

TrustMap refine_trust(const TrustMap& trust, const ErrorMap& err, const ClgrConfig& cfg = {});

}  // namespace weaklabel
