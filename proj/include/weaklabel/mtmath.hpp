#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "weaklabel/image.hpp"

namespace weaklabel {

/// Flat model parameters (student or teacher weights).
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<float> values);

  std::size_t size() const noexcept { return values_.size(); }
  float operator[](std::size_t i) const { return values_[i]; }
  std::span<const float> values() const noexcept { return values_; }
  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<float> values_;
};

struct LossWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double w_max = 0.1;
  double t_max = 30000.0;
  double ema_decay = 0.99;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

/// Teacher update: decay * teacher + (1 - decay) * student.
ParamVector ema_update(const ParamVector& teacher, const ParamVector& student, double decay);

/// Adds N(0, sigma) noise per pixel, rounds and clamps to [0,255].
GrayImage perturb(const GrayImage& image, double sigma, std::uint64_t seed);

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kDiceSmooth = 1e-5;

/// Mean over pixels of weight * -log(p_target), p clamped at 1e-7.
double weighted_ce(const ProbMap& probs, const LabelMap& target, const TrustMap& weights);

/// Unweighted mean cross-entropy.
double cross_entropy(const ProbMap& probs, const LabelMap& target);

/// One minus the per-class mean soft Dice.
double dice_loss(const ProbMap& probs, const LabelMap& target);

/// Mean squared difference over every pixel-class entry.
double consistency_mse(const ProbMap& student, const ProbMap& teacher);

/// Gaussian ramp-up w_max * exp(-5 (1 - t/t_max)^2); w_max once t >= t_max.
double ramp_weight(double t, const LossWeights& cfg);

double total_loss(double l_f, double l_p, double l_con, double t, const LossWeights& cfg);

/// Pairwise (cascade) summation; fixed association order.
double pairwise_sum(std::span<const double> values);

}  // namespace weaklabel
