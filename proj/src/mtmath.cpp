#include "weaklabel/mtmath.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "weaklabel/error.hpp"

namespace weaklabel {

ParamVector::ParamVector(std::vector<float> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("parameter " + std::to_string(i) + " is not finite");
    }
  }
}

void LossWeights::validate() const {
  auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!nonneg(alpha)) throw ConfigError("alpha must be finite and >= 0");
  if (!nonneg(beta)) throw ConfigError("beta must be finite and >= 0");
  if (!nonneg(w_max)) throw ConfigError("w_max must be finite and >= 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be finite and > 0");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw ConfigError("ema_decay must lie in [0,1)");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ParamVector ema_update(const ParamVector& teacher, const ParamVector& student, double decay) {
  if (teacher.size() != student.size()) {
    throw DimensionMismatch("teacher has " + std::to_string(teacher.size()) +
                            " parameters, student " + std::to_string(student.size()));
  }
  if (!(decay >= 0.0 && decay <= 1.0)) throw ConfigError("EMA decay must lie in [0,1]");
  std::vector<float> out(teacher.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<float>(decay * teacher[k] + (1.0 - decay) * student[k]);
  }
  return ParamVector(std::move(out));
}

GrayImage perturb(const GrayImage& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be >= 0");
  if (sigma == 0.0) return image;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<std::uint8_t> out(image.pixel_count());
  const auto in = image.data();
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double v = std::round(static_cast<double>(in[p]) + noise(rng));
    out[p] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return GrayImage(image.width(), image.height(), std::move(out));
}

namespace {

void require_same(const ProbMap& probs, const LabelMap& target) {
  if (probs.width() != target.width() || probs.height() != target.height()) {
    throw DimensionMismatch("probability and target maps differ in size");
  }
  if (probs.num_classes() != target.num_classes()) {
    throw DimensionMismatch("probability and target maps differ in class count");
  }
}

double neg_log(float p) { return -std::log(std::max(static_cast<double>(p), kProbClamp)); }

}  // namespace

double weighted_ce(const ProbMap& probs, const LabelMap& target, const TrustMap& weights) {
  require_same(probs, target);
  if (weights.width() != target.width() || weights.height() != target.height()) {
    throw DimensionMismatch("trust weights and target differ in size");
  }
  const std::size_t n = target.pixel_count();
  std::vector<double> terms(n);
  for (std::size_t p = 0; p < n; ++p) {
    terms[p] = static_cast<double>(weights[p]) * neg_log(probs.prob(target[p], p));
  }
  return pairwise_sum(terms) / static_cast<double>(n);
}

double cross_entropy(const ProbMap& probs, const LabelMap& target) {
  require_same(probs, target);
  const std::size_t n = target.pixel_count();
  std::vector<double> terms(n);
  for (std::size_t p = 0; p < n; ++p) terms[p] = neg_log(probs.prob(target[p], p));
  return pairwise_sum(terms) / static_cast<double>(n);
}

double dice_loss(const ProbMap& probs, const LabelMap& target) {
  require_same(probs, target);
  const std::size_t n = target.pixel_count();
  const int m = probs.num_classes();
  std::vector<double> inter(n), mass(n), scores(m);
  for (int c = 0; c < m; ++c) {
    double truth = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double pc = probs.prob(c, p);
      const bool hit = target[p] == c;
      inter[p] = hit ? pc : 0.0;
      mass[p] = pc;
      truth += hit ? 1.0 : 0.0;
    }
    scores[c] = (2.0 * pairwise_sum(inter) + kDiceSmooth) / (pairwise_sum(mass) + truth + kDiceSmooth);
  }
  return 1.0 - pairwise_sum(scores) / static_cast<double>(m);
}

double consistency_mse(const ProbMap& student, const ProbMap& teacher) {
  if (student.width() != teacher.width() || student.height() != teacher.height() ||
      student.num_classes() != teacher.num_classes()) {
    throw DimensionMismatch("student and teacher probability maps differ in shape");
  }
  const auto s = student.data();
  const auto t = teacher.data();
  std::vector<double> sq(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double d = static_cast<double>(s[k]) - static_cast<double>(t[k]);
    sq[k] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(sq.size());
}

double ramp_weight(double t, const LossWeights& cfg) {
  cfg.validate();
  if (!(t >= 0.0)) throw ConfigError("ramp iteration must be >= 0");
  if (t >= cfg.t_max) return cfg.w_max;
  const double phase = 1.0 - t / cfg.t_max;
  return cfg.w_max * std::exp(-5.0 * phase * phase);
}

double total_loss(double l_f, double l_p, double l_con, double t, const LossWeights& cfg) {
  if (!std::isfinite(l_f) || !std::isfinite(l_p) || !std::isfinite(l_con)) {
    throw ValidationError("loss components must be finite");
  }
  return cfg.alpha * l_f + cfg.beta * l_p + ramp_weight(t, cfg) * l_con;
}

}  // namespace weaklabel
