#include "weaklabel/conflearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "weaklabel/error.hpp"

namespace weaklabel {

namespace {

void require_same(const ProbMap& probs, const LabelMap& labels) {
  if (probs.width() != labels.width() || probs.height() != labels.height()) {
    throw DimensionMismatch("probability and label maps differ in size");
  }
  if (probs.num_classes() != labels.num_classes()) {
    throw DimensionMismatch("probability map has " + std::to_string(probs.num_classes()) +
                            " classes, label map " + std::to_string(labels.num_classes()));
  }
}

template <class A, class B>
void require_same_size(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) throw DimensionMismatch(what);
}

}  // namespace

void ClgrConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(keep_fraction)) throw ConfigError("keep_fraction must lie in [0,1]");
  if (!unit(trust_gate)) throw ConfigError("trust_gate must lie in [0,1]");
  if (!unit(delta)) throw ConfigError("delta must lie in [0,1]");
}

ErrorMap::ErrorMap(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width_ < 1 || height_ < 1 || bits_.size() != static_cast<std::size_t>(width_) * height_) {
    throw DimensionMismatch("error map data does not match its dimensions");
  }
  for (auto& b : bits_) {
    if (b > 1) throw ValidationError("error map values must be 0 or 1");
  }
}

ErrorMap::ErrorMap(int width, int height)
    : ErrorMap(width, height,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0))) {}

std::size_t ErrorMap::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

LabelMap ErrorMap::as_label_map() const {
  return LabelMap(width_, height_, bits_, 2);
}

ClassThresholds class_thresholds(const ProbMap& probs, const LabelMap& labels) {
  require_same(probs, labels);
  const int m = probs.num_classes();
  std::vector<double> sum(m, 0.0);
  std::vector<std::size_t> count(m, 0);
  for (std::size_t p = 0; p < labels.pixel_count(); ++p) {
    const int j = labels[p];
    sum[j] += probs.prob(j, p);
    ++count[j];
  }
  ClassThresholds out;
  out.t.resize(m);
  for (int j = 0; j < m; ++j) {
    if (count[j] > 0) out.t[j] = sum[j] / static_cast<double>(count[j]);
  }
  return out;
}

JointEstimate confusion(const ProbMap& probs, const LabelMap& labels, const ClassThresholds& t) {
  require_same(probs, labels);
  const int m = probs.num_classes();
  if (static_cast<int>(t.t.size()) != m) {
    throw DimensionMismatch("thresholds cover " + std::to_string(t.t.size()) + " classes, expected " +
                            std::to_string(m));
  }
  JointEstimate est;
  est.num_classes = m;
  est.confusion.assign(static_cast<std::size_t>(m) * m, 0);
  for (std::size_t p = 0; p < labels.pixel_count(); ++p) {
    int best = -1;
    for (int k = 0; k < m; ++k) {
      if (!t.t[k]) continue;
      const float pk = probs.prob(k, p);
      if (pk < *t.t[k]) continue;
      if (best == -1 || pk > probs.prob(best, p)) best = k;
    }
    if (best != -1) ++est.confusion[static_cast<std::size_t>(labels[p]) * m + best];
  }
  return est;
}

JointEstimate calibrate_and_joint(const JointEstimate& est, const LabelMap& labels) {
  const int m = est.num_classes;
  if (labels.num_classes() != m) throw DimensionMismatch("label map class count differs from the joint");
  const auto label_counts = labels.class_counts();
  JointEstimate out = est;
  out.calibrated.assign(static_cast<std::size_t>(m) * m, 0.0);
  out.joint.assign(static_cast<std::size_t>(m) * m, 0.0);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    std::uint64_t row = 0;
    for (int j = 0; j < m; ++j) row += est.c(i, j);
    if (row == 0) continue;
    for (int j = 0; j < m; ++j) {
      const double v = static_cast<double>(est.c(i, j)) / static_cast<double>(row) *
                       static_cast<double>(label_counts[i]);
      out.calibrated[static_cast<std::size_t>(i) * m + j] = v;
      total += v;
    }
  }
  if (total <= 0.0) {
    throw DegenerateJoint("no pixel reached any per-class confidence threshold; the joint is undefined");
  }
  for (std::size_t k = 0; k < out.joint.size(); ++k) out.joint[k] = out.calibrated[k] / total;
  return out;
}

std::vector<std::size_t> pbnr_candidates(const ProbMap& probs, const LabelMap& labels,
                                         const JointEstimate& joint) {
  require_same(probs, labels);
  const int m = probs.num_classes();
  if (joint.num_classes != m || joint.joint.size() != static_cast<std::size_t>(m) * m) {
    throw DimensionMismatch("joint distribution does not match the probability map");
  }
  const std::size_t n = labels.pixel_count();
  std::vector<std::vector<std::size_t>> by_label(m);
  for (std::size_t p = 0; p < n; ++p) by_label[labels[p]].push_back(p);

  std::vector<std::uint8_t> marked(n, 0);
  std::vector<std::size_t> ranked;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto want = static_cast<std::size_t>(std::round(static_cast<double>(n) * joint.q(i, j)));
      const std::size_t take = std::min(want, by_label[i].size());
      if (take == 0) continue;
      ranked = by_label[i];
      std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        return probs.prob(j, a) > probs.prob(j, b);
      });
      for (std::size_t r = 0; r < take; ++r) marked[ranked[r]] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < n; ++p) {
    if (marked[p]) out.push_back(p);
  }
  return out;
}

ErrorEstimate estimate_errors(const ProbMap& probs, const LabelMap& labels, const TrustMap& trust,
                              const ClgrConfig& cfg) {
  cfg.validate();
  require_same(probs, labels);
  require_same_size(trust, labels, "trust and label maps differ in size");

  const auto thresholds = class_thresholds(probs, labels);
  auto joint = calibrate_and_joint(confusion(probs, labels, thresholds), labels);
  auto candidates = pbnr_candidates(probs, labels, joint);

  // candidates arrive in ascending pixel order, so a stable sort breaks ties by index
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return probs.prob(labels[a], a) < probs.prob(labels[b], b);
  });
  const auto keep = static_cast<std::size_t>(
      std::round(cfg.keep_fraction * static_cast<double>(candidates.size())));

  std::vector<std::uint8_t> bits(labels.pixel_count(), 0);
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    const std::size_t p = candidates[r];
    if (r < keep || trust[p] < cfg.trust_gate) bits[p] = 1;
  }
  return ErrorEstimate{std::move(joint), ErrorMap(labels.width(), labels.height(), std::move(bits))};
}

ErrorMap estimate_error_map(const ProbMap& probs, const LabelMap& labels, const TrustMap& trust,
                            const ClgrConfig& cfg) {
  return estimate_errors(probs, labels, trust, cfg).errors;
}

LabelMap refine_labels(const LabelMap& pseudo, const ProbMap& probs, const ErrorMap& err) {
  require_same(probs, pseudo);
  require_same_size(err, pseudo, "error map and label map differ in size");
  std::vector<std::uint8_t> out(pseudo.data().begin(), pseudo.data().end());
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (err[p]) out[p] = static_cast<std::uint8_t>(probs.argmax(p));
  }
  return LabelMap(pseudo.width(), pseudo.height(), std::move(out), pseudo.num_classes());
}

TrustMap refine_trust(const TrustMap& trust, const ErrorMap& err, const ClgrConfig& cfg) {
  cfg.validate();
  require_same_size(err, trust, "error map and trust map differ in size");
  if (cfg.trust_mode == TrustRefinement::keep) return trust;
  std::vector<float> out(trust.data().begin(), trust.data().end());
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (err[p]) out[p] = static_cast<float>(cfg.delta);
  }
  return TrustMap(trust.width(), trust.height(), std::move(out));
}

}  // namespace weaklabel
