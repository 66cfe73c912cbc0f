#include "weaklabel/metrics.hpp"

#include <string>

#include "weaklabel/error.hpp"

namespace weaklabel {

OverlapCounts& OverlapCounts::operator+=(const OverlapCounts& other) {
  if (other.num_classes != num_classes) throw DimensionMismatch("cannot pool counts of different class counts");
  for (int c = 0; c < num_classes; ++c) {
    pred[c] += other.pred[c];
    truth[c] += other.truth[c];
    intersection[c] += other.intersection[c];
  }
  return *this;
}

OverlapCounts overlap_counts(const LabelMap& pred, const LabelMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw DimensionMismatch("prediction is " + std::to_string(pred.width()) + "x" +
                            std::to_string(pred.height()) + ", ground truth " +
                            std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  if (pred.num_classes() != gt.num_classes()) {
    throw DimensionMismatch("prediction and ground truth differ in class count");
  }
  const int m = pred.num_classes();
  OverlapCounts out{m, std::vector<std::uint64_t>(m, 0), std::vector<std::uint64_t>(m, 0),
                    std::vector<std::uint64_t>(m, 0)};
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    ++out.pred[pred[p]];
    ++out.truth[gt[p]];
    if (pred[p] == gt[p]) ++out.intersection[pred[p]];
  }
  return out;
}

SegScores scores_from_counts(const OverlapCounts& counts) {
  const int m = counts.num_classes;
  SegScores s;
  s.dice_per_class.assign(m, 1.0);
  s.iou_per_class.assign(m, 1.0);
  s.present.assign(m, false);
  double dice_sum = 0.0, iou_sum = 0.0;
  int dice_n = 0, iou_n = 0;
  for (int c = 0; c < m; ++c) {
    const auto sizes = counts.pred[c] + counts.truth[c];
    if (sizes == 0) continue;
    s.present[c] = true;
    const auto inter = static_cast<double>(counts.intersection[c]);
    s.dice_per_class[c] = 2.0 * inter / static_cast<double>(sizes);
    s.iou_per_class[c] = inter / static_cast<double>(sizes - counts.intersection[c]);
    iou_sum += s.iou_per_class[c];
    ++iou_n;
    if (c > 0) {
      dice_sum += s.dice_per_class[c];
      ++dice_n;
    }
  }
  if (dice_n > 0) s.mean_dice = dice_sum / dice_n;
  if (iou_n > 0) s.mean_iou = iou_sum / iou_n;
  return s;
}

SegScores dice(const LabelMap& pred, const LabelMap& gt) {
  return scores_from_counts(overlap_counts(pred, gt));
}

SegScores miou(const LabelMap& pred, const LabelMap& gt) {
  return scores_from_counts(overlap_counts(pred, gt));
}

SegScores average_scores(std::span<const SegScores> per_image) {
  if (per_image.empty()) throw ValidationError("no scores to average");
  const std::size_t m = per_image.front().dice_per_class.size();
  SegScores out;
  out.dice_per_class.assign(m, 1.0);
  out.iou_per_class.assign(m, 1.0);
  out.present.assign(m, false);
  for (std::size_t c = 0; c < m; ++c) {
    double d = 0.0, u = 0.0;
    int n = 0;
    for (const auto& s : per_image) {
      if (s.dice_per_class.size() != m) throw DimensionMismatch("scores differ in class count");
      if (!s.present[c]) continue;
      d += s.dice_per_class[c];
      u += s.iou_per_class[c];
      ++n;
    }
    if (n == 0) continue;
    out.present[c] = true;
    out.dice_per_class[c] = d / n;
    out.iou_per_class[c] = u / n;
  }
  double md = 0.0, mi = 0.0;
  for (const auto& s : per_image) {
    md += s.mean_dice;
    mi += s.mean_iou;
  }
  out.mean_dice = md / static_cast<double>(per_image.size());
  out.mean_iou = mi / static_cast<double>(per_image.size());
  return out;
}

}  // namespace weaklabel
