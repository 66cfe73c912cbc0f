#include "weaklabel/sgplg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "weaklabel/error.hpp"

namespace weaklabel {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void check_same_shape(int w0, int h0, int w1, int h1, const char* what) {
  if (w0 != w1 || h0 != h1) {
    throw DimensionMismatch(std::string(what) + ": " + std::to_string(w0) + "x" +
                            std::to_string(h0) + " vs " + std::to_string(w1) + "x" +
                            std::to_string(h1));
  }
}

}  // namespace

void SgplgConfig::validate() const {
  auto threshold_ok = [](double t) { return t >= 0.0 && t <= kMaxSimilarityThreshold; };
  if (!threshold_ok(threshold_srf_irf)) throw ConfigError("threshold_srf_irf must lie in [0,1.1]");
  if (!threshold_ok(threshold_ped)) throw ConfigError("threshold_ped must lie in [0,1.1]");
  if (!in_unit(trust_init)) throw ConfigError("trust_init must lie in [0,1]");
  if (!in_unit(trust_seed)) throw ConfigError("trust_seed must lie in [0,1]");
  if (!(decay_per_hop >= 0.0) || !std::isfinite(decay_per_hop)) {
    throw ConfigError("decay_per_hop must be a finite value >= 0");
  }
}

SuperpixelLabels seed_superpixel_labels(const LabelMap& points, const SuperpixelMap& map) {
  check_same_shape(points.width(), points.height(), map.width(), map.height(),
                   "point labels and superpixel map differ in size");
  SuperpixelLabels out;
  out.num_classes = points.num_classes();
  out.labels.assign(map.num_blocks() + 1, 0);
  out.hop_distance.assign(map.num_blocks() + 1, -1);
  out.origin.assign(map.num_blocks() + 1, 0);
  for (std::size_t p = 0; p < points.pixel_count(); ++p) {
    const int c = points[p];
    if (c == 0) continue;
    const int k = map.block_of(p);
    if (out.labels[k] != 0 && out.labels[k] != c) throw SeedConflict(k, out.labels[k], c);
    out.labels[k] = static_cast<std::uint8_t>(c);
    out.hop_distance[k] = 0;
    out.origin[k] = k;
  }
  return out;
}

SuperpixelLabels grow(const GrayImage& image, const SuperpixelMap& map,
                      const AdjacencyGraph& graph, const SuperpixelLabels& seeds,
                      const SgplgConfig& cfg) {
  cfg.validate();
  check_same_shape(image.width(), image.height(), map.width(), map.height(),
                   "image and superpixel map differ in size");
  if (seeds.num_blocks() != map.num_blocks() || graph.num_blocks() != map.num_blocks()) {
    throw DimensionMismatch("seed labels, adjacency graph and superpixel map disagree on block count");
  }

  const auto hists = all_histograms(image, map);
  SuperpixelLabels out = seeds;

  std::vector<int> order;
  for (int c = 1; c < seeds.num_classes; ++c) {
    for (int k = 1; k <= map.num_blocks(); ++k) {
      if (seeds.labels[k] == c && seeds.hop_distance[k] == 0) order.push_back(k);
    }
  }

  std::deque<int> frontier;
  for (int seed : order) {
    const int cls = out.labels[seed];
    const double t = cfg.threshold_for(cls);
    const bool upward_only = cls == kPED;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const int parent = frontier.front();
      frontier.pop_front();
      for (const auto& nb : graph.neighbors(parent)) {
        if (upward_only && !nb.above) continue;
        if (out.labels[nb.block] != 0) continue;
        if (cos_dis(hists[parent], hists[nb.block]) >= t) {
          out.labels[nb.block] = static_cast<std::uint8_t>(cls);
          out.hop_distance[nb.block] = out.hop_distance[parent] + 1;
          out.origin[nb.block] = seed;
          frontier.push_back(nb.block);
        }
      }
    }
  }
  return out;
}

LabelMap to_pixel_labels(const SuperpixelLabels& grown, const SuperpixelMap& map) {
  if (grown.num_blocks() != map.num_blocks()) {
    throw DimensionMismatch("superpixel labels do not cover the map's blocks");
  }
  std::vector<std::uint8_t> data(map.pixel_count());
  const auto assignment = map.assignment();
  for (std::size_t p = 0; p < data.size(); ++p) data[p] = grown.labels[assignment[p]];
  return LabelMap(map.width(), map.height(), std::move(data), grown.num_classes);
}

double trust_value(double distance, double seed_trust, double decay_per_hop) {
  // with the defaults this evaluates max(1.0 - 0.1 * distance / 2, 0.0)
  return std::max(seed_trust - 2.0 * decay_per_hop * distance / 2.0, 0.0);
}

TrustMap build_trust_map(const SuperpixelLabels& grown, const SuperpixelMap& map,
                         const SgplgConfig& cfg) {
  cfg.validate();
  if (grown.num_blocks() != map.num_blocks()) {
    throw DimensionMismatch("superpixel labels do not cover the map's blocks");
  }
  const double block_side =
      std::sqrt(static_cast<double>(map.pixel_count()) / static_cast<double>(map.num_blocks()));
  std::vector<float> per_block(map.num_blocks() + 1, static_cast<float>(cfg.trust_init));
  for (int k = 1; k <= map.num_blocks(); ++k) {
    if (grown.labels[k] == 0 || grown.hop_distance[k] < 0) continue;
    double distance = grown.hop_distance[k];
    if (cfg.distance == TrustDistance::centroid && grown.hop_distance[k] > 0) {
      const auto& a = map.centroid(k);
      const auto& b = map.centroid(grown.origin[k]);
      distance = std::hypot(a.x - b.x, a.y - b.y) / block_side;
    }
    per_block[k] = static_cast<float>(trust_value(distance, cfg.trust_seed, cfg.decay_per_hop));
  }
  std::vector<float> data(map.pixel_count());
  const auto assignment = map.assignment();
  for (std::size_t p = 0; p < data.size(); ++p) data[p] = per_block[assignment[p]];
  return TrustMap(map.width(), map.height(), std::move(data));
}

PseudoLabels generate(const GrayImage& image, const SuperpixelMap& superpixels,
                      const PointAnnotationSet& points, const SgplgConfig& cfg) {
  cfg.validate();
  const auto point_map = rasterize_points(points, image.width(), image.height());
  const auto graph = build_adjacency(superpixels);
  const auto seeds = seed_superpixel_labels(point_map, superpixels);
  const auto grown = grow(image, superpixels, graph, seeds, cfg);
  return PseudoLabels{to_pixel_labels(grown, superpixels), build_trust_map(grown, superpixels, cfg),
                      superpixels};
}

PseudoLabels generate(const GrayImage& image, const PointAnnotationSet& points,
                      const SgplgConfig& cfg, const SlicParams& slic_params) {
  cfg.validate();
  return generate(image, slic(image, slic_params), points, cfg);
}

}  // namespace weaklabel
