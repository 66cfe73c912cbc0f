#include "weaklabel/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "weaklabel/error.hpp"

namespace weaklabel {

SuperpixelMap::SuperpixelMap(int width, int height, std::vector<std::int32_t> assignment)
    : width_(width), height_(height), assignment_(std::move(assignment)) {
  if (width_ < 1 || height_ < 1 ||
      assignment_.size() != static_cast<std::size_t>(width_) * height_) {
    throw DimensionMismatch("superpixel assignment does not match a " + std::to_string(width) +
                            "x" + std::to_string(height) + " raster");
  }
  for (auto id : assignment_) {
    if (id < 1) throw IdError("superpixel ids start at 1, found " + std::to_string(id));
    num_blocks_ = std::max(num_blocks_, static_cast<int>(id));
  }

  std::vector<std::size_t> sizes(num_blocks_ + 1, 0);
  for (auto id : assignment_) ++sizes[id];
  offsets_.assign(num_blocks_ + 1, 0);
  for (int k = 1; k <= num_blocks_; ++k) {
    if (sizes[k] == 0) throw IdError("superpixel id " + std::to_string(k) + " has no pixels");
    offsets_[k] = offsets_[k - 1] + sizes[k];
  }

  pixels_.resize(assignment_.size());
  centroids_.assign(num_blocks_, {});
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const int k = assignment_[i];
    pixels_[cursor[k - 1]++] = static_cast<std::uint32_t>(i);
    centroids_[k - 1].x += static_cast<double>(i % width_);
    centroids_[k - 1].y += static_cast<double>(i / width_);
  }
  for (int k = 1; k <= num_blocks_; ++k) {
    centroids_[k - 1].x /= static_cast<double>(sizes[k]);
    centroids_[k - 1].y /= static_cast<double>(sizes[k]);
  }
}

void SuperpixelMap::check_id(int k) const {
  if (k < 1 || k > num_blocks_) {
    throw IdError("block id " + std::to_string(k) + " outside 1.." + std::to_string(num_blocks_));
  }
}

std::span<const std::uint32_t> SuperpixelMap::block_pixels(int k) const {
  check_id(k);
  return std::span<const std::uint32_t>(pixels_).subspan(offsets_[k - 1],
                                                         offsets_[k] - offsets_[k - 1]);
}

const Centroid& SuperpixelMap::centroid(int k) const {
  check_id(k);
  return centroids_[k - 1];
}

std::uint64_t BlockHistogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

AdjacencyGraph::AdjacencyGraph(std::vector<std::vector<Neighbor>> neighbors)
    : neighbors_(std::move(neighbors)) {
  if (neighbors_.empty()) neighbors_.resize(1);
}

std::span<const Neighbor> AdjacencyGraph::neighbors(int k) const {
  if (k < 1 || k > num_blocks()) {
    throw IdError("block id " + std::to_string(k) + " outside 1.." + std::to_string(num_blocks()));
  }
  return neighbors_[k];
}

namespace {

struct Center {
  double x;
  double y;
  double intensity;
};

// Splits every cluster into its 4-connected components, then folds the small
// ones into their dominant neighbor. Returns ids renumbered 1..K by first
// appearance.
std::vector<std::int32_t> enforce_connectivity(const std::vector<int>& labels, int width,
                                               int height, double min_size) {
  const std::size_t n = labels.size();
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] != -1) continue;
    const int id = static_cast<int>(comp_size.size());
    comp[start] = id;
    queue.clear();
    queue.push_back(start);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t p = queue[head];
      const int x = static_cast<int>(p % width);
      const int y = static_cast<int>(p / width);
      auto visit = [&](std::size_t q) {
        if (comp[q] == -1 && labels[q] == labels[start]) {
          comp[q] = id;
          queue.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < width) visit(p + 1);
      if (y > 0) visit(p - width);
      if (y + 1 < height) visit(p + width);
    }
    comp_size.push_back(queue.size());
  }

  const std::size_t num_comps = comp_size.size();
  // shared border length, in pixel edges, between neighboring components
  std::vector<std::map<int, std::size_t>> border(num_comps);
  for (std::size_t p = 0; p < n; ++p) {
    const int x = static_cast<int>(p % width);
    const int y = static_cast<int>(p / width);
    if (x + 1 < width && comp[p] != comp[p + 1]) {
      ++border[comp[p]][comp[p + 1]];
      ++border[comp[p + 1]][comp[p]];
    }
    if (y + 1 < height && comp[p] != comp[p + width]) {
      ++border[comp[p]][comp[p + width]];
      ++border[comp[p + width]][comp[p]];
    }
  }

  std::vector<int> parent(num_comps);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int c) {
    while (parent[c] != c) {
      parent[c] = parent[parent[c]];
      c = parent[c];
    }
    return c;
  };

  // Fragments are visited in scan order and join the neighbor they share the
  // longest border with (ties to the smaller id). Picking the largest
  // neighbor instead lets one block snowball across noisy images.
  std::map<int, std::size_t> shared;
  for (std::size_t c = 0; c < num_comps; ++c) {
    const int root = find(static_cast<int>(c));
    if (static_cast<double>(comp_size[root]) >= min_size) continue;
    shared.clear();
    for (const auto& [nb, len] : border[root]) {
      const int r = find(nb);
      if (r != root) shared[r] += len;
    }
    int target = -1;
    std::size_t longest = 0;
    for (const auto& [r, len] : shared) {
      if (len > longest) {
        longest = len;
        target = r;
      }
    }
    if (target == -1) continue;  // sole component
    parent[root] = target;
    comp_size[target] += comp_size[root];
    for (const auto& [nb, len] : border[root]) border[target][nb] += len;
    border[root].clear();
  }

  std::vector<std::int32_t> renumber(num_comps, 0);
  std::vector<std::int32_t> out(n);
  std::int32_t next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const int r = find(comp[p]);
    if (renumber[r] == 0) renumber[r] = ++next;
    out[p] = renumber[r];
  }
  return out;
}

}  // namespace

SuperpixelMap slic(const GrayImage& image, const SlicParams& params) {
  const int w = image.width();
  const int h = image.height();
  const int s = params.region_size;
  if (s < 2) throw ConfigError("SLIC region_size must be >= 2, got " + std::to_string(s));
  if (params.iterations < 1) {
    throw ConfigError("SLIC iterations must be >= 1, got " + std::to_string(params.iterations));
  }
  if (!(params.compactness >= 0.0) || !std::isfinite(params.compactness)) {
    throw ConfigError("SLIC compactness must be a finite nonnegative number");
  }
  if (s > std::min(w, h)) {
    throw ConfigError("SLIC region_size " + std::to_string(s) + " exceeds the smaller image side (" +
                      std::to_string(std::min(w, h)) + ")");
  }

  const int nx = (w + s - 1) / s;
  const int ny = (h + s - 1) / s;
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const int cy = j * s + (std::min(s, h - j * s) - 1) / 2;
    for (int i = 0; i < nx; ++i) {
      const int cx = i * s + (std::min(s, w - i * s) - 1) / 2;
      centers.push_back({static_cast<double>(cx), static_cast<double>(cy),
                         static_cast<double>(image.at(cx, cy))});
    }
  }

  const std::size_t n = image.pixel_count();
  const auto pixels = image.data();
  const double spatial_weight = params.compactness / s;
  const double sw2 = spatial_weight * spatial_weight;
  std::vector<int> labels(n, -1);
  std::vector<double> best(n);

  auto distance2 = [&](const Center& c, int x, int y) {
    const double di = static_cast<double>(pixels[static_cast<std::size_t>(y) * w + x]) - c.intensity;
    const double dx = x - c.x;
    const double dy = y - c.y;
    return di * di + sw2 * (dx * dx + dy * dy);
  };

  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(labels.begin(), labels.end(), -1);
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const auto& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x)) - s);
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x)) + s);
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y)) - s);
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y)) + s);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double d = distance2(c, x, y);
          const std::size_t p = static_cast<std::size_t>(y) * w + x;
          if (d < best[p]) {
            best[p] = d;
            labels[p] = static_cast<int>(k);
          }
        }
      }
    }
    // Centers can drift far enough to leave pixels outside every window.
    for (std::size_t p = 0; p < n; ++p) {
      if (labels[p] != -1) continue;
      const int x = static_cast<int>(p % w);
      const int y = static_cast<int>(p / w);
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d = distance2(centers[k], x, y);
        if (d < best[p]) {
          best[p] = d;
          labels[p] = static_cast<int>(k);
        }
      }
    }

    std::vector<double> sx(centers.size(), 0.0), sy(centers.size(), 0.0), si(centers.size(), 0.0);
    std::vector<std::size_t> count(centers.size(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      const int k = labels[p];
      sx[k] += static_cast<double>(p % w);
      sy[k] += static_cast<double>(p / w);
      si[k] += pixels[p];
      ++count[k];
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (count[k] == 0) continue;
      const double inv = 1.0 / static_cast<double>(count[k]);
      centers[k] = {sx[k] * inv, sy[k] * inv, si[k] * inv};
    }
  }

  return SuperpixelMap(w, h, enforce_connectivity(labels, w, h, s * s / 4.0));
}

BlockHistogram histogram(const GrayImage& image, const SuperpixelMap& map, int k) {
  if (image.width() != map.width() || image.height() != map.height()) {
    throw DimensionMismatch("image and superpixel map dimensions differ");
  }
  BlockHistogram hist;
  const auto pixels = image.data();
  for (auto p : map.block_pixels(k)) ++hist.counts[pixels[p]];
  return hist;
}

std::vector<BlockHistogram> all_histograms(const GrayImage& image, const SuperpixelMap& map) {
  if (image.width() != map.width() || image.height() != map.height()) {
    throw DimensionMismatch("image and superpixel map dimensions differ");
  }
  std::vector<BlockHistogram> hists(map.num_blocks() + 1);
  const auto pixels = image.data();
  const auto assignment = map.assignment();
  for (std::size_t p = 0; p < pixels.size(); ++p) ++hists[assignment[p]].counts[pixels[p]];
  return hists;
}

double cos_dis(const BlockHistogram& a, const BlockHistogram& b) {
  std::uint64_t dot = 0;
  std::uint64_t aa = 0;
  std::uint64_t bb = 0;
  for (std::size_t v = 0; v < a.counts.size(); ++v) {
    const std::uint64_t x = a.counts[v];
    const std::uint64_t y = b.counts[v];
    dot += x * y;
    aa += x * x;
    bb += y * y;
  }
  if (aa == 0 || bb == 0) throw UndefinedSimilarity("cosine similarity of an empty histogram");
  const double sim = static_cast<double>(dot) /
                     (std::sqrt(static_cast<double>(aa)) * std::sqrt(static_cast<double>(bb)));
  return std::min(sim, 1.0);
}

AdjacencyGraph build_adjacency(const SuperpixelMap& map) {
  const int w = map.width();
  const int h = map.height();
  const auto a = map.assignment();
  std::set<std::pair<int, int>> edges;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w && a[p] != a[p + 1]) edges.emplace(std::minmax(a[p], a[p + 1]));
      if (y + 1 < h && a[p] != a[p + w]) edges.emplace(std::minmax(a[p], a[p + w]));
    }
  }
  std::vector<std::vector<Neighbor>> nbrs(map.num_blocks() + 1);
  for (auto [lo, hi] : edges) {
    nbrs[lo].push_back({hi, map.centroid(hi).y < map.centroid(lo).y});
    nbrs[hi].push_back({lo, map.centroid(lo).y < map.centroid(hi).y});
  }
  for (auto& list : nbrs) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& l, const Neighbor& r) { return l.block < r.block; });
  }
  return AdjacencyGraph(std::move(nbrs));
}

std::vector<bool> block_boundaries(const SuperpixelMap& map) {
  const int w = map.width();
  const int h = map.height();
  const auto a = map.assignment();
  std::vector<bool> edge(a.size(), false);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if ((x + 1 < w && a[p] != a[p + 1]) || (y + 1 < h && a[p] != a[p + w])) edge[p] = true;
    }
  }
  return edge;
}

}  // namespace weaklabel
