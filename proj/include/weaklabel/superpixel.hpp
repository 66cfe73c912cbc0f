#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "weaklabel/image.hpp"

namespace weaklabel {

struct SlicParams {
  int region_size = 13;
  double compactness = 10.0;
  int iterations = 10;

  bool operator==(const SlicParams&) const = default;
};

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

/// Per-pixel superpixel block ids in 1..K together with the per-block pixel
/// inventory and centroids.
class SuperpixelMap {
 public:
  /// Every id in 1..max(assignment) must be used by at least one pixel.
  SuperpixelMap(int width, int height, std::vector<std::int32_t> assignment);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int num_blocks() const noexcept { return num_blocks_; }
  std::size_t pixel_count() const noexcept { return assignment_.size(); }
  std::int32_t block_of(std::size_t pixel) const { return assignment_[pixel]; }
  std::span<const std::int32_t> assignment() const noexcept { return assignment_; }
  /// Row-major pixel indices of block k, ascending. Throws IdError.
  std::span<const std::uint32_t> block_pixels(int k) const;
  const Centroid& centroid(int k) const;

  bool operator==(const SuperpixelMap& o) const {
    return width_ == o.width_ && height_ == o.height_ && assignment_ == o.assignment_;
  }

 private:
  void check_id(int k) const;

  int width_;
  int height_;
  int num_blocks_ = 0;
  std::vector<std::int32_t> assignment_;
  // CSR layout: pixels of block k live in [offsets_[k-1], offsets_[k]).
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> pixels_;
  std::vector<Centroid> centroids_;
};

/// Occurrence count of each 8-bit intensity inside one block.
struct BlockHistogram {
  std::array<std::uint32_t, 256> counts{};

  std::uint64_t total() const noexcept;
  bool operator==(const BlockHistogram&) const = default;
};

struct Neighbor {
  int block = 0;
  /// Neighbor centroid lies strictly above (smaller y) the owning block's.
  bool above = false;
  bool operator==(const Neighbor&) const = default;
};

/// Blocks sharing a 4-connected pixel border. Neighbor lists are sorted by
/// block id.
class AdjacencyGraph {
 public:
  explicit AdjacencyGraph(std::vector<std::vector<Neighbor>> neighbors);

  int num_blocks() const noexcept { return static_cast<int>(neighbors_.size()) - 1; }
  std::span<const Neighbor> neighbors(int k) const;

 private:
  // index 0 unused so block ids index directly
  std::vector<std::vector<Neighbor>> neighbors_;
};

/// Grayscale SLIC. Centers start on the exact region_size grid, the distance
/// is sqrt(dI^2 + (compactness * dxy / region_size)^2) over a 2*region_size
/// window, and fragments smaller than region_size^2/4 are merged into the 4-connected
/// neighbor sharing the longest border with them. Block ids are numbered in order
/// of first appearance in a row-major scan.
SuperpixelMap slic(const GrayImage& image, const SlicParams& params = {});

BlockHistogram histogram(const GrayImage& image, const SuperpixelMap& map, int k);

/// Histograms for every block; element 0 is empty so ids index directly.
std::vector<BlockHistogram> all_histograms(const GrayImage& image, const SuperpixelMap& map);

/// Cosine similarity of two intensity histograms, in [0,1].
double cos_dis(const BlockHistogram& a, const BlockHistogram& b);

AdjacencyGraph build_adjacency(const SuperpixelMap& map);

/// Pixels whose right or lower neighbor lies in a different block.
std::vector<bool> block_boundaries(const SuperpixelMap& map);

}  // namespace weaklabel
