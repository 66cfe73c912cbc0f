#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace weaklabel {

/// Default label space: background plus the three fluid classes.
inline constexpr int kNumFluidClasses = 4;

enum FluidClass : int { kBackground = 0, kIRF = 1, kSRF = 2, kPED = 3 };

/// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<std::uint8_t> data);
  GrayImage(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return data_.size(); }
  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  bool operator==(const GrayImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel class ids in [0, num_classes).
class LabelMap {
 public:
  LabelMap(int width, int height, std::vector<std::uint8_t> data,
           int num_classes = kNumFluidClasses);
  /// All-background map.
  LabelMap(int width, int height, int num_classes = kNumFluidClasses);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t pixel_count() const noexcept { return data_.size(); }
  int at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  int operator[](std::size_t i) const { return data_[i]; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  /// Number of pixels carrying each class id.
  std::vector<std::size_t> class_counts() const;

  bool operator==(const LabelMap&) const = default;

 private:
  int width_;
  int height_;
  int num_classes_;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel label confidence in [0,1].
class TrustMap {
 public:
  TrustMap(int width, int height, std::vector<float> data);
  TrustMap(int width, int height, float fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return data_.size(); }
  float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  float operator[](std::size_t i) const { return data_[i]; }
  std::span<const float> data() const noexcept { return data_; }

  bool operator==(const TrustMap&) const = default;

 private:
  int width_;
  int height_;
  std::vector<float> data_;
};

/// Per-pixel class probabilities. Storage is channel-major: all of class 0
/// row-major, then all of class 1, ...
class ProbMap {
 public:
  static constexpr double kSumTolerance = 1e-4;

  ProbMap(int width, int height, int num_classes, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  float prob(int cls, std::size_t pixel) const {
    return data_[static_cast<std::size_t>(cls) * pixel_count() + pixel];
  }
  /// Class with the highest probability; ties go to the smaller id.
  int argmax(std::size_t pixel) const;
  std::span<const float> data() const noexcept { return data_; }

  bool operator==(const ProbMap&) const = default;

 private:
  int width_;
  int height_;
  int num_classes_;
  std::vector<float> data_;
};

struct PixelPoint {
  int x = 0;
  int y = 0;
  bool operator==(const PixelPoint&) const = default;
};

struct ClassPoint {
  int x = 0;
  int y = 0;
  int cls = kIRF;
  bool operator==(const ClassPoint&) const = default;
};

/// Weak annotations: single clicks for IRF/SRF (any nonzero class is
/// accepted) and polylines traced along the bottom of PED regions.
struct PointAnnotationSet {
  std::vector<ClassPoint> points;
  std::vector<std::vector<PixelPoint>> ped_polylines;

  bool empty() const noexcept { return points.empty() && ped_polylines.empty(); }
  bool operator==(const PointAnnotationSet&) const = default;
};

/// 8-connected Bresenham line from a to b, both endpoints included.
std::vector<PixelPoint> line_pixels(PixelPoint a, PixelPoint b);

/// Burns annotations into a background map. Points are written first, then
/// polylines, each in input order; later writes win on shared pixels.
LabelMap rasterize_points(const PointAnnotationSet& annotations, int width,
                          int height, int num_classes = kNumFluidClasses);

}  // namespace weaklabel
