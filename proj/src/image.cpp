#include "weaklabel/image.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "weaklabel/error.hpp"

namespace weaklabel {

SeedConflict::SeedConflict(int block, int first_class, int second_class)
    : Error("superpixel block " + std::to_string(block) +
            " contains conflicting point classes " + std::to_string(first_class) +
            " and " + std::to_string(second_class)),
      block_(block) {}

namespace {

void check_shape(int width, int height, std::size_t size, std::size_t channels = 1) {
  if (width < 1 || height < 1) {
    throw DimensionMismatch("raster dimensions must be positive, got " +
                            std::to_string(width) + "x" + std::to_string(height));
  }
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (size != expected) {
    throw DimensionMismatch("raster data holds " + std::to_string(size) +
                            " values, expected " + std::to_string(expected));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_shape(width_, height_, data_.size());
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_shape(width_, height_, static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0));
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

LabelMap::LabelMap(int width, int height, std::vector<std::uint8_t> data, int num_classes)
    : width_(width), height_(height), num_classes_(num_classes), data_(std::move(data)) {
  check_shape(width_, height_, data_.size());
  if (num_classes_ < 1 || num_classes_ > 256) {
    throw ValidationError("num_classes must be in [1,256], got " + std::to_string(num_classes_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] >= num_classes_) {
      throw ValidationError("label " + std::to_string(data_[i]) + " at pixel " + std::to_string(i) +
                            " is not below num_classes " + std::to_string(num_classes_));
    }
  }
}

LabelMap::LabelMap(int width, int height, int num_classes)
    : LabelMap(width, height,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0),
               num_classes) {}

std::vector<std::size_t> LabelMap::class_counts() const {
  std::vector<std::size_t> counts(num_classes_, 0);
  for (auto v : data_) ++counts[v];
  return counts;
}

TrustMap::TrustMap(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_shape(width_, height_, data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    // NaN fails both comparisons
    if (!(data_[i] >= 0.0f && data_[i] <= 1.0f)) {
      throw ValidationError("trust value " + std::to_string(data_[i]) + " at pixel " +
                            std::to_string(i) + " is outside [0,1]");
    }
  }
}

TrustMap::TrustMap(int width, int height, float fill)
    : TrustMap(width, height,
               std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

ProbMap::ProbMap(int width, int height, int num_classes, std::vector<float> data)
    : width_(width), height_(height), num_classes_(num_classes), data_(std::move(data)) {
  if (num_classes_ < 1 || num_classes_ > 256) {
    throw ValidationError("num_classes must be in [1,256], got " + std::to_string(num_classes_));
  }
  check_shape(width_, height_, data_.size(), static_cast<std::size_t>(num_classes_));
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int c = 0; c < num_classes_; ++c) {
      const float p = prob(c, i);
      if (!(p >= 0.0f && p <= 1.0f)) {
        throw ValidationError("probability " + std::to_string(p) + " (class " + std::to_string(c) +
                              ", pixel " + std::to_string(i) + ") is outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw ValidationError("probabilities at pixel " + std::to_string(i) + " sum to " +
                            std::to_string(sum));
    }
  }
}

int ProbMap::argmax(std::size_t pixel) const {
  int best = 0;
  for (int c = 1; c < num_classes_; ++c) {
    if (prob(c, pixel) > prob(best, pixel)) best = c;
  }
  return best;
}

std::vector<PixelPoint> line_pixels(PixelPoint a, PixelPoint b) {
  std::vector<PixelPoint> out;
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  int x = a.x;
  int y = a.y;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  for (;;) {
    out.push_back({x, y});
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return out;
}

LabelMap rasterize_points(const PointAnnotationSet& annotations, int width, int height,
                          int num_classes) {
  if (width < 1 || height < 1) {
    throw DimensionMismatch("cannot rasterize onto a " + std::to_string(width) + "x" +
                            std::to_string(height) + " raster");
  }
  auto in_bounds = [&](int x, int y) { return x >= 0 && y >= 0 && x < width && y < height; };
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height, 0);

  for (std::size_t i = 0; i < annotations.points.size(); ++i) {
    const auto& p = annotations.points[i];
    if (!in_bounds(p.x, p.y)) {
      std::ostringstream msg;
      msg << "point " << i << " at (" << p.x << "," << p.y << ") lies outside the " << width
          << "x" << height << " image";
      throw BoundsError(msg.str());
    }
    if (p.cls < 1 || p.cls >= num_classes) {
      throw ValidationError("point " + std::to_string(i) + " has class " + std::to_string(p.cls) +
                            ", expected 1.." + std::to_string(num_classes - 1));
    }
    data[static_cast<std::size_t>(p.y) * width + p.x] = static_cast<std::uint8_t>(p.cls);
  }

  if (!annotations.ped_polylines.empty() && num_classes <= kPED) {
    throw ValidationError("PED polylines need at least " + std::to_string(kPED + 1) + " classes");
  }
  for (std::size_t l = 0; l < annotations.ped_polylines.size(); ++l) {
    const auto& line = annotations.ped_polylines[l];
    for (std::size_t v = 0; v < line.size(); ++v) {
      if (!in_bounds(line[v].x, line[v].y)) {
        std::ostringstream msg;
        msg << "PED polyline " << l << " vertex " << v << " at (" << line[v].x << ","
            << line[v].y << ") lies outside the " << width << "x" << height << " image";
        throw BoundsError(msg.str());
      }
    }
    if (line.size() == 1) {
      data[static_cast<std::size_t>(line[0].y) * width + line[0].x] = kPED;
    }
    for (std::size_t v = 1; v < line.size(); ++v) {
      for (auto px : line_pixels(line[v - 1], line[v])) {
        data[static_cast<std::size_t>(px.y) * width + px.x] = kPED;
      }
    }
  }
  return LabelMap(width, height, std::move(data), num_classes);
}

}  // namespace weaklabel
