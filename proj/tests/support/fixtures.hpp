#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "weaklabel/image.hpp"

namespace fixtures {

using weaklabel::GrayImage;
using weaklabel::LabelMap;
using weaklabel::PointAnnotationSet;
using weaklabel::ProbMap;

// Deterministic small integer noise in [-amp, amp] from pixel coordinates.
inline int hash_noise(int x, int y, int amp, std::uint32_t salt = 0) {
  std::uint32_t h = static_cast<std::uint32_t>(x) * 73856093u ^ static_cast<std::uint32_t>(y) * 19349663u ^
                    (salt * 83492791u);
  h ^= h >> 13;
  h *= 0x5bd1e995u;
  h ^= h >> 15;
  return static_cast<int>(h % static_cast<std::uint32_t>(2 * amp + 1)) - amp;
}

inline std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

/// 39x39, three 13-wide vertical stripes of intensity 50 / 50 / 200.
inline GrayImage stripes_39() {
  std::vector<std::uint8_t> d(39 * 39);
  for (int y = 0; y < 39; ++y) {
    for (int x = 0; x < 39; ++x) d[y * 39 + x] = x < 26 ? 50 : 200;
  }
  return GrayImage(39, 39, std::move(d));
}

/// The "stripe fixture": 64x64, four 16-wide vertical stripes, the first two
/// close in intensity, plus a slow vertical drift and pixel noise so that
/// histogram similarity between blocks spans the threshold range.
inline GrayImage noisy_stripes() {
  const int w = 64, h = 64;
  const int means[4] = {60, 66, 120, 190};
  std::vector<std::uint8_t> d(w * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int base = means[x / 16] + (y / 16) * 2;
      d[y * w + x] = clamp8(base + hash_noise(x, y, 6));
    }
  }
  return GrayImage(w, h, std::move(d));
}

inline PointAnnotationSet noisy_stripes_points() {
  PointAnnotationSet s;
  s.points.push_back({8, 20, weaklabel::kIRF});
  s.points.push_back({56, 8, weaklabel::kSRF});
  s.ped_polylines.push_back({{34, 60}, {46, 60}});
  return s;
}

inline GrayImage uniform(int w, int h, std::uint8_t v = 128) { return GrayImage(w, h, v); }

// Shapes for the generator corpus.
inline GrayImage stripes(int w, int h, int width_px, std::vector<int> levels, bool vertical, int noise,
                         std::uint32_t salt) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int band = (vertical ? x : y) / width_px;
      d[y * w + x] = clamp8(levels[band % levels.size()] + hash_noise(x, y, noise, salt));
    }
  }
  return GrayImage(w, h, std::move(d));
}

inline GrayImage nested_rectangles(int w, int h, int rings, int noise, std::uint32_t salt) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int edge = std::min({x, y, w - 1 - x, h - 1 - y});
      const int ring = std::min(edge * rings / (std::min(w, h) / 2 + 1), rings - 1);
      d[y * w + x] = clamp8(40 + ring * (180 / std::max(rings - 1, 1)) + hash_noise(x, y, noise, salt));
    }
  }
  return GrayImage(w, h, std::move(d));
}

inline GrayImage gradient_ramp(int w, int h, bool horizontal, int noise, std::uint32_t salt) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int t = horizontal ? x * 255 / std::max(w - 1, 1) : y * 255 / std::max(h - 1, 1);
      d[y * w + x] = clamp8(t + hash_noise(x, y, noise, salt));
    }
  }
  return GrayImage(w, h, std::move(d));
}

/// Random point set: a few class 1/2 clicks and optionally one PED polyline.
inline PointAnnotationSet random_points(std::mt19937& rng, int w, int h) {
  PointAnnotationSet s;
  std::uniform_int_distribution<int> xs(0, w - 1), ys(0, h - 1), cls(1, 3), count(1, 3);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) s.points.push_back({xs(rng), ys(rng), cls(rng)});
  if (rng() % 2 == 0) {
    const int y = std::uniform_int_distribution<int>(h / 2, h - 1)(rng);
    const int x0 = xs(rng);
    const int x1 = xs(rng);
    s.ped_polylines.push_back({{x0, y}, {x1, std::max(0, y - 2)}});
  }
  return s;
}

/// One-hot probabilities for a label map.
inline ProbMap one_hot(const LabelMap& truth) {
  const int m = truth.num_classes();
  const std::size_t n = truth.pixel_count();
  std::vector<float> p(m * n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) p[truth[i] * n + i] = 1.0f;
  return ProbMap(truth.width(), truth.height(), m, std::move(p));
}

/// Random probabilities: Dirichlet-like draws, normalized per pixel.
inline ProbMap random_probs(std::mt19937& rng, int w, int h, int m, double peak = 0.0,
                            const LabelMap* favored = nullptr) {
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<float> p(m * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(m);
    double sum = 0.0;
    for (int c = 0; c < m; ++c) {
      v[c] = g(rng);
      if (favored && (*favored)[i] == c) v[c] += peak;
      sum += v[c];
    }
    for (int c = 0; c < m; ++c) p[c * n + i] = static_cast<float>(v[c] / sum);
  }
  return ProbMap(w, h, m, std::move(p));
}

inline LabelMap random_labels(std::mt19937& rng, int w, int h, int m) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(w) * h);
  std::uniform_int_distribution<int> c(0, m - 1);
  for (auto& v : d) v = static_cast<std::uint8_t>(c(rng));
  return LabelMap(w, h, std::move(d), m);
}

/// Ground truth with four large class regions (quadrant-ish blobs).
inline LabelMap quadrant_truth(int w, int h) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) d[y * w + x] = static_cast<std::uint8_t>((x >= w / 2) + 2 * (y >= h / 2));
  }
  return LabelMap(w, h, std::move(d), 4);
}

struct Corruption {
  LabelMap noisy;
  std::vector<std::uint8_t> flip_mask;
};

/// Flips `patches` random rectangles (each side 1..max_side) to a different
/// class: every pixel moves to (truth + offset) mod m with a per-patch
/// offset in 1..m-1, so later patches never undo earlier flips.
inline Corruption flip_patches(const LabelMap& truth, std::mt19937& rng, int patches, int max_side) {
  const int w = truth.width(), h = truth.height(), m = truth.num_classes();
  std::vector<std::uint8_t> d(truth.data().begin(), truth.data().end());
  std::uniform_int_distribution<int> side(1, max_side), offset(1, m - 1);
  for (int k = 0; k < patches; ++k) {
    const int pw = side(rng), ph = side(rng);
    const int x0 = std::uniform_int_distribution<int>(0, w - pw)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, h - ph)(rng);
    const int off = offset(rng);
    for (int y = y0; y < y0 + ph; ++y) {
      for (int x = x0; x < x0 + pw; ++x) {
        const int i = y * w + x;
        d[i] = static_cast<std::uint8_t>((truth[i] + off) % m);
      }
    }
  }
  std::vector<std::uint8_t> mask(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mask[i] = d[i] != truth[i];
  return {LabelMap(w, h, std::move(d), m), std::move(mask)};
}

}  // namespace fixtures
