#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "weaklabel/image.hpp"
#include "weaklabel/superpixel.hpp"

namespace weaklabel::io {

// Byte buffers are carried in std::string.

/// Binary P5 PGM with maxval 255. Comments are accepted on read and never
/// written.
std::string write_pgm(const GrayImage& image);
std::string write_pgm(const LabelMap& labels);
GrayImage read_pgm(std::string_view bytes);
/// Pixel values are class ids and must be below num_classes.
LabelMap read_label_pgm(std::string_view bytes, int num_classes = kNumFluidClasses);

/// Block ids as a 16-bit (maxval 65535, big-endian) P5 PGM.
std::string write_superpixel_pgm(const SuperpixelMap& map);
SuperpixelMap read_superpixel_pgm(std::string_view bytes);

/// Decoded FMAP container before it is interpreted as a ProbMap/TrustMap.
struct FloatRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> values;  // channel-major, then row-major
};

inline constexpr char kFmapMagic[4] = {'F', 'M', 'A', 'P'};
inline constexpr std::uint16_t kFmapVersion = 1;
inline constexpr std::size_t kFmapHeaderSize = 18;

/// "FMAP", u16 version, u32 width, u32 height, u32 channels, then
/// little-endian float32 payload.
std::string write_fmap(const FloatRaster& raster);
std::string write_fmap(const ProbMap& probs);
std::string write_fmap(const TrustMap& trust);
FloatRaster read_fmap(std::string_view bytes);
ProbMap read_probmap(std::string_view bytes);
/// Requires channels == 1.
TrustMap read_trustmap(std::string_view bytes);

/// {"points": [{"x","y","class"}...], "ped_polylines": [[{"x","y"}...]...]}
std::string write_points(const PointAnnotationSet& set);
PointAnnotationSet read_points(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace weaklabel::io
