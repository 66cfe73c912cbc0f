#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "weaklabel/image.hpp"
#include "weaklabel/superpixel.hpp"

namespace weaklabel {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // interleaved, row-major
};

/// The grayscale image with translucent class colors (IRF red, SRF green,
/// PED blue) and yellow superpixel boundaries. Either layer may be null.
RgbImage render_overlay(const GrayImage& image, const SuperpixelMap* superpixels,
                        const LabelMap* labels);

std::string encode_png(const RgbImage& image);

bool is_png(std::string_view bytes);
/// Width and height from the PNG header without decoding pixels.
std::pair<int, int> png_dimensions(std::string_view bytes);
/// Any PNG color type, converted to 8-bit gray.
GrayImage decode_png_gray(std::string_view bytes);

}  // namespace weaklabel
