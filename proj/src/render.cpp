#include "weaklabel/render.hpp"

#include <png.h>

#include <array>
#include <cstring>
#include <string>

#include "weaklabel/error.hpp"

namespace weaklabel {

namespace {

constexpr std::array<std::array<int, 3>, 4> kClassColors = {{
    {0, 0, 0},
    {230, 40, 40},   // IRF
    {40, 200, 60},   // SRF
    {50, 90, 240},   // PED
}};
constexpr std::array<std::uint8_t, 3> kBoundaryColor = {250, 220, 30};
constexpr int kAlphaPercent = 45;

// RAII holder for png_image so failures never leak decoder state.
struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

RgbImage render_overlay(const GrayImage& image, const SuperpixelMap* superpixels,
                        const LabelMap* labels) {
  const int w = image.width();
  const int h = image.height();
  if (superpixels && (superpixels->width() != w || superpixels->height() != h)) {
    throw DimensionMismatch("overlay superpixels differ in size from the image");
  }
  if (labels && (labels->width() != w || labels->height() != h)) {
    throw DimensionMismatch("overlay labels differ in size from the image");
  }
  std::vector<bool> edges;
  if (superpixels) edges = block_boundaries(*superpixels);

  RgbImage out{w, h, std::vector<std::uint8_t>(3 * image.pixel_count())};
  const auto gray = image.data();
  for (std::size_t p = 0; p < gray.size(); ++p) {
    std::array<int, 3> px = {gray[p], gray[p], gray[p]};
    if (labels && (*labels)[p] != 0) {
      const auto& color = kClassColors[static_cast<std::size_t>((*labels)[p]) % kClassColors.size()];
      for (int c = 0; c < 3; ++c) {
        px[c] = (px[c] * (100 - kAlphaPercent) + color[c] * kAlphaPercent) / 100;
      }
    }
    if (superpixels && edges[p]) {
      for (int c = 0; c < 3; ++c) px[c] = kBoundaryColor[c];
    }
    for (int c = 0; c < 3; ++c) out.rgb[3 * p + c] = static_cast<std::uint8_t>(px[c]);
  }
  return out;
}

std::string encode_png(const RgbImage& image) {
  if (image.width < 1 || image.height < 1 ||
      image.rgb.size() != 3 * static_cast<std::size_t>(image.width) * image.height) {
    throw DimensionMismatch("RGB buffer does not match its dimensions");
  }
  PngImage png;
  png.image.width = static_cast<png_uint_32>(image.width);
  png.image.height = static_cast<png_uint_32>(image.height);
  png.image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, image.rgb.data(), 0, nullptr)) {
    throw FormatError(std::string("PNG encode failed: ") + png.image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, image.rgb.data(), 0, nullptr)) {
    throw FormatError(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

bool is_png(std::string_view bytes) {
  return bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

std::pair<int, int> png_dimensions(std::string_view bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("undecodable PNG: ") + png.image.message);
  }
  return {static_cast<int>(png.image.width), static_cast<int>(png.image.height)};
}

GrayImage decode_png_gray(std::string_view bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("undecodable PNG: ") + png.image.message);
  }
  png.image.format = PNG_FORMAT_GRAY;
  const int w = static_cast<int>(png.image.width);
  const int h = static_cast<int>(png.image.height);
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, data.data(), 0, nullptr)) {
    throw FormatError(std::string("undecodable PNG: ") + png.image.message);
  }
  return GrayImage(w, h, std::move(data));
}

}  // namespace weaklabel
