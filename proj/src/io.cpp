#include "weaklabel/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "weaklabel/error.hpp"

namespace weaklabel::io {

namespace {

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

class HeaderCursor {
 public:
  explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

  // Whitespace and '#' comments (a comment runs to the end of its line).
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_uint(const char* field) {
    skip_separators();
    if (pos_ >= bytes_.size()) throw FormatError(std::string("PGM header truncated before ") + field);
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError(std::string("PGM header: expected a number for ") + field);
    }
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > std::numeric_limits<int>::max()) {
        throw FormatError(std::string("PGM header: ") + field + " is too large");
      }
      ++pos_;
    }
    return static_cast<int>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  char peek() const { return bytes_[pos_]; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

PgmHeader parse_pgm_header(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("not a PNM file (missing 'P' magic)");
  if (bytes[1] != '5') {
    if (bytes[1] >= '1' && bytes[1] <= '7') {
      throw FormatError(std::string("unsupported PNM format P") + bytes[1] +
                        "; only binary P5 graymaps are accepted");
    }
    throw FormatError("not a PNM file (bad magic)");
  }
  HeaderCursor cur(bytes);
  cur.advance(2);
  if (cur.at_end() || !(std::isspace(static_cast<unsigned char>(cur.peek())) || cur.peek() == '#')) {
    throw FormatError("PGM header: missing separator after magic");
  }
  PgmHeader h;
  h.width = cur.read_uint("width");
  h.height = cur.read_uint("height");
  h.maxval = cur.read_uint("maxval");
  if (h.width < 1 || h.height < 1) throw FormatError("PGM dimensions must be positive");
  if (h.maxval < 1 || h.maxval > 65535) throw FormatError("PGM maxval must lie in 1..65535");
  if (cur.at_end() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
    throw FormatError("PGM header: missing whitespace before pixel data");
  }
  cur.advance(1);
  h.payload_offset = cur.pos();
  return h;
}

std::string_view checked_payload(std::string_view bytes, const PgmHeader& h, std::size_t bytes_per_sample) {
  const auto need = static_cast<std::uint64_t>(h.width) * static_cast<std::uint64_t>(h.height) * bytes_per_sample;
  const auto have = static_cast<std::uint64_t>(bytes.size() - h.payload_offset);
  if (have < need) {
    throw FormatError("PGM payload truncated: " + std::to_string(have) + " bytes present, " +
                      std::to_string(need) + " expected");
  }
  return bytes.substr(h.payload_offset, static_cast<std::size_t>(need));
}

std::string pgm_header(int width, int height, int maxval) {
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
         std::to_string(maxval) + "\n";
}

template <class Raster>
std::string write_pgm8(const Raster& r) {
  std::string out = pgm_header(r.width(), r.height(), 255);
  const auto data = r.data();
  out.append(reinterpret_cast<const char*>(data.data()), data.size());
  return out;
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(b[at + k]);
  return v;
}

}  // namespace

std::string write_pgm(const GrayImage& image) { return write_pgm8(image); }

std::string write_pgm(const LabelMap& labels) { return write_pgm8(labels); }

GrayImage read_pgm(std::string_view bytes) {
  const auto h = parse_pgm_header(bytes);
  if (h.maxval != 255) {
    throw FormatError("PGM maxval is " + std::to_string(h.maxval) + "; only 255 is supported");
  }
  const auto payload = checked_payload(bytes, h, 1);
  return GrayImage(h.width, h.height, std::vector<std::uint8_t>(payload.begin(), payload.end()));
}

LabelMap read_label_pgm(std::string_view bytes, int num_classes) {
  const auto image = read_pgm(bytes);
  const auto data = image.data();
  return LabelMap(image.width(), image.height(), std::vector<std::uint8_t>(data.begin(), data.end()),
                  num_classes);
}

std::string write_superpixel_pgm(const SuperpixelMap& map) {
  if (map.num_blocks() > 65535) {
    throw FormatError(std::to_string(map.num_blocks()) + " superpixel blocks do not fit a 16-bit PGM");
  }
  std::string out = pgm_header(map.width(), map.height(), 65535);
  out.reserve(out.size() + 2 * map.pixel_count());
  for (auto id : map.assignment()) {
    out.push_back(static_cast<char>((id >> 8) & 0xff));
    out.push_back(static_cast<char>(id & 0xff));
  }
  return out;
}

SuperpixelMap read_superpixel_pgm(std::string_view bytes) {
  const auto h = parse_pgm_header(bytes);
  if (h.maxval < 256) throw FormatError("superpixel PGM must use 16-bit samples (maxval > 255)");
  const auto payload = checked_payload(bytes, h, 2);
  std::vector<std::int32_t> ids(static_cast<std::size_t>(h.width) * h.height);
  for (std::size_t p = 0; p < ids.size(); ++p) {
    ids[p] = (static_cast<unsigned char>(payload[2 * p]) << 8) | static_cast<unsigned char>(payload[2 * p + 1]);
  }
  return SuperpixelMap(h.width, h.height, std::move(ids));
}

std::string write_fmap(const FloatRaster& raster) {
  const auto expected = static_cast<std::uint64_t>(raster.width) * raster.height * raster.channels;
  if (raster.width < 1 || raster.height < 1 || raster.channels < 1 || raster.values.size() != expected) {
    throw DimensionMismatch("float raster data does not match its header");
  }
  std::string out(kFmapMagic, sizeof kFmapMagic);
  put_u16(out, kFmapVersion);
  put_u32(out, static_cast<std::uint32_t>(raster.width));
  put_u32(out, static_cast<std::uint32_t>(raster.height));
  put_u32(out, static_cast<std::uint32_t>(raster.channels));
  out.reserve(out.size() + 4 * raster.values.size());
  for (float f : raster.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

std::string write_fmap(const ProbMap& probs) {
  return write_fmap(FloatRaster{probs.width(), probs.height(), probs.num_classes(),
                                {probs.data().begin(), probs.data().end()}});
}

std::string write_fmap(const TrustMap& trust) {
  return write_fmap(FloatRaster{trust.width(), trust.height(), 1, {trust.data().begin(), trust.data().end()}});
}

FloatRaster read_fmap(std::string_view bytes) {
  if (bytes.size() < kFmapHeaderSize) {
    throw FormatError("FMAP header truncated: " + std::to_string(bytes.size()) + " bytes present, " +
                      std::to_string(kFmapHeaderSize) + " expected");
  }
  if (std::memcmp(bytes.data(), kFmapMagic, sizeof kFmapMagic) != 0) throw FormatError("bad FMAP magic");
  const std::uint16_t version = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[4]) |
                                                           (static_cast<unsigned char>(bytes[5]) << 8));
  if (version != kFmapVersion) {
    throw FormatError("FMAP version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kFmapVersion) + ")");
  }
  const std::uint32_t w = get_u32(bytes, 6);
  const std::uint32_t h = get_u32(bytes, 10);
  const std::uint32_t c = get_u32(bytes, 14);
  constexpr auto kMax = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
  if (w < 1 || h < 1 || c < 1 || w > kMax || h > kMax || c > kMax) {
    throw FormatError("FMAP dimensions out of range");
  }
  // at most 2^93 in principle, so compare in long double before trusting a product
  const long double need_ld = 4.0L * w * h * c;
  const std::uint64_t have = bytes.size() - kFmapHeaderSize;
  if (need_ld > static_cast<long double>(have)) {
    std::ostringstream msg;
    msg.precision(0);
    msg << std::fixed << "FMAP payload truncated: " << have << " bytes present, " << need_ld << " expected";
    throw FormatError(msg.str());
  }
  const auto need = static_cast<std::uint64_t>(4) * w * h * c;
  if (have != need) {
    throw FormatError("FMAP length mismatch: " + std::to_string(have) + " payload bytes, " +
                      std::to_string(need) + " expected");
  }
  FloatRaster out{static_cast<int>(w), static_cast<int>(h), static_cast<int>(c), {}};
  out.values.resize(need / 4);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = std::bit_cast<float>(get_u32(bytes, kFmapHeaderSize + 4 * k));
  }
  return out;
}

ProbMap read_probmap(std::string_view bytes) {
  auto r = read_fmap(bytes);
  return ProbMap(r.width, r.height, r.channels, std::move(r.values));
}

TrustMap read_trustmap(std::string_view bytes) {
  auto r = read_fmap(bytes);
  if (r.channels != 1) {
    throw FormatError("trust map FMAP must have 1 channel, found " + std::to_string(r.channels));
  }
  return TrustMap(r.width, r.height, std::move(r.values));
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

int coordinate(const json& obj, const char* key, const std::string& where) {
  const std::string field = where + "." + key;
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(field + " is missing");
  if (!it->is_number_integer()) throw ValidationError(field + " must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw ValidationError(field + " is negative (" + std::to_string(v) + ")");
  if (v > std::numeric_limits<int>::max()) throw ValidationError(field + " is too large");
  return static_cast<int>(v);
}

}  // namespace

std::string write_points(const PointAnnotationSet& set) {
  ordered_json doc;
  doc["points"] = ordered_json::array();
  for (const auto& p : set.points) {
    ordered_json o;
    o["x"] = p.x;
    o["y"] = p.y;
    o["class"] = p.cls;
    doc["points"].push_back(std::move(o));
  }
  doc["ped_polylines"] = ordered_json::array();
  for (const auto& line : set.ped_polylines) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : line) {
      ordered_json o;
      o["x"] = v.x;
      o["y"] = v.y;
      arr.push_back(std::move(o));
    }
    doc["ped_polylines"].push_back(std::move(arr));
  }
  return doc.dump(2) + "\n";
}

PointAnnotationSet read_points(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed points document: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("points document must be a JSON object");

  PointAnnotationSet set;
  if (auto it = doc.find("points"); it != doc.end()) {
    if (!it->is_array()) throw FormatError("points must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& item = (*it)[i];
      const std::string where = "points[" + std::to_string(i) + "]";
      ClassPoint p;
      p.x = coordinate(item, "x", where);
      p.y = coordinate(item, "y", where);
      const auto cls = item.find("class");
      if (cls == item.end()) throw FormatError(where + ".class is missing");
      if (!cls->is_number_integer()) throw ValidationError(where + ".class must be an integer");
      const auto c = cls->get<std::int64_t>();
      if (c < kIRF || c > kPED) {
        throw ValidationError(where + ".class: unknown class id " + std::to_string(c) + " (expected 1, 2 or 3)");
      }
      p.cls = static_cast<int>(c);
      set.points.push_back(p);
    }
  }
  if (auto it = doc.find("ped_polylines"); it != doc.end()) {
    if (!it->is_array()) throw FormatError("ped_polylines must be an array");
    for (std::size_t l = 0; l < it->size(); ++l) {
      const auto& line = (*it)[l];
      const std::string where = "ped_polylines[" + std::to_string(l) + "]";
      if (!line.is_array()) throw FormatError(where + " must be an array of vertices");
      if (line.empty()) throw ValidationError(where + " has no vertices");
      std::vector<PixelPoint> verts;
      for (std::size_t v = 0; v < line.size(); ++v) {
        const std::string vw = where + "[" + std::to_string(v) + "]";
        verts.push_back({coordinate(line[v], "x", vw), coordinate(line[v], "y", vw)});
      }
      set.ped_polylines.push_back(std::move(verts));
    }
  }
  return set;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path);
  return bytes;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace weaklabel::io
