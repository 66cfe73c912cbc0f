#pragma once

#include <stdexcept>
#include <string>

namespace weaklabel {

/// Root of every error raised by the library. Callers that only need to
/// report a failure can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinates or indices outside the raster they are applied to.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter values (SLIC region size, thresholds, fractions...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Superpixel block id outside 1..K.
class IdError : public Error {
 public:
  using Error::Error;
};

/// Rasters whose width/height/class count disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Value-level invariant violations (class id out of range, trust outside
/// [0,1], probabilities not summing to one).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Cosine similarity requested for an all-zero histogram.
class UndefinedSimilarity : public Error {
 public:
  using Error::Error;
};

/// Two different nonzero classes annotated inside one superpixel block.
class SeedConflict : public Error {
 public:
  SeedConflict(int block, int first_class, int second_class);
  int block() const noexcept { return block_; }

 private:
  int block_;
};

/// No pixel passed any per-class threshold, so no joint can be estimated.
class DegenerateJoint : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File system failures (missing file, unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace weaklabel
