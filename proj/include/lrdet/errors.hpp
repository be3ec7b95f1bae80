#pragma once

#include <stdexcept>
#include <string>

namespace lrdet {

// Base class for all domain/data errors. The CLI maps these to exit code 1;
// usage errors (bad flags) are handled by the argument parser and exit 2.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct BehindCamera : Error {
  explicit BehindCamera(const std::string& msg = "point is behind the camera") : Error(msg) {}
};
struct NonPositiveDepth : Error {
  explicit NonPositiveDepth(const std::string& msg = "depth must be > 0") : Error(msg) {}
};

// range tooling
struct InvalidInterval : Error {
  explicit InvalidInterval(const std::string& msg = "invalid range interval") : Error(msg) {}
};
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& msg = "range outside binning span") : Error(msg) {}
};
struct EmptyBin : Error {
  explicit EmptyBin(const std::string& msg = "active bin has zero count") : Error(msg) {}
};
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg = "input length mismatch") : Error(msg) {}
};

// losses
struct DomainError : Error {
  explicit DomainError(const std::string& msg = "argument outside valid domain") : Error(msg) {}
};

// virtual points
struct NoLidarInView : Error {
  explicit NoLidarInView(const std::string& msg = "no projected lidar points available") : Error(msg) {}
};
struct UnknownCamera : Error {
  explicit UnknownCamera(const std::string& msg = "mask references unknown camera") : Error(msg) {}
};

// detector
struct EmptyCluster : Error {
  explicit EmptyCluster(const std::string& msg = "cannot fit a box to an empty cluster") : Error(msg) {}
};

// evaluation
struct NoGroundTruth : Error {
  explicit NoGroundTruth(const std::string& msg = "average precision needs ground truth") : Error(msg) {}
};

// simulator
struct PlacementFailure : Error {
  explicit PlacementFailure(const std::string& msg = "could not place objects without overlap") : Error(msg) {}
};

}  // namespace lrdet
