#pragma once

#include <stdexcept>
#include <string>

namespace pwlstab {

/// Parameters fall outside the regime an analysis is defined for.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// g(z) vanished on the unit sphere, so D and G are undefined.
class ZeroImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A polygon operation produced or received an invalid shape.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing an output file failed.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pwlstab
