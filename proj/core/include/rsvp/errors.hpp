#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsvp {

// Malformed input bytes (bad JSON, bad PNG). Carries the byte offset or line
// number when the underlying parser reports one, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset = 0)
      : std::runtime_error(msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Structurally valid input that violates a schema. `path` is a dotted
// field path such as "images[2].instances[0].bbox".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A class id appears in a raster but not in the legend (and is not ignore_id),
// or the legend is empty while non-ignore pixels exist.
class LegendError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor dimension mismatch.
class ShapeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No instruction template registered for a task.
class TemplateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A template slot could not be filled (e.g. mark without a category).
class SlotError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Annotation provider failure after retries, or empty provider output.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& msg, int attempts = 1)
      : std::runtime_error(msg), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

}  // namespace rsvp
