#ifndef USBEAM_CONTAINER_HPP
#define USBEAM_CONTAINER_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "usbeam/array2d.hpp"

namespace usbeam {

/// N-d float32 payload with its shape.
struct FloatArray {
  std::vector<std::uint64_t> shape;
  std::vector<float> data;

  static FloatArray from_image(const Image& image);
  static FloatArray from_mask(const Mask& mask);
  /// Requires a 2-D shape.
  Image to_image() const;
  Mask to_mask() const;

  friend bool operator==(const FloatArray&, const FloatArray&) = default;
};

/**
 * "USBF1" container. Layout, all integers little-endian:
 *
 *   magic "USBF1" (5 bytes) | u16 version
 *   u32 entry count, then per entry: u32 key length, key UTF-8, u32 value length, value UTF-8
 *   u32 array count, then per array: u32 name length, name UTF-8, u32 ndim, u64 dims[ndim],
 *       float32 data[prod(dims)] in row-major order
 */
class Container {
 public:
  static constexpr std::uint16_t kVersion = 1;
  static constexpr char kMagic[] = "USBF1";

  /// Inserts or replaces; insertion order is preserved on write.
  void set(const std::string& key, std::string value);
  std::optional<std::string> find(const std::string& key) const;
  /// Throws FormatError if the key is missing.
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;

  void add_array(std::string name, FloatArray array);
  const FloatArray* find_array(const std::string& name) const;
  const FloatArray& array(const std::string& name) const;

  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }
  const std::vector<std::pair<std::string, FloatArray>>& arrays() const { return arrays_; }

  friend bool operator==(const Container&, const Container&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> metadata_;
  std::vector<std::pair<std::string, FloatArray>> arrays_;
};

std::vector<std::uint8_t> encode_container(const Container& container);
/// Throws FormatError with the byte offset of the first malformed or missing byte.
Container decode_container(std::span<const std::uint8_t> bytes);

void save_container(const std::filesystem::path& path, const Container& container);
Container load_container(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_exact(double value);
std::string format_list(std::span<const double> values);
std::vector<double> parse_list(const std::string& text);

}  // namespace usbeam

#endif  // USBEAM_CONTAINER_HPP
