#include "usbeam/container.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "usbeam/error.hpp"

namespace usbeam {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "float32 payloads require IEEE-754");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void uint(U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void text(const std::string& s) {
    uint(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint64_t offset() const { return pos_; }

  void need(std::uint64_t n, const char* what) const {
    if (n > data_.size() - pos_) {
      throw FormatError(std::string("truncated container while reading ") + what, pos_);
    }
  }
  template <typename U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return value;
  }
  std::string text(const char* what) {
    const auto n = uint<std::uint32_t>(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> raw(std::uint64_t n, const char* what) {
    need(n, what);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t pos_ = 0;
};

std::uint64_t element_count(const std::vector<std::uint64_t>& shape) {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

}  // namespace

FloatArray FloatArray::from_image(const Image& image) {
  FloatArray a{{image.rows(), image.cols()}, std::vector<float>(image.size())};
  const auto src = image.values();
  for (std::size_t i = 0; i < src.size(); ++i) a.data[i] = static_cast<float>(src[i]);
  return a;
}

FloatArray FloatArray::from_mask(const Mask& mask) {
  FloatArray a{{mask.rows(), mask.cols()}, std::vector<float>(mask.size())};
  const auto src = mask.values();
  for (std::size_t i = 0; i < src.size(); ++i) a.data[i] = src[i] ? 1.0f : 0.0f;
  return a;
}

Image FloatArray::to_image() const {
  if (shape.size() != 2) throw FormatError("expected a 2-D array");
  Image img(shape[0], shape[1]);
  auto dst = img.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<double>(data[i]);
  return img;
}

Mask FloatArray::to_mask() const {
  if (shape.size() != 2) throw FormatError("expected a 2-D array");
  Mask m(shape[0], shape[1]);
  auto dst = m.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = data[i] != 0.0f ? 1 : 0;
  return m;
}

void Container::set(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata_.emplace_back(key, std::move(value));
}

std::optional<std::string> Container::find(const std::string& key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const std::string& Container::get(const std::string& key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return v;
  }
  throw FormatError("container is missing metadata key '" + key + "'");
}

double Container::get_double(const std::string& key) const {
  const auto& text = get(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw FormatError("metadata key '" + key + "' is not a number: '" + text + "'");
  }
}

std::int64_t Container::get_int(const std::string& key) const {
  const auto& text = get(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("metadata key '" + key + "' is not an integer: '" + text + "'");
  }
  return v;
}

void Container::add_array(std::string name, FloatArray array) {
  if (element_count(array.shape) != array.data.size()) {
    throw ValidationError("array '" + name + "' data does not match its shape");
  }
  arrays_.emplace_back(std::move(name), std::move(array));
}

const FloatArray* Container::find_array(const std::string& name) const {
  for (const auto& [n, a] : arrays_) {
    if (n == name) return &a;
  }
  return nullptr;
}

const FloatArray& Container::array(const std::string& name) const {
  if (const auto* a = find_array(name)) return *a;
  throw FormatError("container is missing array '" + name + "'");
}

std::vector<std::uint8_t> encode_container(const Container& container) {
  Writer w;
  w.bytes(Container::kMagic, 5);
  w.uint<std::uint16_t>(Container::kVersion);
  w.uint(static_cast<std::uint32_t>(container.metadata().size()));
  for (const auto& [k, v] : container.metadata()) {
    w.text(k);
    w.text(v);
  }
  w.uint(static_cast<std::uint32_t>(container.arrays().size()));
  for (const auto& [name, a] : container.arrays()) {
    w.text(name);
    w.uint(static_cast<std::uint32_t>(a.shape.size()));
    for (auto d : a.shape) w.uint<std::uint64_t>(d);
    for (float f : a.data) w.uint(std::bit_cast<std::uint32_t>(f));
  }
  return w.take();
}

Container decode_container(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.raw(5, "magic");
  if (std::memcmp(magic.data(), Container::kMagic, 5) != 0) {
    throw FormatError("bad magic: expected \"USBF1\"", 0);
  }
  const auto version_offset = r.offset();
  const auto version = r.uint<std::uint16_t>("version");
  if (version != Container::kVersion) {
    throw FormatError("unsupported container version " + std::to_string(version) + " (expected " +
                          std::to_string(Container::kVersion) + ")",
                      version_offset);
  }
  Container c;
  const auto entries = r.uint<std::uint32_t>("metadata count");
  for (std::uint32_t i = 0; i < entries; ++i) {
    auto key = r.text("metadata key");
    auto value = r.text("metadata value");
    c.set(key, std::move(value));
  }
  const auto arrays = r.uint<std::uint32_t>("array count");
  for (std::uint32_t i = 0; i < arrays; ++i) {
    FloatArray a;
    auto name = r.text("array name");
    const auto ndim = r.uint<std::uint32_t>("array rank");
    std::uint64_t count = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      const auto dim = r.uint<std::uint64_t>("array shape");
      if (dim != 0 && count > std::numeric_limits<std::uint64_t>::max() / 4 / dim) {
        throw FormatError("array '" + name + "' shape overflows", r.offset());
      }
      count *= dim;
      a.shape.push_back(dim);
    }
    const auto payload = r.raw(count * 4, "array payload");
    a.data.resize(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(payload[k * 4 + b]) << (8 * b);
      a.data[k] = std::bit_cast<float>(bits);
    }
    c.add_array(std::move(name), std::move(a));
  }
  if (!r.done()) throw FormatError("trailing bytes after the last array", r.offset());
  return c;
}

void save_container(const std::filesystem::path& path, const Container& container) {
  const auto bytes = encode_container(container);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Container load_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_container(bytes);
}

std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_list(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_exact(values[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw FormatError("empty item in list '" + text + "'");
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw FormatError("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace usbeam
