#include "usbeam/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "usbeam/error.hpp"

namespace usbeam {

void write_pgm16(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n65535\n";
  std::vector<char> bytes;
  bytes.reserve(image.size() * 2);
  for (double v : image.values()) {
    const double u = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    const auto level = static_cast<unsigned>(std::lround(u * 65535.0));
    bytes.push_back(static_cast<char>((level >> 8) & 0xff));
    bytes.push_back(static_cast<char>(level & 0xff));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Image read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string magic;
  std::size_t cols = 0, rows = 0;
  unsigned maxval = 0;
  in >> magic >> cols >> rows >> maxval;
  if (!in || magic != "P5") throw FormatError("'" + path.string() + "' is not a binary PGM");
  if (maxval != 65535) throw FormatError("'" + path.string() + "' is not a 16-bit PGM");
  in.get();  // single whitespace before the raster
  Image img(rows, cols);
  std::vector<unsigned char> bytes(rows * cols * 2);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError("'" + path.string() + "' raster is truncated", static_cast<std::uint64_t>(in.gcount()));
  }
  auto dst = img.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<double>((bytes[2 * i] << 8) | bytes[2 * i + 1]) / 65535.0;
  }
  return img;
}

}  // namespace usbeam
