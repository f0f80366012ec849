#ifndef USBEAM_PGM_HPP
#define USBEAM_PGM_HPP

#include <filesystem>

#include "usbeam/array2d.hpp"

namespace usbeam {

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples). Values are clamped to [0, 1]
/// and scaled to 0..65535 with round-to-nearest.
void write_pgm16(const std::filesystem::path& path, const Image& image);

/// Reads a P5 file with maxval 65535 back into [0, 1].
Image read_pgm16(const std::filesystem::path& path);

}  // namespace usbeam

#endif  // USBEAM_PGM_HPP
