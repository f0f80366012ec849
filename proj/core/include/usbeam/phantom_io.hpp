#ifndef USBEAM_PHANTOM_IO_HPP
#define USBEAM_PHANTOM_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "usbeam/array2d.hpp"
#include "usbeam/simulator.hpp"

namespace usbeam {

/**
 * Phantom description, one `key = values` entry per line, `#` starts a comment.
 * Lengths in mm, angles in degrees:
 *
 *   scatterer = x, z, reflectivity
 *   surface   = reflectivity, falloff_deg, x1, z1, x2, z2[, ...]
 *   speckle   = x_min, x_max, z_min, z_max, density_per_mm2, amplitude, seed
 *   bone      = seed            (the built-in bone phantom)
 */
Phantom parse_phantom(std::istream& in);
Phantom load_phantom(const std::filesystem::path& path);
std::string to_phantom_text(const Phantom& phantom);

/// Pixels within `halfwidth` of any surface, or of any scatterer when the phantom has no surfaces.
Mask phantom_foreground(const Phantom& phantom, const ImagingGrid& grid, double halfwidth);

}  // namespace usbeam

#endif  // USBEAM_PHANTOM_IO_HPP
