#ifndef USBEAM_DELAYS_HPP
#define USBEAM_DELAYS_HPP

#include <cmath>

#include "usbeam/acquisition.hpp"

namespace usbeam {

/// Plane-wave arrival time at `pixel` for a wave steered by `angle` (rad).
inline double transmit_delay(Point2 pixel, double angle, double sound_speed) {
  return (pixel.z * std::cos(angle) + pixel.x * std::sin(angle)) / sound_speed;
}

/// Return path from `pixel` to an element at (element_x, 0).
inline double receive_delay(Point2 pixel, double element_x, double sound_speed) {
  const double dx = pixel.x - element_x;
  return std::sqrt(pixel.z * pixel.z + dx * dx) / sound_speed;
}

}  // namespace usbeam

#endif  // USBEAM_DELAYS_HPP
