#include "usbeam/phantom_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "usbeam/container.hpp"
#include "usbeam/error.hpp"

namespace usbeam {
namespace {

constexpr double kMm = 1e-3;
constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x;
  const double vz = b.z - a.z;
  const double len2 = vx * vx + vz * vz;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.z - a.z) * vz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.z - (a.z + t * vz));
}

}  // namespace

Phantom parse_phantom(std::istream& in) {
  std::vector<PointScatterer> scatterers;
  std::vector<SpecularSurface> surfaces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "phantom line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw FormatError(where + "expected 'key = values'");
    const std::string key = trim(line.substr(0, eq));
    std::vector<double> v;
    try {
      v = parse_list(trim(line.substr(eq + 1)));
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
    if (key == "scatterer") {
      if (v.size() != 3) throw FormatError(where + "scatterer needs x, z, reflectivity");
      scatterers.push_back({{v[0] * kMm, v[1] * kMm}, v[2]});
    } else if (key == "surface") {
      if (v.size() < 6 || v.size() % 2 != 0) {
        throw FormatError(where + "surface needs reflectivity, falloff_deg and >= 2 (x, z) pairs");
      }
      SpecularSurface s;
      s.reflectivity = v[0];
      s.angular_falloff = v[1] * kDeg;
      for (std::size_t i = 2; i < v.size(); i += 2) s.polyline.push_back({v[i] * kMm, v[i + 1] * kMm});
      surfaces.push_back(std::move(s));
    } else if (key == "speckle") {
      if (v.size() != 7) {
        throw FormatError(where + "speckle needs x_min, x_max, z_min, z_max, density, amplitude, seed");
      }
      if (v[6] < 0.0 || v[6] != std::floor(v[6])) throw FormatError(where + "speckle seed must be a non-negative integer");
      auto region = speckle_region(v[0] * kMm, v[1] * kMm, v[2] * kMm, v[3] * kMm, v[4] / (kMm * kMm),
                                   v[5], static_cast<std::uint64_t>(v[6]));
      scatterers.insert(scatterers.end(), region.begin(), region.end());
    } else if (key == "bone") {
      if (v.size() != 1 || v[0] < 0.0 || v[0] != std::floor(v[0])) {
        throw FormatError(where + "bone needs one non-negative integer seed");
      }
      const Phantom bone = make_bone_phantom(static_cast<std::uint64_t>(v[0]));
      scatterers.insert(scatterers.end(), bone.scatterers().begin(), bone.scatterers().end());
      surfaces.insert(surfaces.end(), bone.surfaces().begin(), bone.surfaces().end());
    } else {
      throw FormatError(where + "unknown key '" + key + "'");
    }
  }
  return Phantom(std::move(scatterers), std::move(surfaces));
}

Phantom load_phantom(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open phantom '" + path.string() + "'");
  return parse_phantom(in);
}

std::string to_phantom_text(const Phantom& phantom) {
  std::string out;
  for (const auto& s : phantom.scatterers()) {
    out += "scatterer = " + format_exact(s.position.x / kMm) + ", " + format_exact(s.position.z / kMm) +
           ", " + format_exact(s.reflectivity) + "\n";
  }
  for (const auto& s : phantom.surfaces()) {
    out += "surface = " + format_exact(s.reflectivity) + ", " + format_exact(s.angular_falloff / kDeg);
    for (const auto& p : s.polyline) out += ", " + format_exact(p.x / kMm) + ", " + format_exact(p.z / kMm);
    out += "\n";
  }
  return out;
}

Mask phantom_foreground(const Phantom& phantom, const ImagingGrid& grid, double halfwidth) {
  Mask mask(grid.rows(), grid.cols(), 0);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const Point2 p{grid.lateral[c], grid.axial[r]};
      bool inside = false;
      if (!phantom.surfaces().empty()) {
        for (const auto& s : phantom.surfaces()) {
          for (std::size_t i = 0; i + 1 < s.polyline.size() && !inside; ++i) {
            inside = segment_distance(p, s.polyline[i], s.polyline[i + 1]) <= halfwidth;
          }
          if (inside) break;
        }
      } else {
        for (const auto& s : phantom.scatterers()) {
          if (std::hypot(p.x - s.position.x, p.z - s.position.z) <= halfwidth) {
            inside = true;
            break;
          }
        }
      }
      mask(r, c) = inside ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace usbeam
