#include "usbeam/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "usbeam/container.hpp"
#include "usbeam/error.hpp"

namespace usbeam {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string window_name(Window w) {
  switch (w) {
    case Window::rectangular: return "rectangular";
    case Window::hann: return "hann";
    case Window::tukey: return "tukey";
  }
  return "hann";
}

Window parse_window(const std::string& s) {
  if (s == "rectangular") return Window::rectangular;
  if (s == "hann") return Window::hann;
  if (s == "tukey") return Window::tukey;
  throw ValidationError("unknown apodization window '" + s + "'");
}

std::string norm_name(SymmetryNorm n) {
  return n == SymmetryNorm::energy ? "energy" : "amplitude";
}

SymmetryNorm parse_norm(const std::string& s) {
  if (s == "energy") return SymmetryNorm::energy;
  if (s == "amplitude") return SymmetryNorm::amplitude;
  throw ValidationError("unknown symmetry_norm '" + s + "'");
}

double to_double(const std::string& key, const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 1) throw ValidationError("config key '" + key + "' expects one number");
  return v.front();
}

long long to_integer(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) throw ValidationError("config key '" + key + "' expects an integer");
  return static_cast<long long>(v);
}

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"geometry.elements",
       [](PipelineConfig& c, const std::string& v) { c.geometry.element_count = static_cast<int>(to_integer("elements", v)); }},
      {"geometry.pitch_mm",
       [](PipelineConfig& c, const std::string& v) { c.geometry.pitch = to_double("pitch_mm", v) * 1e-3; }},
      {"geometry.center_frequency_mhz",
       [](PipelineConfig& c, const std::string& v) { c.geometry.center_frequency = to_double("center_frequency_mhz", v) * 1e6; }},
      {"geometry.sampling_frequency_mhz",
       [](PipelineConfig& c, const std::string& v) { c.geometry.sampling_frequency = to_double("sampling_frequency_mhz", v) * 1e6; }},
      {"geometry.sound_speed",
       [](PipelineConfig& c, const std::string& v) { c.geometry.sound_speed = to_double("sound_speed", v); }},
      {"transmit.angles",
       [](PipelineConfig& c, const std::string& v) { c.angle_count = static_cast<int>(to_integer("angles", v)); }},
      {"transmit.angle_mode",
       [](PipelineConfig& c, const std::string& v) {
         if (v == "span") c.angle_mode = AngleMode::span;
         else if (v == "eq2") c.angle_mode = AngleMode::eq2;
         else throw ValidationError("angle_mode must be 'span' or 'eq2'");
       }},
      {"transmit.max_angle_deg",
       [](PipelineConfig& c, const std::string& v) { c.max_angle = to_double("max_angle_deg", v) * kDeg; }},
      {"transmit.fractional_bandwidth",
       [](PipelineConfig& c, const std::string& v) { c.fractional_bandwidth = to_double("fractional_bandwidth", v); }},
      {"grid.x_min_mm", [](PipelineConfig& c, const std::string& v) { c.x_min = to_double("x_min_mm", v) * 1e-3; }},
      {"grid.x_max_mm", [](PipelineConfig& c, const std::string& v) { c.x_max = to_double("x_max_mm", v) * 1e-3; }},
      {"grid.dx_mm", [](PipelineConfig& c, const std::string& v) { c.dx = to_double("dx_mm", v) * 1e-3; }},
      {"grid.z_min_mm", [](PipelineConfig& c, const std::string& v) { c.z_min = to_double("z_min_mm", v) * 1e-3; }},
      {"grid.z_max_mm", [](PipelineConfig& c, const std::string& v) { c.z_max = to_double("z_max_mm", v) * 1e-3; }},
      {"grid.dz_mm", [](PipelineConfig& c, const std::string& v) { c.dz = to_double("dz_mm", v) * 1e-3; }},
      {"beamform.window",
       [](PipelineConfig& c, const std::string& v) { c.apodization.window = parse_window(v); }},
      {"beamform.tukey_ratio",
       [](PipelineConfig& c, const std::string& v) { c.apodization.tukey_ratio = to_double("tukey_ratio", v); }},
      {"beamform.f_number",
       [](PipelineConfig& c, const std::string& v) { c.apodization.f_number = to_double("f_number", v); }},
      {"beamform.dynamic_range_db",
       [](PipelineConfig& c, const std::string& v) { c.dynamic_range = to_double("dynamic_range_db", v); }},
      {"beamform.threads",
       [](PipelineConfig& c, const std::string& v) { c.threads = static_cast<unsigned>(to_integer("threads", v)); }},
      {"bpm.wavelengths", [](PipelineConfig& c, const std::string& v) { c.bpm.bank.wavelengths = parse_list(v); }},
      {"bpm.sigma_on_f",
       [](PipelineConfig& c, const std::string& v) { c.bpm.bank.sigma_on_f = to_double("sigma_on_f", v); }},
      {"bpm.tau_fraction",
       [](PipelineConfig& c, const std::string& v) { c.bpm.tau_fraction = to_double("tau_fraction", v); }},
      {"bpm.symmetry_norm",
       [](PipelineConfig& c, const std::string& v) { c.bpm.symmetry_norm = parse_norm(v); }},
      {"bpm.shadow_sigma",
       [](PipelineConfig& c, const std::string& v) { c.bpm.shadow_sigma = to_double("shadow_sigma", v); }},
      {"enhance.alpha", [](PipelineConfig& c, const std::string& v) { c.weights.alpha = to_double("alpha", v); }},
      {"enhance.beta", [](PipelineConfig& c, const std::string& v) { c.weights.beta = to_double("beta", v); }},
      {"enhance.gamma", [](PipelineConfig& c, const std::string& v) { c.weights.gamma = to_double("gamma", v); }},
      {"metrics.ssi_bins",
       [](PipelineConfig& c, const std::string& v) { c.metrics.ssi_bins = static_cast<int>(to_integer("ssi_bins", v)); }},
      {"metrics.dilation_radius",
       [](PipelineConfig& c, const std::string& v) { c.metrics.dilation_radius = static_cast<int>(to_integer("dilation_radius", v)); }},
      {"metrics.roi_halfwidth_mm",
       [](PipelineConfig& c, const std::string& v) { c.roi_halfwidth = to_double("roi_halfwidth_mm", v) * 1e-3; }},
      {"run.seed",
       [](PipelineConfig& c, const std::string& v) {
         const long long s = to_integer("seed", v);
         if (s < 0) throw ValidationError("seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"run.noise_snr_db",
       [](PipelineConfig& c, const std::string& v) {
         if (v == "off") c.noise_snr_db.reset();
         else c.noise_snr_db = to_double("noise_snr_db", v);
       }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  geometry.validate();
  pulse().validate();
  if (angle_count < 1) throw ValidationError("angles must be >= 1");
  if (angle_mode == AngleMode::eq2 && angle_count > geometry.element_count) {
    throw ValidationError("eq2 angle mode allows at most element_count angles");
  }
  if (!(max_angle >= 0.0 && max_angle < std::numbers::pi / 2)) {
    throw ValidationError("max_angle_deg must be in [0, 90)");
  }
  grid();
  apodization.validate();
  if (!(dynamic_range > 0.0)) throw ValidationError("dynamic_range_db must be > 0");
  bpm.validate();
  weights.validate();
  metrics.validate();
  if (!(roi_halfwidth > 0.0)) throw ValidationError("roi_halfwidth_mm must be > 0");
  if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw ValidationError("noise_snr_db must be finite");
}

std::vector<double> PipelineConfig::angles() const {
  return angle_mode == AngleMode::eq2 ? steering_angle_set(geometry, angle_count)
                                      : uniform_angle_span(angle_count, max_angle);
}

std::string PipelineConfig::canonical_text() const {
  std::string out;
  auto put = [&](const char* key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  auto num = [&](const char* key, double v) { put(key, format_exact(v)); };
  num("geometry.element_count", geometry.element_count);
  num("geometry.pitch", geometry.pitch);
  num("geometry.center_frequency", geometry.center_frequency);
  num("geometry.sampling_frequency", geometry.sampling_frequency);
  num("geometry.sound_speed", geometry.sound_speed);
  num("transmit.fractional_bandwidth", fractional_bandwidth);
  num("transmit.angle_count", angle_count);
  put("transmit.angle_mode", angle_mode == AngleMode::eq2 ? "eq2" : "span");
  num("transmit.max_angle", max_angle);
  num("grid.x_min", x_min);
  num("grid.x_max", x_max);
  num("grid.dx", dx);
  num("grid.z_min", z_min);
  num("grid.z_max", z_max);
  num("grid.dz", dz);
  put("beamform.window", window_name(apodization.window));
  num("beamform.tukey_ratio", apodization.tukey_ratio);
  num("beamform.f_number", apodization.f_number);
  num("beamform.dynamic_range", dynamic_range);
  put("bpm.wavelengths", format_list(bpm.bank.wavelengths));
  num("bpm.sigma_on_f", bpm.bank.sigma_on_f);
  num("bpm.tau_fraction", bpm.tau_fraction);
  put("bpm.symmetry_norm", norm_name(bpm.symmetry_norm));
  num("bpm.shadow_sigma", bpm.shadow_sigma);
  num("enhance.alpha", weights.alpha);
  num("enhance.beta", weights.beta);
  num("enhance.gamma", weights.gamma);
  num("metrics.ssi_bins", metrics.ssi_bins);
  num("metrics.dilation_radius", metrics.dilation_radius);
  num("metrics.c1", metrics.c1);
  num("metrics.c2", metrics.c2);
  num("metrics.roi_halfwidth", roi_halfwidth);
  put("run.noise_snr_db", noise_snr_db ? format_exact(*noise_snr_db) : "off");
  put("run.seed", std::to_string(seed));
  return out;
}

std::uint64_t PipelineConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string PipelineConfig::digest_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest()));
  return buf;
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  const auto& table = setters();
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw FormatError("config: key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, node] : keys) {
      const std::string full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) throw FormatError("config: unknown key '" + full + "'");
      it->second(base, node.data());
    }
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

std::string to_ini(const PipelineConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return format_exact(v); };
  out << "[geometry]\n"
      << "elements = " << c.geometry.element_count << "\n"
      << "pitch_mm = " << num(c.geometry.pitch * 1e3) << "\n"
      << "center_frequency_mhz = " << num(c.geometry.center_frequency / 1e6) << "\n"
      << "sampling_frequency_mhz = " << num(c.geometry.sampling_frequency / 1e6) << "\n"
      << "sound_speed = " << num(c.geometry.sound_speed) << "\n\n"
      << "[transmit]\n"
      << "angles = " << c.angle_count << "\n"
      << "angle_mode = " << (c.angle_mode == AngleMode::eq2 ? "eq2" : "span") << "\n"
      << "max_angle_deg = " << num(c.max_angle / kDeg) << "\n"
      << "fractional_bandwidth = " << num(c.fractional_bandwidth) << "\n\n"
      << "[grid]\n"
      << "x_min_mm = " << num(c.x_min * 1e3) << "\n"
      << "x_max_mm = " << num(c.x_max * 1e3) << "\n"
      << "dx_mm = " << num(c.dx * 1e3) << "\n"
      << "z_min_mm = " << num(c.z_min * 1e3) << "\n"
      << "z_max_mm = " << num(c.z_max * 1e3) << "\n"
      << "dz_mm = " << num(c.dz * 1e3) << "\n\n"
      << "[beamform]\n"
      << "window = " << window_name(c.apodization.window) << "\n"
      << "tukey_ratio = " << num(c.apodization.tukey_ratio) << "\n"
      << "f_number = " << num(c.apodization.f_number) << "\n"
      << "dynamic_range_db = " << num(c.dynamic_range) << "\n"
      << "threads = " << c.threads << "\n\n"
      << "[bpm]\n"
      << "wavelengths = " << format_list(c.bpm.bank.wavelengths) << "\n"
      << "sigma_on_f = " << num(c.bpm.bank.sigma_on_f) << "\n"
      << "tau_fraction = " << num(c.bpm.tau_fraction) << "\n"
      << "symmetry_norm = " << norm_name(c.bpm.symmetry_norm) << "\n"
      << "shadow_sigma = " << num(c.bpm.shadow_sigma) << "\n\n"
      << "[enhance]\n"
      << "alpha = " << num(c.weights.alpha) << "\n"
      << "beta = " << num(c.weights.beta) << "\n"
      << "gamma = " << num(c.weights.gamma) << "\n\n"
      << "[metrics]\n"
      << "ssi_bins = " << c.metrics.ssi_bins << "\n"
      << "dilation_radius = " << c.metrics.dilation_radius << "\n"
      << "roi_halfwidth_mm = " << num(c.roi_halfwidth * 1e3) << "\n\n"
      << "[run]\n"
      << "seed = " << c.seed << "\n"
      << "noise_snr_db = " << (c.noise_snr_db ? num(*c.noise_snr_db) : std::string("off")) << "\n";
  return out.str();
}

}  // namespace usbeam
