#include "salttex/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "salttex/error.hpp"

namespace salttex {

std::string_view axis_name(Axis axis) { return axis == Axis::Inline ? "inline" : "crossline"; }

Axis parse_axis(std::string_view name) {
  if (name == "inline" || name == "il") return Axis::Inline;
  if (name == "crossline" || name == "xl") return Axis::Crossline;
  throw Error(ErrorCode::InvalidArgument, "unknown axis '" + std::string(name) + "'");
}

void SeismicVolume::validate() const {
  if (n_inline == 0 || n_crossline == 0 || n_samples == 0)
    throw Error(ErrorCode::DimMismatch, "volume dimensions must be >= 1");
  if (data.size() != n_inline * n_crossline * n_samples)
    throw Error(ErrorCode::DimMismatch, "volume payload does not match its dimensions");
  for (float v : data)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteSample, "volume contains NaN or Inf");
}

Section extract_section(const SeismicVolume& vol, Axis axis, int index) {
  const std::size_t extent = axis == Axis::Inline ? vol.n_inline : vol.n_crossline;
  if (index < 0 || static_cast<std::size_t>(index) >= extent) {
    std::ostringstream msg;
    msg << axis_name(axis) << " index " << index << " outside [0," << extent << ")";
    throw Error(ErrorCode::IndexOutOfRange, msg.str());
  }
  const auto i = static_cast<std::size_t>(index);
  Section s;
  s.axis = axis;
  s.index = index;
  if (axis == Axis::Inline) {
    s.data = Image(vol.n_samples, vol.n_crossline);
    for (std::size_t xl = 0; xl < vol.n_crossline; ++xl)
      for (std::size_t t = 0; t < vol.n_samples; ++t) s.data(t, xl) = vol.at(i, xl, t);
  } else {
    s.data = Image(vol.n_samples, vol.n_inline);
    for (std::size_t il = 0; il < vol.n_inline; ++il)
      for (std::size_t t = 0; t < vol.n_samples; ++t) s.data(t, il) = vol.at(il, i, t);
  }
  return s;
}

Section normalize_section(const Section& s) {
  if (s.data.empty()) throw Error(ErrorCode::EmptyInput, "empty section");
  auto [lo_it, hi_it] = std::minmax_element(s.data.values().begin(), s.data.values().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw Error(ErrorCode::ConstantSection, "section has a single distinct value");
  Section out = s;
  const double span = hi - lo;
  for (float& v : out.data.values()) v = static_cast<float>((static_cast<double>(v) - lo) / span);
  out.normalized = true;
  return out;
}

SeismicVolume normalize_volume(const SeismicVolume& vol) {
  if (vol.data.empty()) throw Error(ErrorCode::EmptyInput, "empty volume");
  auto [lo_it, hi_it] = std::minmax_element(vol.data.begin(), vol.data.end());
  const double lo = *lo_it;
  const double span = static_cast<double>(*hi_it) - lo;
  if (!(span > 0)) throw Error(ErrorCode::ConstantSection, "volume has a single distinct value");
  SeismicVolume out = vol;
  for (float& v : out.data) v = static_cast<float>((v - lo) / span);
  return out;
}

Section make_section(Image data, Axis axis, int index) {
  Section s;
  s.data = std::move(data);
  s.axis = axis;
  s.index = index;
  return s;
}

void write_boundary_csv(const Boundary& b, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "col,row\n";
  for (const Point& p : b.points) out << p.col << ',' << p.row << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Boundary read_boundary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyBoundary, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "col,row") throw Error(ErrorCode::BadSidecar, "boundary CSV must start with 'col,row'");
  Boundary b;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t used = 0;
      Point p;
      p.col = std::stoi(line.substr(0, comma), &used);
      p.row = std::stoi(line.substr(comma + 1));
      b.points.push_back(p);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadSidecar,
                  path.string() + ":" + std::to_string(lineno) + ": malformed point '" + line + "'");
    }
  }
  return b;
}

}  // namespace salttex
