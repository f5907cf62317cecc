#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "salttex/error.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {
namespace {

std::uint32_t be_u32(std::span<const std::byte> b, std::size_t offset) {
  return (std::to_integer<std::uint32_t>(b[offset]) << 24) |
         (std::to_integer<std::uint32_t>(b[offset + 1]) << 16) |
         (std::to_integer<std::uint32_t>(b[offset + 2]) << 8) |
         std::to_integer<std::uint32_t>(b[offset + 3]);
}

std::int32_t be_i32(std::span<const std::byte> b, std::size_t offset) {
  return static_cast<std::int32_t>(be_u32(b, offset));
}

std::int16_t be_i16(std::span<const std::byte> b, std::size_t offset) {
  return static_cast<std::int16_t>((std::to_integer<std::uint16_t>(b[offset]) << 8) |
                                   std::to_integer<std::uint16_t>(b[offset + 1]));
}

// SEG-Y documents byte positions 1-based.
constexpr std::size_t at(std::size_t one_based) { return one_based - 1; }

struct TraceRecord {
  std::int32_t inline_no;
  std::int32_t crossline_no;
  std::size_t sample_offset;  // byte offset of the first sample
};

}  // namespace

float ibm_to_ieee(std::uint32_t ibm) {
  const bool negative = (ibm >> 31) != 0;
  const int exponent = static_cast<int>((ibm >> 24) & 0x7f) - 64;
  const std::uint32_t fraction = ibm & 0x00ffffff;
  if (fraction == 0) return negative ? -0.0f : 0.0f;
  // value = 0.fraction * 16^exponent = fraction * 2^(4*exponent - 24); exact in double.
  const double magnitude = std::ldexp(static_cast<double>(fraction), 4 * exponent - 24);
  const auto narrowed = static_cast<float>(magnitude);
  return negative ? -narrowed : narrowed;
}

SeismicVolume read_segy(std::span<const std::byte> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyFile, "SEG-Y stream is empty");
  const std::size_t header_bytes = segy::kTextHeaderBytes + segy::kBinaryHeaderBytes;
  if (bytes.size() < header_bytes)
    throw Error(ErrorCode::EmptyFile, "SEG-Y stream shorter than the 3600-byte file header");
  if (bytes.size() == header_bytes) throw Error(ErrorCode::EmptyFile, "SEG-Y stream holds no traces");

  const int format = be_i16(bytes, at(segy::kFormatCodeByte));
  if (format != 1 && format != 5)
    throw Error(ErrorCode::UnsupportedFormatCode,
                "sample format code " + std::to_string(format) + " (supported: 1 IBM float, 5 IEEE float)");
  const int interval_us = be_i16(bytes, at(segy::kSampleIntervalByte));
  int ns = be_i16(bytes, at(segy::kSamplesPerTraceByte));
  if (ns <= 0) {
    if (bytes.size() < header_bytes + segy::kTraceHeaderBytes)
      throw Error(ErrorCode::TruncatedTrace, "first trace header is incomplete");
    ns = be_i16(bytes, header_bytes + at(segy::kTraceSamplesByte));
  }
  if (ns <= 0) throw Error(ErrorCode::DimMismatch, "samples per trace must be positive");

  const std::size_t samples = static_cast<std::size_t>(ns);
  const std::size_t trace_bytes = segy::kTraceHeaderBytes + 4 * samples;
  std::vector<TraceRecord> traces;
  std::size_t offset = header_bytes;
  int delay_ms = 0;
  while (offset < bytes.size()) {
    if (bytes.size() - offset < trace_bytes)
      throw Error(ErrorCode::TruncatedTrace, "stream ends inside trace " + std::to_string(traces.size()));
    auto header = bytes.subspan(offset, segy::kTraceHeaderBytes);
    if (traces.empty()) delay_ms = be_i16(header, at(segy::kTraceDelayByte));
    traces.push_back({be_i32(header, at(segy::kInlineByte)), be_i32(header, at(segy::kCrosslineByte)),
                      offset + segy::kTraceHeaderBytes});
    offset += trace_bytes;
  }

  std::set<std::int32_t> inlines;
  std::set<std::int32_t> crosslines;
  for (const auto& t : traces) {
    inlines.insert(t.inline_no);
    crosslines.insert(t.crossline_no);
  }
  std::map<std::int32_t, std::size_t> il_index;
  std::map<std::int32_t, std::size_t> xl_index;
  for (auto v : inlines) il_index.emplace(v, il_index.size());
  for (auto v : crosslines) xl_index.emplace(v, xl_index.size());

  if (traces.size() != inlines.size() * crosslines.size())
    throw Error(ErrorCode::NonRectangularGrid,
                std::to_string(traces.size()) + " traces do not fill a " + std::to_string(inlines.size()) + "x" +
                    std::to_string(crosslines.size()) + " inline/crossline lattice");

  SeismicVolume vol(inlines.size(), crosslines.size(), samples);
  vol.sample_interval_us = interval_us;
  vol.first_inline = *inlines.begin();
  vol.first_crossline = *crosslines.begin();
  vol.first_time_ms = delay_ms;
  std::vector<bool> seen(inlines.size() * crosslines.size(), false);
  for (const auto& t : traces) {
    const std::size_t il = il_index.at(t.inline_no);
    const std::size_t xl = xl_index.at(t.crossline_no);
    const std::size_t cell = il * crosslines.size() + xl;
    if (seen[cell])
      throw Error(ErrorCode::NonRectangularGrid, "duplicate trace at inline " + std::to_string(t.inline_no) +
                                                     " crossline " + std::to_string(t.crossline_no));
    seen[cell] = true;
    for (std::size_t k = 0; k < samples; ++k) {
      const std::uint32_t word = be_u32(bytes, t.sample_offset + 4 * k);
      const float v = format == 1 ? ibm_to_ieee(word) : std::bit_cast<float>(word);
      if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteSample, "non-finite sample in inline " + std::to_string(t.inline_no));
      vol.at(il, xl, k) = v;
    }
  }
  return vol;
}

SeismicVolume read_segy_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_segy(std::as_bytes(std::span<const char>(raw)));
}

}  // namespace salttex
