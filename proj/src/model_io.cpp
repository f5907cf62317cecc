#include "salttex/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "salttex/error.hpp"

namespace salttex {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "STXM";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_u64(std::string_view in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[static_cast<std::size_t>(i)]);
  return v;
}

struct Writer {
  json arrays = json::array();
  std::string payload;

  void add(const std::string& name, const Eigen::MatrixXd& m) {
    arrays.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", payload.size()}});
    for (Eigen::Index i = 0; i < m.size(); ++i) put_u64(payload, std::bit_cast<std::uint64_t>(m.data()[i]));
  }
};

void add_source(Writer& w, const std::string& prefix, const SourceModel& s) {
  w.add(prefix + ".u1", s.u1);
  w.add(prefix + ".u2", s.u2);
  w.add(prefix + ".u3", s.u3);
  w.add(prefix + ".mean", s.mean);
  w.add(prefix + ".v", s.v);
  w.add(prefix + ".eig1", s.eig1);
  w.add(prefix + ".eig2", s.eig2);
  w.add(prefix + ".eig3", s.eig3);
}

Eigen::MatrixXd read_array(const json& header, std::string_view payload, const std::string& name) {
  for (const auto& a : header.at("arrays")) {
    if (a.at("name").get<std::string>() != name) continue;
    const auto rows = a.at("rows").get<Eigen::Index>();
    const auto cols = a.at("cols").get<Eigen::Index>();
    const auto offset = a.at("offset").get<std::size_t>();
    const auto count = static_cast<std::size_t>(rows * cols);
    if (offset + 8 * count > payload.size()) throw Error(ErrorCode::DimMismatch, "model payload too short for " + name);
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < count; ++i)
      m.data()[i] = std::bit_cast<double>(get_u64(payload.substr(offset + 8 * i, 8)));
    return m;
  }
  throw Error(ErrorCode::BadSidecar, "model header lacks array " + name);
}

SourceModel read_source(const json& header, std::string_view payload, const std::string& prefix) {
  SourceModel s;
  s.u1 = read_array(header, payload, prefix + ".u1");
  s.u2 = read_array(header, payload, prefix + ".u2");
  s.u3 = read_array(header, payload, prefix + ".u3");
  s.mean = read_array(header, payload, prefix + ".mean");
  s.v = read_array(header, payload, prefix + ".v");
  s.eig1 = read_array(header, payload, prefix + ".eig1");
  s.eig2 = read_array(header, payload, prefix + ".eig2");
  s.eig3 = read_array(header, payload, prefix + ".eig3");
  return s;
}

}  // namespace

std::string serialize_model(const SubspaceModel& m) {
  Writer w;
  add_source(w, "amp", m.amp);
  add_source(w, "got", m.got);
  json header = {
      {"format", "salttex-subspace-model"},
      {"version", 1},
      {"patch_size", m.patch_size},
      {"feature_dims", m.feature_dims},
      {"t_e", m.t_e},
      {"noise_adjusted", m.noise_adjusted},
      {"features", feature_mode_name(m.features)},
      {"n_training", m.n_training},
      {"warnings", m.warnings},
      {"dtype", "f64le"},
      {"order", "column-major"},
      {"arrays", w.arrays},
  };
  const std::string head = header.dump();
  std::string out(kMagic);
  put_u64(out, head.size());
  out += head;
  out += w.payload;
  return out;
}

SubspaceModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic)
    throw Error(ErrorCode::BadSidecar, "not a subspace model container");
  const std::uint64_t head_len = get_u64(bytes.substr(kMagic.size(), 8));
  const std::size_t head_at = kMagic.size() + 8;
  if (head_len > bytes.size() - head_at) throw Error(ErrorCode::BadSidecar, "model header truncated");
  json header;
  try {
    header = json::parse(bytes.substr(head_at, head_len));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSidecar, std::string("model header: ") + e.what());
  }
  const std::string_view payload = bytes.substr(head_at + head_len);
  try {
    SubspaceModel m;
    m.patch_size = header.at("patch_size").get<int>();
    m.feature_dims = header.at("feature_dims").get<std::array<int, 3>>();
    m.t_e = header.at("t_e").get<double>();
    m.noise_adjusted = header.at("noise_adjusted").get<bool>();
    m.features = parse_feature_mode(header.at("features").get<std::string>());
    m.n_training = header.at("n_training").get<std::size_t>();
    m.warnings = header.value("warnings", std::vector<std::string>{});
    m.amp = read_source(header, payload, "amp");
    m.got = read_source(header, payload, "got");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSidecar, std::string("model header: ") + e.what());
  }
}

void save_model(const SubspaceModel& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const std::string bytes = serialize_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

SubspaceModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace salttex
