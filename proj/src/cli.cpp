#include "salttex/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "salttex/attributes.hpp"
#include "salttex/error.hpp"
#include "salttex/evaluation.hpp"
#include "salttex/fixtures.hpp"
#include "salttex/model_io.hpp"
#include "salttex/noisebench.hpp"
#include "salttex/png_export.hpp"
#include "salttex/segmentation.hpp"
#include "salttex/service.hpp"
#include "salttex/tracking.hpp"
#include "salttex/volume_io.hpp"

namespace salttex::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Collects every file a run writes, relative to --out, for the run report.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  fs::path file(const std::string& name) {
    fs::create_directories(dir_);
    names_.push_back(name);
    return dir_ / name;
  }
  // Grid pairs are written as <name>.json + <name>.f32.
  fs::path grid(const std::string& name) {
    fs::create_directories(dir_);
    names_.push_back(name + ".json");
    names_.push_back(name + ".f32");
    return dir_ / name;
  }

  void report(const std::string& subcommand, const json& config, const json& timings, const json& result) {
    json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["timings_ms"] = timings;
    j["outputs"] = names_;
    if (!result.is_null()) j["result"] = result;
    fs::create_directories(dir_);
    std::ofstream f(dir_ / "report.json", std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + (dir_ / "report.json").string());
    f << j.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

bool is_segy(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".sgy" || ext == ".segy";
}

fs::path grid_base(fs::path p) {
  if (p.extension() == ".json" || p.extension() == ".f32") p.replace_extension();
  return p;
}

struct Input {
  std::optional<Section> section;
  std::optional<SeismicVolume> volume;
};

Input load_input(const fs::path& p) {
  Input in;
  if (is_segy(p)) {
    in.volume = read_segy_file(p);
    return in;
  }
  const fs::path base = grid_base(p);
  const std::size_t rank = read_grid(base).dims.size();
  if (rank == 2)
    in.section = read_section_grid(base);
  else if (rank == 3)
    in.volume = read_volume_grid(base);
  else
    throw Error(ErrorCode::BadSidecar, "expected a 2D section or a 3D volume grid");
  return in;
}

SeismicVolume load_volume(const fs::path& p) {
  Input in = load_input(p);
  if (!in.volume) throw Error(ErrorCode::DimMismatch, p.string() + " is not a volume");
  return std::move(*in.volume);
}

// Shared option blocks ------------------------------------------------------

struct SectionArgs {
  std::string in;
  std::string axis = "inline";
  int index = 0;

  void add(CLI::App* app) {
    app->add_option("--in", in, "section/volume grid base path or SEG-Y file")->required();
    app->add_option("--axis", axis, "inline|crossline (volumes only)");
    app->add_option("--index", index, "section index (volumes only)");
  }
  json echo() const { return {{"in", in}, {"axis", axis}, {"index", index}}; }
};

struct DetectArgs {
  std::vector<int> scales{1, 2, 3, 4, 5};
  int r_d = 4;
  int levels = 16;
  std::vector<int> seed;
  std::optional<double> t_g;
  double smoothing_sigma = 1.0;
  int morph_radius = 1;

  void add(CLI::App* app, bool with_seed) {
    app->add_option("--scales", scales, "window half-sizes, comma separated")->delimiter(',');
    app->add_option("--glcm-distance", r_d, "GLCM maximum offset");
    app->add_option("--glcm-levels", levels, "GLCM gray levels");
    if (!with_seed) return;
    app->add_option("--seed", seed, "manual seed as col,row")->delimiter(',')->expected(2);
    app->add_option("--t-g", t_g, "manual threshold (default: Otsu)");
    app->add_option("--smoothing-sigma", smoothing_sigma, "seed smoothing sigma");
    app->add_option("--morph-radius", morph_radius, "closing radius");
  }

  DetectionConfig config() const {
    DetectionConfig c;
    c.got = GotConfig::with_scales(scales);
    c.glcm.r_d = r_d;
    c.glcm.n_levels = levels;
    c.smoothing_sigma = smoothing_sigma;
    c.morph_radius = morph_radius;
    if (seed.size() == 2) c.with_seed({seed[0], seed[1]});
    if (t_g) c.with_threshold(*t_g);
    c.validate();
    return c;
  }

  json echo() const {
    json j{{"scales", scales}, {"glcm_distance", r_d}, {"glcm_levels", levels}, {"smoothing_sigma", smoothing_sigma},
           {"morph_radius", morph_radius}};
    j["seed"] = seed.size() == 2 ? json(seed) : json("auto");
    j["t_g"] = t_g ? json(*t_g) : json("otsu");
    return j;
  }
};

struct TrackArgs {
  int patch = 31;
  std::vector<int> dims{15, 15, 5};
  double t_e = 2.3;
  int search = 15;
  double lambda_c = 1.0;
  int median_window = 2;
  bool noise_adjusted = false;
  std::string features = "tensor";
  std::vector<int> scales{1, 2, 3, 4, 5};

  void add(CLI::App* app) {
    app->add_option("--patch", patch, "patch side (odd)");
    app->add_option("--dims", dims, "feature dimensions d1,d2,d3")->delimiter(',')->expected(3);
    app->add_option("--t-e", t_e, "reconstruction-error threshold");
    app->add_option("--search", search, "search half-width along the normal");
    app->add_option("--lambda-c", lambda_c, "GoT steering weight");
    app->add_option("--median-window", median_window, "binary median window");
    app->add_flag("--noise-adjusted", noise_adjusted, "order components by SNR");
    app->add_option("--features", features, "tensor|vector");
    app->add_option("--scales", scales, "GoT window half-sizes")->delimiter(',');
  }

  TrackingConfig config() const {
    TrackingConfig c;
    c.patch_size = patch;
    c.feature_dims = {dims[0], dims[1], dims[2]};
    c.t_e = t_e;
    c.search_halfwidth = search;
    c.lambda_c = lambda_c;
    c.median_window = median_window;
    c.noise_adjusted = noise_adjusted;
    c.features = parse_feature_mode(features);
    c.got = GotConfig::with_scales(scales);
    c.validate();
    return c;
  }

  json echo() const {
    return {{"patch", patch},   {"dims", dims},
            {"t_e", t_e},       {"search", search},
            {"lambda_c", lambda_c}, {"median_window", median_window},
            {"noise_adjusted", noise_adjusted}, {"features", features},
            {"scales", scales}};
  }
};

Section pick_section(const Input& in, const SectionArgs& a) {
  if (in.section) return *in.section;
  return extract_section(*in.volume, parse_axis(a.axis), a.index);
}

// Subcommands ---------------------------------------------------------------

int cmd_attr(const SectionArgs& sa, const DetectArgs& da, const std::string& kind_name, bool png, const fs::path& out,
             std::ostream& os) {
  const AttributeKind kind = parse_attribute(kind_name);
  const DetectionConfig cfg = da.config();
  const Input in = load_input(sa.in);
  const auto t0 = Clock::now();
  AttributeMap map;
  if (kind == AttributeKind::Gradient && in.volume) {
    map = gradient_map_from_volume(sobel3d_gradient(normalize_volume(*in.volume)), parse_axis(sa.axis), sa.index);
  } else {
    map = compute_attribute(pick_section(in, sa), kind, cfg);
  }
  const double compute_ms = ms_since(t0);

  Outputs o(out);
  const std::string name(attribute_name(kind));
  write_image_grid(map.data, o.grid(name));
  if (png) write_png(map.data, o.file(name + ".png"));
  json cfg_echo = sa.echo();
  cfg_echo["kind"] = name;
  cfg_echo["png"] = png;
  cfg_echo.update(da.echo());
  o.report("attr", cfg_echo, {{"attribute", compute_ms}},
           {{"rows", map.data.rows()}, {"cols", map.data.cols()}, {"border_margin", map.border_margin}});
  os << "wrote " << (out / (name + ".json")).string() << '\n';
  return kOk;
}

int cmd_detect(const SectionArgs& sa, const DetectArgs& da, const std::string& attr_name, bool png,
               const fs::path& out, std::ostream& os) {
  const AttributeKind kind = parse_attribute(attr_name);
  const DetectionConfig cfg = da.config();
  const Input in = load_input(sa.in);
  const auto t0 = Clock::now();
  const DetectionResult r =
      in.volume ? detect(*in.volume, parse_axis(sa.axis), sa.index, cfg, kind) : detect(*in.section, cfg, kind);
  json timings = r.timings_ms;
  timings["total"] = ms_since(t0);

  Outputs o(out);
  write_boundary_csv(r.boundary, o.file("boundary.csv"));
  write_image_grid(r.attribute.data, o.grid(std::string(attribute_name(kind))));
  if (png) {
    Image m(r.mask.rows(), r.mask.cols());
    for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = r.mask.values()[i] != 0 ? 1.0f : 0.0f;
    write_png(m, o.file("mask.png"));
  }
  json cfg_echo = sa.echo();
  cfg_echo["attr"] = std::string(attribute_name(kind));
  cfg_echo["png"] = png;
  cfg_echo.update(da.echo());
  o.report("detect", cfg_echo, timings,
           {{"seed_used", {r.seed.col, r.seed.row}},
            {"threshold_used", r.threshold},
            {"boundary_points", r.boundary.size()}});
  os << "boundary " << r.boundary.size() << " points, seed " << r.seed.col << ',' << r.seed.row << ", threshold "
     << fmt(r.threshold) << '\n';
  return kOk;
}

int cmd_track(const std::string& in_path, const std::string& axis_name_s, int ref_index, const std::string& ref_csv,
              const std::string& truth_dir, const TrackArgs& ta, const fs::path& out, std::ostream& os) {
  const TrackingConfig cfg = ta.config();
  const Axis axis = parse_axis(axis_name_s);
  const SeismicVolume vol = load_volume(in_path);
  const Boundary ref = read_boundary_csv(ref_csv);

  const auto t0 = Clock::now();
  const Section ref_section = normalize_section(extract_section(vol, axis, ref_index));
  const SubspaceModel model = build_model(ref_section, ref, cfg);
  const double model_ms = ms_since(t0);

  const int count = static_cast<int>(axis == Axis::Inline ? vol.n_inline : vol.n_crossline);
  std::vector<TrackedSection> tracked;
  std::vector<std::string> failures(static_cast<std::size_t>(count));
  const auto t1 = Clock::now();
  for (int k = 0; k < count; ++k) {
    try {
      tracked.push_back(track_section(model, ref, normalize_section(extract_section(vol, axis, k)), cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewTrackedPoints) throw;
      // A section that loses the boundary is reported, not fatal.
      TrackedSection t;
      t.section_index = k;
      tracked.push_back(t);
      failures[static_cast<std::size_t>(k)] = e.what();
    }
  }
  const double track_ms = ms_since(t1);

  Outputs o(out);
  save_model(model, o.file("model.stxm"));
  json sections = json::array();
  std::vector<SectionScore> scores;
  for (int k = 0; k < count; ++k) {
    const TrackedSection& t = tracked[static_cast<std::size_t>(k)];
    json s{{"index", k},
           {"reference_points", t.reference_points},
           {"accepted", t.accepted},
           {"missing", t.missing},
           {"median_dropped", t.median_dropped},
           {"outliers", t.outliers},
           {"points", t.boundary.size()}};
    if (!failures[static_cast<std::size_t>(k)].empty()) {
      s["error"] = failures[static_cast<std::size_t>(k)];
    } else {
      const std::string name = "boundary_" + std::to_string(k) + ".csv";
      write_boundary_csv(t.boundary, o.file(name));
      if (!truth_dir.empty()) {
        const fs::path truth = fs::path(truth_dir) / ("truth_" + std::to_string(k) + ".csv");
        if (fs::exists(truth)) {
          const BoundaryMetrics m = boundary_metrics(t.boundary, read_boundary_csv(truth));
          s["d_max"] = m.d_max;
          s["mean_sym_dist"] = m.mean_sym_dist;
          scores.push_back({k, m});
        }
      }
    }
    sections.push_back(std::move(s));
  }
  json result{{"sections", sections}, {"n_training", model.n_training}, {"warnings", model.warnings}};
  if (!scores.empty()) {
    write_metrics_csv(scores, o.file("metrics.csv"));
    std::vector<double> d;
    for (const auto& s : scores) d.push_back(s.metrics.d_max);
    result["amd"] = summarize(d).mean;
    os << "amd " << fmt(summarize(d).mean) << '\n';
  }
  json cfg_echo = ta.echo();
  cfg_echo["in"] = in_path;
  cfg_echo["axis"] = axis_name_s;
  cfg_echo["ref_index"] = ref_index;
  cfg_echo["ref"] = ref_csv;
  cfg_echo["truth_dir"] = truth_dir;
  o.report("track", cfg_echo, {{"model", model_ms}, {"track", track_ms}}, result);
  os << "tracked " << count << " sections\n";
  return kOk;
}

int cmd_eval(const std::vector<std::string>& a, const std::vector<std::string>& b, const std::string& out,
             std::ostream& os) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "--a and --b list different numbers of boundaries");
  std::vector<Boundary> ba;
  std::vector<Boundary> bb;
  for (const auto& p : a) ba.push_back(read_boundary_csv(p));
  for (const auto& p : b) bb.push_back(read_boundary_csv(p));
  const auto t0 = Clock::now();
  const double value = amd(ba, bb);
  std::vector<SectionScore> scores;
  for (std::size_t i = 0; i < ba.size(); ++i) scores.push_back({static_cast<int>(i), boundary_metrics(ba[i], bb[i])});
  const double eval_ms = ms_since(t0);
  os << "amd " << fmt(value) << '\n';
  if (out.empty()) return kOk;

  Outputs o(out);
  write_metrics_csv(scores, o.file("metrics.csv"));
  {
    std::ofstream f(o.file("summary.json"), std::ios::trunc);
    f << metrics_summary_json(scores, "eval") << '\n';
  }
  o.report("eval", {{"a", a}, {"b", b}}, {{"eval", eval_ms}}, {{"amd", value}});
  return kOk;
}

int cmd_noise(const std::string& in_path, const std::string& truth_csv, const std::vector<std::string>& methods,
              const NoiseSweepConfig& cfg, const DetectArgs& da, const fs::path& out, std::ostream& os) {
  std::vector<AttributeKind> kinds;
  for (const auto& m : methods) {
    const AttributeKind k = parse_attribute(m);
    if (k == AttributeKind::Directionality)
      throw Error(ErrorCode::InvalidArgument, "directionality is not a detection attribute");
    kinds.push_back(k);
  }
  NoiseSweepConfig c = cfg;
  c.detection = da.config();
  c.validate();
  Input in = load_input(in_path);
  if (!in.section) throw Error(ErrorCode::DimMismatch, "noise sweep expects a 2D section");
  const Boundary truth = read_boundary_csv(truth_csv);

  const auto t0 = Clock::now();
  const SweepReport r = run_noise_sweep(*in.section, truth, c, kinds);
  const double sweep_ms = ms_since(t0);

  Outputs o(out);
  write_sweep_csv(r, o.file("sweep.csv"));
  write_sweep_detail_csv(r, o.file("sweep_detail.csv"));
  json cells = json::array();
  for (const auto& cell : r.cells) {
    cells.push_back({{"sigma", cell.sigma},
                     {"method", std::string(attribute_name(cell.method))},
                     {"n", cell.n},
                     {"failures", cell.failures},
                     {"mean_amd", cell.mean_amd},
                     {"std_amd", cell.std_amd}});
    os << "sigma " << fmt(cell.sigma) << ' ' << attribute_name(cell.method) << " mean_amd " << fmt(cell.mean_amd)
       << '\n';
  }
  json clean = json::object();
  for (std::size_t i = 0; i < kinds.size(); ++i) clean[std::string(attribute_name(kinds[i]))] = r.clean_amd[i];
  json cfg_echo{{"in", in_path},
                {"truth", truth_csv},
                {"methods", methods},
                {"sigmas", c.sigmas},
                {"seed", c.seed},
                {"repetitions", c.repetitions},
                {"denoise", std::string(denoise_name(c.denoise))},
                {"bilateral", {{"sigma_s", c.bilateral.sigma_s}, {"sigma_r", c.bilateral.sigma_r},
                               {"radius", c.bilateral.radius}}}};
  cfg_echo.update(da.echo());
  o.report("noise", cfg_echo, {{"sweep", sweep_ms}}, {{"cells", cells}, {"clean_amd", clean}});
  return kOk;
}

struct GenArgs {
  std::string kind = "disk";
  int size = 128;
  std::uint64_t seed = 7;
  double radius = 36.0;
  int period = 4;
  double amplitude = 0.2;
  int sections = 5;
  double drift = 2.0;
  bool png = false;
};

int cmd_gen(const GenArgs& g, const fs::path& out, std::ostream& os) {
  const auto t0 = Clock::now();
  json cfg_echo{{"kind", g.kind}, {"size", g.size}, {"seed", g.seed}, {"period", g.period}, {"png", g.png}};
  json result;
  if (g.kind == "disk") {
    DiskParams p;
    p.size = g.size;
    p.radius = g.radius;
    p.stripe_period = g.period;
    p.chaos_amplitude = g.amplitude;
    p.seed = g.seed;
    const DiskFixture f = make_disk_fixture(p);
    Outputs o(out);
    write_section_grid(f.section, o.grid("section"));
    write_boundary_csv(f.truth, o.file("truth.csv"));
    if (g.png) write_png(f.section.data, o.file("section.png"));
    cfg_echo["radius"] = g.radius;
    cfg_echo["amplitude"] = g.amplitude;
    o.report("gen", cfg_echo, {{"generate", ms_since(t0)}}, {{"truth_points", f.truth.size()}});
  } else if (g.kind == "two-texture") {
    if (g.size < 23) throw Error(ErrorCode::InvalidArgument, "size must be >= 23");
    const int col = g.size / 2;
    const Section s = make_two_texture_section(g.size, col, g.seed, g.period, g.amplitude);
    cfg_echo["amplitude"] = g.amplitude;
    Boundary truth;
    truth.closed = false;
    for (int r = 0; r < g.size; ++r) truth.points.push_back({col, r});
    Outputs o(out);
    write_section_grid(s, o.grid("section"));
    write_boundary_csv(truth, o.file("truth.csv"));
    if (g.png) write_png(s.data, o.file("section.png"));
    o.report("gen", cfg_echo, {{"generate", ms_since(t0)}}, {{"boundary_col", col}});
  } else if (g.kind == "volume") {
    TrackingVolumeParams p;
    p.sections = g.sections;
    p.size = g.size;
    p.ref_radius = g.radius;
    p.drift = g.drift;
    p.ref_index = g.sections / 2;
    p.stripe_period = g.period;
    p.chaos_amplitude = g.amplitude;
    p.seed = g.seed;
    const TrackingVolume tv = make_tracking_volume(p);
    Outputs o(out);
    write_volume_grid(tv.volume, o.grid("volume"));
    for (std::size_t k = 0; k < tv.truth.size(); ++k)
      write_boundary_csv(tv.truth[k], o.file("truth_" + std::to_string(k) + ".csv"));
    write_boundary_csv(tv.truth[static_cast<std::size_t>(tv.ref_index)], o.file("reference.csv"));
    cfg_echo["radius"] = g.radius;
    cfg_echo["amplitude"] = g.amplitude;
    cfg_echo["sections"] = g.sections;
    cfg_echo["drift"] = g.drift;
    o.report("gen", cfg_echo, {{"generate", ms_since(t0)}}, {{"ref_index", tv.ref_index}});
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown fixture kind '" + g.kind + "' (disk|two-texture|volume)");
  }
  os << "wrote " << g.kind << " fixture to " << out.string() << '\n';
  return kOk;
}

int cmd_serve(const std::string& host, int port, const std::vector<std::string>& specs, bool demo, std::ostream& os) {
  ServeOptions opts;
  opts.host = host;
  opts.port = port;
  for (const auto& spec : specs) {
    // id=path, or a bare path whose stem becomes the id
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string id = eq == std::string::npos ? grid_base(path).filename().string() : spec.substr(0, eq);
    opts.volumes.emplace_back(id, load_volume(path));
  }
  if (demo) opts.volumes.emplace_back("demo", make_tracking_volume().volume);
  if (opts.volumes.empty()) throw Error(ErrorCode::InvalidArgument, "serve needs --volume or --demo");
  os << "listening on " << host << ':' << port << '\n' << std::flush;
  if (!serve(opts)) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return kOk;
}

int exit_code(const Error& e) {
  switch (error_class(e.code())) {
    case ErrorClass::Usage: return kUsage;
    case ErrorClass::Data: return kData;
    case ErrorClass::Pipeline: return kPipeline;
  }
  return kPipeline;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Salt-dome boundary detection and tracking on seismic sections"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string out_dir;

  SectionArgs attr_in;
  DetectArgs attr_det;
  std::string attr_kind = "got";
  bool attr_png = false;
  auto* attr = app.add_subcommand("attr", "compute an attribute map");
  attr_in.add(attr);
  attr_det.add(attr, false);
  attr->add_option("--kind", attr_kind, "got|directionality|glcm|gradient");
  attr->add_flag("--png", attr_png, "also write a PNG preview");
  attr->add_option("--out", out_dir, "output directory")->required();

  SectionArgs det_in;
  DetectArgs det;
  std::string det_attr = "got";
  bool det_png = false;
  auto* detect_cmd = app.add_subcommand("detect", "detect a salt boundary on one section");
  det_in.add(detect_cmd);
  det.add(detect_cmd, true);
  detect_cmd->add_option("--attr", det_attr, "got|glcm|gradient");
  detect_cmd->add_flag("--png", det_png, "also write the mask as PNG");
  detect_cmd->add_option("--out", out_dir, "output directory")->required();

  std::string trk_in;
  std::string trk_axis = "inline";
  int trk_ref = 0;
  std::string trk_ref_csv;
  std::string trk_truth;
  TrackArgs trk;
  auto* track = app.add_subcommand("track", "track a reference boundary through a volume");
  track->add_option("--in", trk_in, "volume grid base path or SEG-Y file")->required();
  track->add_option("--axis", trk_axis, "inline|crossline");
  track->add_option("--ref-index", trk_ref, "reference section index")->required();
  track->add_option("--ref", trk_ref_csv, "reference boundary CSV")->required();
  track->add_option("--truth-dir", trk_truth, "directory holding truth_<k>.csv for scoring");
  trk.add(track);
  track->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> eval_a;
  std::vector<std::string> eval_b;
  auto* eval = app.add_subcommand("eval", "AMD between boundary sets");
  eval->add_option("--a", eval_a, "boundary CSVs")->required();
  eval->add_option("--b", eval_b, "boundary CSVs, paired with --a")->required();
  eval->add_option("--out", out_dir, "output directory (optional)");

  std::string noise_in;
  std::string noise_truth;
  std::vector<std::string> noise_methods{"got", "glcm", "gradient"};
  NoiseSweepConfig noise_cfg;
  std::string noise_denoise = "none";
  DetectArgs noise_det;
  auto* noise = app.add_subcommand("noise", "detection accuracy under additive Gaussian noise");
  noise->add_option("--in", noise_in, "section grid base path")->required();
  noise->add_option("--truth", noise_truth, "ground-truth boundary CSV")->required();
  noise->add_option("--methods", noise_methods, "attributes to compare")->delimiter(',');
  noise->add_option("--sigmas", noise_cfg.sigmas, "noise levels")->delimiter(',');
  noise->add_option("--repetitions", noise_cfg.repetitions, "noisy copies per level");
  noise->add_option("--seed", noise_cfg.seed, "base RNG seed");
  noise->add_option("--denoise", noise_denoise, "none|bilateral");
  noise->add_option("--bilateral-sigma-s", noise_cfg.bilateral.sigma_s, "bilateral spatial sigma");
  noise->add_option("--bilateral-sigma-r", noise_cfg.bilateral.sigma_r, "bilateral range sigma");
  noise->add_option("--bilateral-radius", noise_cfg.bilateral.radius, "bilateral radius");
  noise_det.add(noise, false);
  noise->add_option("--out", out_dir, "output directory")->required();

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "write a synthetic fixture");
  gen->add_option("--kind", gen_args.kind, "disk|two-texture|volume");
  gen->add_option("--size", gen_args.size, "section side in pixels");
  gen->add_option("--seed", gen_args.seed, "texture seed");
  gen->add_option("--radius", gen_args.radius, "salt radius (reference radius for volumes)");
  gen->add_option("--period", gen_args.period, "stripe period");
  gen->add_option("--amplitude", gen_args.amplitude, "salt chaos amplitude");
  gen->add_option("--sections", gen_args.sections, "sections in a volume");
  gen->add_option("--drift", gen_args.drift, "radius change per section");
  gen->add_flag("--png", gen_args.png, "also write a PNG preview");
  gen->add_option("--out", out_dir, "output directory")->required();

  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> volumes;
  bool demo = false;
  auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--volume", volumes, "volume to load, as id=path or path");
  serve_cmd->add_flag("--demo", demo, "load the synthetic tracking volume as 'demo'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (attr->parsed()) return cmd_attr(attr_in, attr_det, attr_kind, attr_png, out_dir, out);
    if (detect_cmd->parsed()) return cmd_detect(det_in, det, det_attr, det_png, out_dir, out);
    if (track->parsed()) return cmd_track(trk_in, trk_axis, trk_ref, trk_ref_csv, trk_truth, trk, out_dir, out);
    if (eval->parsed()) return cmd_eval(eval_a, eval_b, out_dir, out);
    if (noise->parsed()) {
      noise_cfg.denoise = parse_denoise(noise_denoise);
      return cmd_noise(noise_in, noise_truth, noise_methods, noise_cfg, noise_det, out_dir, out);
    }
    if (gen->parsed()) return cmd_gen(gen_args, out_dir, out);
    if (serve_cmd->parsed()) return cmd_serve(host, port, volumes, demo, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipeline;
  }
  return kUsage;
}

}  // namespace salttex::cli
