#include "salttex/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <sstream>

#include "salttex/error.hpp"
#include "salttex/png_export.hpp"

namespace salttex {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Request-level failures that are not library errors.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json");
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return 404;
    case ErrorCode::SeedOutOfRange:
    case ErrorCode::SeedAboveThreshold: return 422;
    case ErrorCode::InvalidArgument: return 400;
    default: return 500;
  }
}

template <typename F>
auto guarded(F fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status, e.code, e.message);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), e.code_name(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  };
}

Axis axis_param(const std::string& s) {
  try {
    return parse_axis(s);
  } catch (const Error&) {
    throw HttpError{404, "UnknownAxis", "no axis '" + s + "'"};
  }
}

int index_param(const std::string& s) {
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw HttpError{404, "IndexOutOfRange", "bad section index '" + s + "'"};
  }
}

void send_image(const httplib::Request& req, httplib::Response& res, const Image& img) {
  const std::string as = req.has_param("as") ? req.get_param_value("as") : "png";
  if (as == "png") {
    res.set_content(encode_png(img), "image/png");
  } else if (as == "grid") {
    res.set_header("X-Dims", std::to_string(img.rows()) + "," + std::to_string(img.cols()));
    res.set_header("X-Dtype", "f32le");
    res.set_content(encode_f32le(img.values()), "application/octet-stream");
  } else {
    throw HttpError{400, "BadRequest", "as must be png or grid"};
  }
}

// Optional "config" object shared by the detect and track bodies.
DetectionConfig detection_config(const json& body, const DetectionConfig& base) {
  DetectionConfig c = base;
  if (!body.contains("config")) return c;
  const json& j = body.at("config");
  if (j.contains("scales")) c.got = GotConfig::with_scales(j.at("scales").get<std::vector<int>>());
  if (j.contains("glcm_distance")) c.glcm.r_d = j.at("glcm_distance").get<int>();
  if (j.contains("glcm_levels")) c.glcm.n_levels = j.at("glcm_levels").get<int>();
  if (j.contains("smoothing_sigma")) c.smoothing_sigma = j.at("smoothing_sigma").get<double>();
  if (j.contains("morph_radius")) c.morph_radius = j.at("morph_radius").get<int>();
  return c;
}

TrackingConfig tracking_config(const json& body, const TrackingConfig& base) {
  TrackingConfig c = base;
  if (!body.contains("config")) return c;
  const json& j = body.at("config");
  if (j.contains("patch")) c.patch_size = j.at("patch").get<int>();
  if (j.contains("dims")) {
    const auto d = j.at("dims").get<std::vector<int>>();
    if (d.size() != 3) throw HttpError{400, "BadRequest", "dims needs three entries"};
    c.feature_dims = {d[0], d[1], d[2]};
  }
  if (j.contains("t_e")) c.t_e = j.at("t_e").get<double>();
  if (j.contains("search")) c.search_halfwidth = j.at("search").get<int>();
  if (j.contains("lambda_c")) c.lambda_c = j.at("lambda_c").get<double>();
  if (j.contains("median_window")) c.median_window = j.at("median_window").get<int>();
  if (j.contains("noise_adjusted")) c.noise_adjusted = j.at("noise_adjusted").get<bool>();
  if (j.contains("features")) c.features = parse_feature_mode(j.at("features").get<std::string>());
  if (j.contains("scales")) c.got = GotConfig::with_scales(j.at("scales").get<std::vector<int>>());
  return c;
}

json points_json(const Boundary& b) {
  json a = json::array();
  for (const Point& p : b.points) a.push_back({p.col, p.row});
  return a;
}

}  // namespace

std::uint64_t config_hash(const DetectionConfig& cfg) {
  const json j{{"scales", cfg.got.scales}, {"weights", cfg.got.weights}, {"r_d", cfg.glcm.r_d},
               {"levels", cfg.glcm.n_levels}};
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Service::Service(DetectionConfig detection, TrackingConfig tracking)
    : detection_(std::move(detection)), tracking_(std::move(tracking)) {}

void Service::add_volume(const std::string& id, SeismicVolume vol) {
  vol.validate();
  auto v = std::make_unique<Volume>();
  v->data = std::move(vol);
  volumes_[id] = std::move(v);
}

Service::Volume& Service::volume(const std::string& id) {
  const auto it = volumes_.find(id);
  if (it == volumes_.end()) throw HttpError{404, "UnknownVolume", "no volume '" + id + "'"};
  return *it->second;
}

const SeismicVolume& Service::gradient_of(Volume& v) {
  std::call_once(v.gradient_once,
                 [&v] { v.gradient = std::make_shared<const SeismicVolume>(sobel3d_gradient(normalize_volume(v.data))); });
  return *v.gradient;
}

std::shared_ptr<const AttributeMap> Service::attribute(const std::string& id, Axis axis, int index, AttributeKind kind,
                                                       const DetectionConfig& cfg) {
  Volume& v = volume(id);
  std::ostringstream key;
  key << id << '|' << axis_name(axis) << '|' << index << '|' << attribute_name(kind) << '|' << std::hex
      << config_hash(cfg);

  std::promise<std::shared_ptr<const AttributeMap>> promise;
  MapFuture future;
  bool owner = false;
  {
    std::lock_guard lock(cache_mutex_);
    const auto it = cache_.find(key.str());
    if (it == cache_.end()) {
      future = promise.get_future().share();
      cache_.emplace(key.str(), future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    // Failures are cached too; inputs are immutable so they would recur.
    try {
      if (kind == AttributeKind::Gradient) {
        extract_section(v.data, axis, index);  // range check
        promise.set_value(std::make_shared<const AttributeMap>(gradient_map_from_volume(gradient_of(v), axis, index)));
      } else {
        const Section ns = normalize_section(extract_section(v.data, axis, index));
        promise.set_value(std::make_shared<const AttributeMap>(compute_attribute(ns, kind, cfg)));
      }
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

std::size_t Service::cached_maps() const {
  std::lock_guard lock(cache_mutex_);
  return cache_.size();
}

void Service::register_routes(httplib::Server& srv) {
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/v1/volumes", guarded([this](const httplib::Request&, httplib::Response& res) {
            json list = json::array();
            for (const auto& [id, v] : volumes_)
              list.push_back({{"id", id},
                              {"dims", {v->data.n_inline, v->data.n_crossline, v->data.n_samples}},
                              {"sample_interval_us", v->data.sample_interval_us}});
            res.set_content(json{{"volumes", list}}.dump(), "application/json");
          }));

  srv.Get(R"(/v1/volumes/([^/]+)/sections/([^/]+)/(-?\d+))",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            Volume& v = volume(req.matches[1]);
            const Section s = extract_section(v.data, axis_param(req.matches[2]), index_param(req.matches[3]));
            send_image(req, res, s.data);
          }));

  srv.Get(R"(/v1/volumes/([^/]+)/sections/([^/]+)/(-?\d+)/attr/([^/]+))",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            AttributeKind kind;
            try {
              kind = parse_attribute(std::string(req.matches[4]));
            } catch (const Error&) {
              throw HttpError{404, "UnknownAttribute", "no attribute '" + std::string(req.matches[4]) + "'"};
            }
            DetectionConfig cfg = detection_;
            if (req.has_param("scales")) {
              std::vector<int> scales;
              std::stringstream ss(req.get_param_value("scales"));
              for (std::string tok; std::getline(ss, tok, ',');) scales.push_back(index_param(tok));
              cfg.got = GotConfig::with_scales(scales);
            }
            const auto map = attribute(req.matches[1], axis_param(req.matches[2]), index_param(req.matches[3]), kind, cfg);
            res.set_header("X-Border-Margin", std::to_string(map->border_margin));
            send_image(req, res, map->data);
          }));

  srv.Post("/v1/detect", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const json body = json::parse(req.body);
             const std::string id = body.at("volume").get<std::string>();
             const Axis axis = body.contains("axis") ? axis_param(body.at("axis").get<std::string>()) : Axis::Inline;
             const int idx = body.at("idx").get<int>();
             const AttributeKind kind = parse_attribute(body.value("attr", std::string("got")));
             if (kind == AttributeKind::Directionality)
               throw Error(ErrorCode::InvalidArgument, "directionality is used for seeding, not detection");
             DetectionConfig cfg = detection_config(body, detection_);
             if (body.contains("seed") && !body.at("seed").is_null()) {
               const auto s = body.at("seed").get<std::vector<int>>();
               if (s.size() != 2) throw HttpError{400, "BadRequest", "seed must be [col, row]"};
               cfg.with_seed({s[0], s[1]});
             }
             if (body.contains("t_g") && !body.at("t_g").is_null()) cfg.with_threshold(body.at("t_g").get<double>());
             cfg.validate();

             auto t0 = Clock::now();
             const auto map = attribute(id, axis, idx, kind, cfg);
             const double attr_ms = ms_since(t0);
             std::shared_ptr<const AttributeMap> d_map;
             double dir_ms = 0.0;
             if (cfg.seed_mode == SeedMode::Auto) {
               t0 = Clock::now();
               d_map = attribute(id, axis, idx, AttributeKind::Directionality, cfg);
               dir_ms = ms_since(t0);
             }
             DetectionResult r = detect_on_maps(*map, d_map.get(), cfg);
             r.timings_ms["attribute"] = attr_ms;
             r.timings_ms["directionality"] = dir_ms;
             const json out{{"boundary", points_json(r.boundary)},
                            {"seed_used", {r.seed.col, r.seed.row}},
                            {"threshold_used", r.threshold},
                            {"timings_ms", r.timings_ms}};
             res.set_content(out.dump(), "application/json");
           }));

  srv.Post("/v1/track", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const json body = json::parse(req.body);
             const std::string id = body.at("volume").get<std::string>();
             const Axis axis = body.contains("axis") ? axis_param(body.at("axis").get<std::string>()) : Axis::Inline;
             const int ref_idx = body.at("ref_idx").get<int>();
             Boundary ref;
             for (const auto& p : body.at("boundary")) {
               const auto xy = p.get<std::vector<int>>();
               if (xy.size() != 2) throw HttpError{400, "BadRequest", "boundary points must be [col, row]"};
               ref.points.push_back({xy[0], xy[1]});
             }
             ref.closed = body.value("closed", true);
             const TrackingConfig cfg = tracking_config(body, tracking_);
             cfg.validate();

             Volume& v = volume(id);
             DetectionConfig got_cfg = detection_;
             got_cfg.got = cfg.got;
             const auto t0 = Clock::now();
             const Section ref_section = normalize_section(extract_section(v.data, axis, ref_idx));
             const auto ref_got = attribute(id, axis, ref_idx, AttributeKind::Got, got_cfg);
             const SubspaceModel model = learn_model(build_patch_tensors(ref_section, *ref_got, ref, cfg), cfg);

             const int count = static_cast<int>(axis == Axis::Inline ? v.data.n_inline : v.data.n_crossline);
             json sections = json::array();
             for (int k = 0; k < count; ++k) {
               json s{{"index", k}};
               try {
                 const Section target = normalize_section(extract_section(v.data, axis, k));
                 const auto g = attribute(id, axis, k, AttributeKind::Got, got_cfg);
                 const TrackedSection t = track_section(model, ref, target, *g, cfg);
                 s["boundary"] = points_json(t.boundary);
                 s["accepted"] = t.accepted;
                 s["missing"] = t.missing;
                 s["median_dropped"] = t.median_dropped;
                 s["outliers"] = t.outliers;
               } catch (const Error& e) {
                 if (e.code() != ErrorCode::TooFewTrackedPoints) throw;
                 s["error"] = {{"code", e.code_name()}, {"message", e.what()}};
               }
               sections.push_back(std::move(s));
             }
             const json out{{"sections", sections},
                            {"warnings", model.warnings},
                            {"timings_ms", {{"total", ms_since(t0)}}}};
             res.set_content(out.dump(), "application/json");
           }));
}

bool serve(const ServeOptions& opts) {
  Service svc;
  for (const auto& [id, vol] : opts.volumes) svc.add_volume(id, vol);
  httplib::Server srv;
  svc.register_routes(srv);
  return srv.listen(opts.host, opts.port);
}

}  // namespace salttex
