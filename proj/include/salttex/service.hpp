#pragma once

#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "salttex/attributes.hpp"
#include "salttex/segmentation.hpp"
#include "salttex/tracking.hpp"
#include "salttex/volume_io.hpp"

namespace httplib {
class Server;
}

namespace salttex {

/// FNV-1a over the canonical JSON of the attribute-relevant settings.
std::uint64_t config_hash(const DetectionConfig& cfg);

/// HTTP facade over loaded volumes. Volumes are immutable once added;
/// attribute maps are computed once per (volume, axis, section, kind,
/// config hash) and shared between requests.
class Service {
 public:
  explicit Service(DetectionConfig detection = {}, TrackingConfig tracking = {});

  void add_volume(const std::string& id, SeismicVolume vol);
  void register_routes(httplib::Server& srv);

  std::shared_ptr<const AttributeMap> attribute(const std::string& volume, Axis axis, int index, AttributeKind kind,
                                                const DetectionConfig& cfg);
  std::size_t cached_maps() const;

 private:
  struct Volume {
    SeismicVolume data;
    std::once_flag gradient_once;
    std::shared_ptr<const SeismicVolume> gradient;  // 3D Sobel of the normalized cube
  };
  using MapFuture = std::shared_future<std::shared_ptr<const AttributeMap>>;

  Volume& volume(const std::string& id);
  const SeismicVolume& gradient_of(Volume& v);

  DetectionConfig detection_;
  TrackingConfig tracking_;
  std::map<std::string, std::unique_ptr<Volume>> volumes_;
  mutable std::mutex cache_mutex_;
  std::map<std::string, MapFuture> cache_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::pair<std::string, SeismicVolume>> volumes;
};

/// Blocks until the server stops. Returns false when the port cannot be bound.
bool serve(const ServeOptions& opts);

}  // namespace salttex
