#pragma once

#include <filesystem>
#include <string>

#include "salttex/tracking.hpp"

namespace salttex {

/// Container: "STXM" magic, u64 LE header length, JSON header, then the
/// basis and mean arrays as little-endian f64 in column-major order.
std::string serialize_model(const SubspaceModel& m);
SubspaceModel deserialize_model(std::string_view bytes);

void save_model(const SubspaceModel& m, const std::filesystem::path& path);
SubspaceModel load_model(const std::filesystem::path& path);

}  // namespace salttex
