#pragma once

#include <string>

#include "flatflow/surface.hpp"

namespace flatflow {

// Surface files are UTF-8 JSON with keys `name`, `polygons`, `gluings`.
SurfaceDescriptor parseSurfaceDescriptor(const std::string& jsonText);
SurfaceDescriptor loadSurfaceDescriptor(const std::string& path);
std::string serializeSurfaceDescriptor(const SurfaceDescriptor& desc);

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& content);

}  // namespace flatflow
