#include "flatflow/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flatflow/errors.hpp"

namespace flatflow {

using nlohmann::json;

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << content;
}

SurfaceDescriptor parseSurfaceDescriptor(const std::string& jsonText) {
  json j;
  try {
    j = json::parse(jsonText);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("surface file is not valid JSON: ") + e.what());
  }
  SurfaceDescriptor desc;
  try {
    desc.name = j.value("name", "");
    for (const auto& jp : j.at("polygons")) {
      PolygonDescriptor p;
      if (jp.at("id").is_string()) {
        p.id = jp.at("id").get<std::string>();
      } else {
        p.id = std::to_string(jp.at("id").get<long long>());
      }
      for (const auto& v : jp.at("vertices")) {
        p.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      }
      desc.polygons.push_back(std::move(p));
    }
    auto parseRef = [](const json& r) {
      EdgeRef e;
      if (r.at(0).is_string()) {
        e.polygon = r.at(0).get<std::string>();
      } else {
        e.polygon = std::to_string(r.at(0).get<long long>());
      }
      e.edge = r.at(1).get<int>();
      return e;
    };
    for (const auto& jg : j.at("gluings")) {
      GluingDescriptor g;
      g.from = parseRef(jg.at("from"));
      g.to = parseRef(jg.at("to"));
      desc.gluings.push_back(g);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed surface file: ") + e.what());
  }
  return desc;
}

SurfaceDescriptor loadSurfaceDescriptor(const std::string& path) {
  return parseSurfaceDescriptor(readTextFile(path));
}

std::string serializeSurfaceDescriptor(const SurfaceDescriptor& desc) {
  json j;
  j["name"] = desc.name;
  j["polygons"] = json::array();
  for (const auto& p : desc.polygons) {
    json jp;
    jp["id"] = p.id;
    jp["vertices"] = json::array();
    for (const auto& v : p.vertices) jp["vertices"].push_back({v.x, v.y});
    j["polygons"].push_back(jp);
  }
  j["gluings"] = json::array();
  for (const auto& g : desc.gluings) {
    j["gluings"].push_back({{"from", {g.from.polygon, g.from.edge}},
                            {"to", {g.to.polygon, g.to.edge}}});
  }
  return j.dump(2) + "\n";
}

}  // namespace flatflow
