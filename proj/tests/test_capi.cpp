#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "flatflow/flatflow_c.h"
#include "test_surfaces.hpp"

using nlohmann::json;

TEST_CASE("load, validate, and free a surface through the C API") {
  ff_surface* s = nullptr;
  REQUIRE(ff_surface_load(testfile("octagon.surf").c_str(), &s) == FF_OK);
  char* out = nullptr;
  REQUIRE(ff_surface_validate_json(s, &out) == FF_OK);
  json j = json::parse(out);
  CHECK(j["genus"] == 2);
  CHECK(j["coneClasses"].size() == 1);
  CHECK(j["schema"] == 1);
  ff_string_free(out);
  ff_surface_free(s);
}

TEST_CASE("validation failures surface as status codes with messages") {
  ff_surface* s = nullptr;
  const char* torus = R"({
    "name": "torus",
    "polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
    "gluings": [{"from": ["sq",0], "to": ["sq",2]}, {"from": ["sq",1], "to": ["sq",3]}]
  })";
  CHECK(ff_surface_parse(torus, &s) == FF_ERR_VALIDATION);
  CHECK(std::strstr(ff_last_error(), "no cone points") != nullptr);

  CHECK(ff_surface_load("/nonexistent/file.surf", &s) == FF_ERR_VALIDATION);
}

TEST_CASE("trace and graph round trips through the C API") {
  ff_surface* s = nullptr;
  REQUIRE(ff_surface_load(testfile("octagon.surf").c_str(), &s) == FF_OK);

  char* out = nullptr;
  REQUIRE(ff_trace_json(s, "oct", 0.0, 0.1, 0.0, 10.0, "stop", &out) == FF_OK);
  json path = json::parse(out);
  CHECK(path["events"].empty());
  CHECK(path["t1"] == doctest::Approx(10.0));
  ff_string_free(out);

  CHECK(ff_trace_json(s, "oct", 0.0, 0.1, 0.0, 10.0, "sideways", &out) == FF_ERR_USAGE);

  ff_graph* g = nullptr;
  REQUIRE(ff_graph_build(s, 2.0, 0, 1, &g) == FF_OK);
  REQUIRE(ff_saddles_csv(g, &out) == FF_OK);
  std::string csv(out);
  CHECK(csv.rfind("id,startClass,endClass", 0) == 0);
  // 24 rows + header + semantics line
  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n');
  CHECK(rows == 26);
  ff_string_free(out);

  REQUIRE(ff_closed_csv(g, 2.0, "all", 0, &out) == FF_OK);
  ff_string_free(out);

  REQUIRE(ff_pressure_json(g, "{}", "1.9:2.0:0.05", 1.0, "regular", 0, &out) == FF_OK);
  json rep = json::parse(out);
  CHECK(rep["slope"].is_number());
  ff_string_free(out);

  ff_graph_free(g);
  ff_surface_free(s);
}

TEST_CASE("gsdist through the C API") {
  ff_surface* s = nullptr;
  REQUIRE(ff_surface_load(testfile("octagon.surf").c_str(), &s) == FF_OK);
  char* out = nullptr;
  REQUIRE(ff_gsdist_json(s, "oct:0.0:0.0:0.0:30", "oct:0.0:0.05:0.0:30", 10.0, &out) == FF_OK);
  json j = json::parse(out);
  CHECK(j["total"].get<double>() == doctest::Approx(0.05).epsilon(1e-3));
  ff_string_free(out);
  ff_surface_free(s);
}
