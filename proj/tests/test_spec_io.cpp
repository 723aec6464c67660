#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "cwe/spec_io.hpp"

using namespace cwe;
using nlohmann::json;

namespace {

const std::filesystem::path kData = std::filesystem::path(CWE_SOURCE_DIR) / "data";

json minimal_doc() {
  return json::parse(R"({
    "alpha": 0.5,
    "od_pairs": [{"id": "w", "demand": 2}],
    "paths": [{"id": "p", "od": "w"}, {"id": "q", "od": "w"}],
    "cost": {"type": "affine_additive", "A": [[1, 0], [0, 1]], "b": [0, 1], "Cu": [[1], [0]]},
    "uncertainty": {"type": "uniform_box", "lo": [0], "hi": [1]}
  })");
}

std::string error_location(const json& doc) {
  try {
    parse_game_spec(doc);
  } catch (const SpecError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("shipped golden spec matches the built-in instance") {
  const GameSpec file = load_game_spec((kData / "golden.json").string());
  const GameSpec builtin = two_node_five_path_spec();
  CHECK(file.alpha == builtin.alpha);
  REQUIRE(file.od_pairs.size() == builtin.od_pairs.size());
  for (std::size_t i = 0; i < file.od_pairs.size(); ++i) {
    CHECK(file.od_pairs[i].id == builtin.od_pairs[i].id);
    CHECK(file.od_pairs[i].demand == builtin.od_pairs[i].demand);
  }
  REQUIRE(file.paths.size() == builtin.paths.size());
  for (std::size_t i = 0; i < file.paths.size(); ++i) {
    CHECK(file.paths[i].id == builtin.paths[i].id);
    CHECK(file.paths[i].od == builtin.paths[i].od);
  }
  const auto& a = std::get<AffineAdditive>(file.cost);
  const auto& b = std::get<AffineAdditive>(builtin.cost);
  CHECK(a.A == b.A);
  CHECK(a.b == b.b);
  CHECK(a.Cu == b.Cu);
  const auto& ua = std::get<UniformBox>(file.uncertainty);
  const auto& ub = std::get<UniformBox>(builtin.uncertainty);
  CHECK(ua.lo == ub.lo);
  CHECK(ua.hi == ub.hi);
  CHECK(validate_spec(file).ok());
}

TEST_CASE("round trip through JSON") {
  const GameSpec spec = two_node_five_path_spec();
  const GameSpec back = parse_game_spec(to_json(spec));
  CHECK(to_json(back) == to_json(spec));

  const GameSpec slope = load_game_spec((kData / "uncertain_slope.json").string());
  CHECK(to_json(parse_game_spec(to_json(slope))) == to_json(slope));
}

TEST_CASE("finite samples from CSV relative to the spec file") {
  const GameSpec spec = load_game_spec((kData / "uncertain_slope.json").string());
  const auto& rows = std::get<FiniteSamples>(spec.uncertainty).rows;
  REQUIRE(rows.rows() == 4);
  REQUIRE(rows.cols() == 2);
  CHECK(rows(2, 0) == 0.8);
  CHECK(rows(0, 1) == 0.9);
  const auto& cost = std::get<AffineUncertainSlope>(spec.cost);
  REQUIRE(cost.D.size() == 2);
  CHECK(cost.D[0](0, 0) == 1.0);
  CHECK(validate_spec(spec).ok());

  json doc = minimal_doc();
  doc["uncertainty"] = {{"type", "finite_samples"}, {"csv", "does_not_exist.csv"}};
  CHECK(error_location(doc) == "/uncertainty/csv");
  doc["uncertainty"] = {{"type", "finite_samples"}, {"rows", {{0.5}, {0.25}}}};
  CHECK(std::get<FiniteSamples>(parse_game_spec(doc).uncertainty).rows.rows() == 2);
  doc["uncertainty"]["csv"] = "x.csv";
  CHECK(error_location(doc) == "/uncertainty");
}

TEST_CASE("strict parsing reports the offending field") {
  CHECK_NOTHROW(parse_game_spec(minimal_doc()));

  json doc = minimal_doc();
  doc["extra"] = 1;
  CHECK(error_location(doc) == "/extra");

  doc = minimal_doc();
  doc["od_pairs"][0]["weight"] = 1;
  CHECK(error_location(doc) == "/od_pairs/0/weight");

  doc = minimal_doc();
  doc["cost"]["C"] = json::array();
  CHECK(error_location(doc) == "/cost/C");

  doc = minimal_doc();
  doc.erase("alpha");
  CHECK(error_location(doc) == "/alpha");

  doc = minimal_doc();
  doc["paths"][1]["od"] = 3;
  CHECK(error_location(doc) == "/paths/1/od");

  doc = minimal_doc();
  doc["cost"]["type"] = "quadratic";
  CHECK(error_location(doc) == "/cost/type");

  doc = minimal_doc();
  doc["cost"]["A"][1] = {1, 2, 3};
  CHECK(error_location(doc) == "/cost/A/1");

  doc = minimal_doc();
  doc["cost"]["Cu"] = {{1, 2}, {0, 0}};
  CHECK_FALSE(validate_spec(parse_game_spec(doc)).ok());

  doc = minimal_doc();
  doc["uncertainty"]["hi"] = "one";
  CHECK(error_location(doc) == "/uncertainty/hi");

  doc = minimal_doc();
  doc["description"] = "two parallel links";
  CHECK_NOTHROW(parse_game_spec(doc));
}

TEST_CASE("syntax errors carry line and column") {
  const auto dir = std::filesystem::temp_directory_path() / "cwe_spec_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "broken.json";
  {
    std::ofstream out(path);
    out << "{\n  \"alpha\": 0.5,\n  \"paths\": [,]\n}\n";
  }
  try {
    load_game_spec(path.string());
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(e.where().find("line 3") != std::string::npos);
    CHECK(e.where().find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(load_game_spec((dir / "missing.json").string()), SpecError);
  CHECK(load_game_spec("builtin:two-node").num_paths() == 5);
}

TEST_CASE("flow documents") {
  CHECK(parse_flow(json::parse("[1, 2.5]")) == (Vector(2) << 1, 2.5).finished());
  CHECK(parse_flow(json::parse(R"({"flow": [3], "residual": 0})")) == Vector::Constant(1, 3.0));
  CHECK_THROWS(parse_flow(json::parse(R"({"h": [3]})")));
  CHECK_THROWS(parse_flow(json::parse(R"(["a"])")));
}

TEST_CASE("result serialization") {
  EquilibriumResult r;
  r.flow = Vector::Ones(2);
  r.path_risks = Vector::Zero(2);
  r.residual = 1e-9;
  r.iterations = 4;
  r.converged = true;
  const json j = to_json(r);
  CHECK(j["flow"] == json::array({1.0, 1.0}));
  CHECK(j["converged"] == true);
  CHECK(j["iterations"] == 4);
  CHECK_FALSE(j.contains("diagnostic"));

  const LargeValue big{std::numeric_limits<double>::infinity(), 900.0, true};
  const json lv = to_json(big);
  CHECK(lv["overflow"] == true);
  CHECK(lv["log_value"] == 900.0);
  CHECK(lv["value"].is_null());
}
