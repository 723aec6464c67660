#include "cwe/spec_io.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace cwe {

namespace {

using nlohmann::json;

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t index) { return where + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& where, std::initializer_list<const char*> required,
                    std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw SpecError(where.empty() ? "/" : where, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) allowed.insert(k);
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw SpecError(child(where, key), "unknown field");
  for (const char* k : required)
    if (!j.contains(k)) throw SpecError(child(where, k), "missing required field");
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SpecError(where, "expected a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw SpecError(where, "expected a string");
  return j.get<std::string>();
}

Vector get_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = get_number(j[i], child(where, i));
  return v;
}

// Dense row-major nested array. An empty outer array is a 0 x cols matrix.
Matrix get_matrix(const json& j, const std::string& where, Eigen::Index cols_if_empty = 0) {
  if (!j.is_array()) throw SpecError(where, "expected an array of rows");
  if (j.empty()) return Matrix(0, cols_if_empty);
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix out;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = get_vector(j[r], child(where, r));
    if (cols < 0) {
      cols = row.size();
      out.resize(rows, cols);
    } else if (row.size() != cols) {
      throw SpecError(child(where, r), "row has " + std::to_string(row.size()) + " entries, expected " +
                                           std::to_string(cols));
    }
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

CostModel parse_cost(const json& j, const std::string& where, Eigen::Index m) {
  if (!j.is_object() || !j.contains("type")) throw SpecError(child(where, "type"), "missing required field");
  const std::string type = get_string(j["type"], child(where, "type"));
  if (type == "affine_additive") {
    require_object(j, where, {"type", "A", "b", "Cu"});
    return AffineAdditive{get_matrix(j["A"], child(where, "A")), get_vector(j["b"], child(where, "b")),
                          get_matrix(j["Cu"], child(where, "Cu"), m)};
  }
  if (type == "affine_uncertain_slope") {
    require_object(j, where, {"type", "A", "b", "Cu", "D"});
    AffineUncertainSlope c{get_matrix(j["A"], child(where, "A")), get_vector(j["b"], child(where, "b")),
                           get_matrix(j["Cu"], child(where, "Cu"), m), {}};
    const json& d = j["D"];
    if (!d.is_array()) throw SpecError(child(where, "D"), "expected an array of matrices");
    for (std::size_t p = 0; p < d.size(); ++p) c.D.push_back(get_matrix(d[p], child(child(where, "D"), p), m));
    return c;
  }
  throw SpecError(child(where, "type"), "unknown cost type '" + type + "' (expected affine_additive or affine_uncertain_slope)");
}

UncertaintyModel parse_uncertainty(const json& j, const std::string& where, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("type")) throw SpecError(child(where, "type"), "missing required field");
  const std::string type = get_string(j["type"], child(where, "type"));
  if (type == "uniform_box") {
    require_object(j, where, {"type", "lo", "hi"});
    return UniformBox{get_vector(j["lo"], child(where, "lo")), get_vector(j["hi"], child(where, "hi"))};
  }
  if (type == "finite_samples") {
    require_object(j, where, {"type"}, {"rows", "csv"});
    if (j.contains("rows") == j.contains("csv"))
      throw SpecError(where, "finite_samples needs exactly one of 'rows' or 'csv'");
    if (j.contains("rows")) return FiniteSamples{get_matrix(j["rows"], child(where, "rows"))};
    std::filesystem::path csv = get_string(j["csv"], child(where, "csv"));
    if (csv.is_relative() && !base_dir.empty()) csv = base_dir / csv;
    try {
      return load_samples_csv(csv);
    } catch (const Error& e) {
      throw SpecError(child(where, "csv"), e.what());
    }
  }
  throw SpecError(child(where, "type"), "unknown uncertainty type '" + type + "' (expected uniform_box or finite_samples)");
}

}  // namespace

GameSpec parse_game_spec(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "", {"od_pairs", "paths", "cost", "uncertainty", "alpha"}, {"description"});
  if (doc.contains("description")) get_string(doc["description"], "/description");

  GameSpec spec;
  spec.alpha = get_number(doc["alpha"], "/alpha");

  const json& ods = doc["od_pairs"];
  if (!ods.is_array()) throw SpecError("/od_pairs", "expected an array");
  for (std::size_t i = 0; i < ods.size(); ++i) {
    const std::string where = child("/od_pairs", i);
    require_object(ods[i], where, {"id", "demand"});
    spec.od_pairs.push_back({get_string(ods[i]["id"], child(where, "id")), get_number(ods[i]["demand"], child(where, "demand"))});
  }

  const json& paths = doc["paths"];
  if (!paths.is_array()) throw SpecError("/paths", "expected an array");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string where = child("/paths", i);
    require_object(paths[i], where, {"id", "od"});
    spec.paths.push_back({get_string(paths[i]["id"], child(where, "id")), get_string(paths[i]["od"], child(where, "od"))});
  }

  spec.uncertainty = parse_uncertainty(doc["uncertainty"], "/uncertainty", base_dir);
  spec.cost = parse_cost(doc["cost"], "/cost", dimension(spec.uncertainty));
  return spec;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path.string(), "cannot open file");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw SpecError(path.string() + ": line " + std::to_string(line) + ", column " + std::to_string(column),
                    "invalid JSON");
  }
}

GameSpec load_game_spec(const std::string& path) {
  if (path == "builtin:two-node") return two_node_five_path_spec();
  const std::filesystem::path p(path);
  return parse_game_spec(read_json_file(p), p.parent_path());
}

json to_json(const GameSpec& spec) {
  json doc;
  doc["alpha"] = spec.alpha;
  doc["od_pairs"] = json::array();
  for (const auto& od : spec.od_pairs) doc["od_pairs"].push_back({{"id", od.id}, {"demand", od.demand}});
  doc["paths"] = json::array();
  for (const auto& p : spec.paths) doc["paths"].push_back({{"id", p.id}, {"od", p.od}});
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        json cost;
        cost["A"] = matrix_json(c.A);
        cost["b"] = vector_json(c.b);
        cost["Cu"] = matrix_json(c.Cu);
        if constexpr (std::is_same_v<T, AffineAdditive>) {
          cost["type"] = "affine_additive";
        } else {
          cost["type"] = "affine_uncertain_slope";
          cost["D"] = json::array();
          for (const Matrix& d : c.D) cost["D"].push_back(matrix_json(d));
        }
        doc["cost"] = std::move(cost);
      },
      spec.cost);
  std::visit(
      [&](const auto& u) {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, UniformBox>)
          doc["uncertainty"] = {{"type", "uniform_box"}, {"lo", vector_json(u.lo)}, {"hi", vector_json(u.hi)}};
        else
          doc["uncertainty"] = {{"type", "finite_samples"}, {"rows", matrix_json(u.rows)}};
      },
      spec.uncertainty);
  return doc;
}

json to_json(const EquilibriumResult& r) {
  json out;
  out["flow"] = vector_json(r.flow);
  out["residual"] = r.residual;
  out["path_risks"] = vector_json(r.path_risks);
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
  return out;
}

json to_json(const BoundsReport& b) {
  return {{"m", b.m},         {"M", b.M},         {"L", b.L},
          {"diam_H", b.diam_H}, {"alpha", b.alpha}, {"num_paths", b.num_paths},
          {"cost_bounds_sampled", b.cost_bounds_sampled}};
}

json to_json(const LargeValue& v) {
  json out;
  out["value"] = v.overflow ? json(nullptr) : json(v.value);
  out["log_value"] = v.log_value;
  out["overflow"] = v.overflow;
  return out;
}

FlowVector parse_flow(const json& doc) {
  const json* arr = &doc;
  std::string where = "";
  if (doc.is_object()) {
    require_object(doc, "", {"flow"}, {"residual", "path_risks", "iterations", "converged", "diagnostic", "mode", "n", "seed"});
    arr = &doc["flow"];
    where = "/flow";
  }
  return get_vector(*arr, where.empty() ? "/" : where);
}

GameSpec two_node_five_path_spec() {
  GameSpec spec;
  spec.alpha = 0.2;
  spec.od_pairs = {{"AB", 260.0}, {"BA", 170.0}};
  spec.paths = {{"1", "AB"}, {"2", "AB"}, {"3", "AB"}, {"4", "BA"}, {"5", "BA"}};
  AffineAdditive cost;
  cost.A.resize(5, 5);
  cost.A << 40, 0, 0, 20, 0,  //
      0, 60, 0, 0, 20,        //
      0, 0, 80, 0, 0,         //
      8, 0, 0, 80, 0,         //
      0, 4, 0, 0, 100;
  cost.b.resize(5);
  cost.b << 1000, 950, 3000, 1000, 1300;
  cost.Cu = Matrix::Zero(5, 2);
  cost.Cu(0, 0) = 3000;
  cost.Cu(3, 1) = 4000;
  spec.cost = std::move(cost);
  spec.uncertainty = UniformBox{Vector::Zero(2), Vector::Ones(2)};
  return spec;
}

}  // namespace cwe
