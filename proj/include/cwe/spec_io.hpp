#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cwe/equilibrium.hpp"
#include "cwe/game_model.hpp"
#include "cwe/guarantees.hpp"
#include "cwe/saa_pipeline.hpp"

namespace cwe {

/// Malformed game-spec document. `where()` is a JSON pointer to the
/// offending field, or "line L, column C" for syntax errors.
class SpecError : public Error {
 public:
  SpecError(std::string where, const std::string& message)
      : Error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Strict conversion of a spec document (unknown keys rejected). Relative CSV
/// paths in finite_samples are resolved against `base_dir`. Only the document
/// shape is checked here; use validate_spec for the game invariants.
GameSpec parse_game_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads and parses a spec file. The name "builtin:two-node" returns the
/// bundled two-node, five-path instance.
GameSpec load_game_spec(const std::string& path);

/// Text form of a JSON file, with syntax errors reported by line and column.
nlohmann::json read_json_file(const std::filesystem::path& path);

nlohmann::json to_json(const GameSpec& spec);
nlohmann::json to_json(const EquilibriumResult& result);
nlohmann::json to_json(const BoundsReport& report);
nlohmann::json to_json(const LargeValue& v);

/// Flow vector given either as a bare array or as {"flow": [...]}.
FlowVector parse_flow(const nlohmann::json& doc);

/// Two nodes, OD pairs (A,B) with demand 260 and (B,A) with demand 170, five
/// parallel paths, additive uniform uncertainty on paths 1 and 4, alpha = 0.2.
GameSpec two_node_five_path_spec();

}  // namespace cwe
