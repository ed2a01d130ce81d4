#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qk/behaviour.hpp"
#include "qk/lifting.hpp"
#include "qk/predicate.hpp"

namespace qk {

/// Insertion-ordered, so artifacts are byte-stable.
using Json = nlohmann::ordered_json;

/// Values are written as q.format gives them ("3/10", "top", "{a,b}").
Json value_to_json(const Quantale& q, const Value& v);
/// Strings go through q.parse; JSON numbers are read exactly from their text.
Value value_from_json(const Quantale& q, const Json& j, const std::string& path);

/// {"quantale": name, "carrier": [...], "matrix": [[...], ...]}
Json category_to_json(const VCategory& c);
VCategory category_from_json(const Json& j, const std::string& path = "category", const std::string& base_dir = ".");
/// {"quantale": name, "rows": [...], "cols": [...], "matrix": [[...], ...]}
Json relation_to_json(const VRelation& r);
VRelation relation_from_json(const Json& j, const std::string& path = "relation", const std::string& base_dir = ".");

/// Elements of F X:
///   id             state name
///   powerset       [e, ...]
///   dist           {"state": "p/q", ...} over states, [[e, "p/q"], ...] otherwise
///   A×F            ["a", e]
///   F^A            {"a": e, ...}
///   1+F            null for termination, otherwise e
///   nbhd           [[states], ...]
Json felem_to_json(const Functor& f, const FElem& e, const Carrier& states);
FElem felem_from_json(const Functor& f, const Json& j, const Carrier& states, const std::string& path);

/// A system file: {quantale, functor, states, metric?, transitions,
/// labels?, lifting?, modalities?}.
struct SystemSpec {
  Coalgebra system;
  std::vector<std::string> labels;
  std::string lifting = "kantorovich";
  std::vector<std::string> modalities;  // empty: the whole canonical family
};

/// Throws ValidationError with the offending field path.
SystemSpec parse_spec(const Json& j, const std::string& base_dir = ".");
SystemSpec load_spec(const std::string& path);
Json spec_to_json(const SystemSpec& s);

std::vector<PredicateLifting> spec_family(const SystemSpec& s);
Lifting spec_lifting(const SystemSpec& s, const std::string& override_text = "");

/// Header row of state names, then one row per state.
std::string matrix_csv(const VCategory& c);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qk
