#include "qk/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace qk {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) { throw ValidationError(path, msg); }

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path == "$" ? std::string(key) : path + "." + key, "missing");
  return *it;
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

Carrier carrier_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of names");
  Carrier c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto name = string_at(j[i], path + "[" + std::to_string(i) + "]");
    if (std::find(c.begin(), c.end(), name) != c.end())
      bad(path + "[" + std::to_string(i) + "]", "duplicate name '" + name + "'");
    c.push_back(name);
  }
  return c;
}

std::size_t index_in(const Carrier& c, const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) {
    auto i = j.get<std::size_t>();
    if (i >= c.size()) bad(path, "state index out of range");
    return i;
  }
  auto name = string_at(j, path);
  auto it = std::find(c.begin(), c.end(), name);
  if (it == c.end()) bad(path, "unknown state '" + name + "'");
  return static_cast<std::size_t>(it - c.begin());
}

FiniteMonoid monoid_from_json(const Json& j, const std::string& path) {
  try {
    if (j.contains("generators"))
      return FiniteMonoid::truncated_free_commutative(j.at("generators").get<std::vector<std::string>>(),
                                                      j.value("max_length", std::size_t{2}));
    FiniteMonoid m;
    m.elements = j.at("elements").get<std::vector<std::string>>();
    m.unit = m.index_of(j.at("unit").get<std::string>());
    for (const auto& row : j.at("table")) {
      std::vector<std::size_t> r;
      for (const auto& cell : row) r.push_back(m.index_of(cell.get<std::string>()));
      m.table.push_back(std::move(r));
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    bad(path, e.what());
  } catch (const DomainError& e) {
    bad(path, e.what());
  }
}

Json quantale_to_json(const Quantale& q) {
  if (q.kind() != QuantaleKind::FreeOnMonoid) return q.name();
  const auto* m = q.monoid();
  Json table = Json::array();
  for (const auto& row : m->table) {
    Json r = Json::array();
    for (auto k : row) r.push_back(m->elements[k]);
    table.push_back(r);
  }
  return Json{{"free", Json{{"elements", m->elements}, {"unit", m->elements[m->unit]}, {"table", table}}}};
}

Quantale quantale_from_json(const Json& j, const std::string& path, const std::string& base_dir) {
  if (j.is_object() && j.contains("free")) return Quantale::free_on_monoid(monoid_from_json(j.at("free"), path + ".free"));
  auto name = string_at(j, path);
  try {
    return quantale_by_name(name, base_dir);
  } catch (const ValidationError& e) {
    bad(path, e.what());
  }
}

std::vector<Value> matrix_from_json(const Quantale& q, const Json& j, std::size_t rows, std::size_t cols,
                                    const std::string& path) {
  if (!j.is_array() || j.size() != rows) bad(path, "expected " + std::to_string(rows) + " rows");
  std::vector<Value> out;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols) bad(rp, "expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) out.push_back(value_from_json(q, j[i][k], rp + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Json matrix_to_json(const Quantale& q, const std::vector<Value>& m, std::size_t rows, std::size_t cols) {
  Json out = Json::array();
  for (std::size_t i = 0; i < rows; ++i) {
    Json r = Json::array();
    for (std::size_t k = 0; k < cols; ++k) r.push_back(value_to_json(q, m[i * cols + k]));
    out.push_back(r);
  }
  return out;
}

std::size_t label_index(const std::vector<std::string>& labels, const std::string& name, const std::string& path) {
  auto it = std::find(labels.begin(), labels.end(), name);
  if (it == labels.end()) bad(path, "unknown label '" + name + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

Rational mass_from_json(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const Error& e) {
    bad(path, e.what());
  }
  bad(path, "expected a probability such as \"1/2\"");
}

}  // namespace

Json value_to_json(const Quantale& q, const Value& v) { return q.format(v); }

Value value_from_json(const Quantale& q, const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return q.parse(j.get<std::string>());
    if (j.is_boolean() && q.kind() == QuantaleKind::Bool2) return q.boolean(j.get<bool>());
    if (j.is_number()) return q.parse(j.dump());
  } catch (const Error& e) {
    bad(path, e.what());
  }
  bad(path, "expected a " + q.name() + " value");
}

Json category_to_json(const VCategory& c) {
  return Json{{"quantale", quantale_to_json(c.quantale)},
              {"carrier", c.carrier},
              {"matrix", matrix_to_json(c.quantale, c.matrix, c.size(), c.size())}};
}

VCategory category_from_json(const Json& j, const std::string& path, const std::string& base_dir) {
  auto q = quantale_from_json(field(j, "quantale", path), path + ".quantale", base_dir);
  auto carrier = carrier_from_json(field(j, "carrier", path), path + ".carrier");
  auto m = matrix_from_json(q, field(j, "matrix", path), carrier.size(), carrier.size(), path + ".matrix");
  return VCategory(q, carrier, m);
}

Json relation_to_json(const VRelation& r) {
  return Json{{"quantale", quantale_to_json(r.quantale)},
              {"rows", r.source},
              {"cols", r.target},
              {"matrix", matrix_to_json(r.quantale, r.matrix, r.rows(), r.cols())}};
}

VRelation relation_from_json(const Json& j, const std::string& path, const std::string& base_dir) {
  auto q = quantale_from_json(field(j, "quantale", path), path + ".quantale", base_dir);
  auto rows = carrier_from_json(field(j, "rows", path), path + ".rows");
  auto cols = carrier_from_json(field(j, "cols", path), path + ".cols");
  VRelation r(q, rows, cols, q.bottom());
  r.matrix = matrix_from_json(q, field(j, "matrix", path), rows.size(), cols.size(), path + ".matrix");
  return r;
}

Json felem_to_json(const Functor& f, const FElem& e, const Carrier& states) {
  switch (f.kind()) {
    case Functor::Kind::Identity: return states.at(e.index);
    case Functor::Kind::Powerset: {
      Json out = Json::array();
      for (const auto& m : e.items) out.push_back(felem_to_json(f.inner(), m, states));
      return out;
    }
    case Functor::Kind::Distribution: {
      if (f.inner().kind() == Functor::Kind::Identity) {
        Json out = Json::object();
        for (std::size_t i = 0; i < e.items.size(); ++i) out[states.at(e.items[i].index)] = format_rational(e.weights[i]);
        return out;
      }
      Json out = Json::array();
      for (std::size_t i = 0; i < e.items.size(); ++i)
        out.push_back(Json::array({felem_to_json(f.inner(), e.items[i], states), format_rational(e.weights[i])}));
      return out;
    }
    case Functor::Kind::Labelled:
      return Json::array({f.labels().at(e.index), felem_to_json(f.inner(), e.items.at(0), states)});
    case Functor::Kind::Power: {
      Json out = Json::object();
      for (std::size_t i = 0; i < e.items.size(); ++i) out[f.labels().at(i)] = felem_to_json(f.inner(), e.items[i], states);
      return out;
    }
    case Functor::Kind::Maybe:
      if (e.index == 0) return nullptr;
      return felem_to_json(f.inner(), e.items.at(0), states);
    case Functor::Kind::Neighbourhood: {
      Json out = Json::array();
      for (const auto& s : e.items) {
        Json inner = Json::array();
        for (const auto& a : s.items) inner.push_back(states.at(a.index));
        out.push_back(inner);
      }
      return out;
    }
  }
  return nullptr;
}

FElem felem_from_json(const Functor& f, const Json& j, const Carrier& states, const std::string& path) {
  auto at = [&](std::size_t i) { return path + "[" + std::to_string(i) + "]"; };
  switch (f.kind()) {
    case Functor::Kind::Identity: return FElem::atom(index_in(states, j, path));
    case Functor::Kind::Powerset: {
      if (!j.is_array()) bad(path, "expected an array (a set)");
      std::vector<FElem> m;
      for (std::size_t i = 0; i < j.size(); ++i) m.push_back(felem_from_json(f.inner(), j[i], states, at(i)));
      return FElem::set(std::move(m));
    }
    case Functor::Kind::Distribution: {
      std::vector<FElem> support;
      std::vector<Rational> masses;
      if (j.is_object() && f.inner().kind() == Functor::Kind::Identity) {
        for (auto it = j.begin(); it != j.end(); ++it) {
          support.push_back(FElem::atom(index_in(states, it.key(), path + "." + it.key())));
          masses.push_back(mass_from_json(it.value(), path + "." + it.key()));
        }
      } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (!j[i].is_array() || j[i].size() != 2) bad(at(i), "expected [element, probability]");
          support.push_back(felem_from_json(f.inner(), j[i][0], states, at(i) + "[0]"));
          masses.push_back(mass_from_json(j[i][1], at(i) + "[1]"));
        }
      } else {
        bad(path, "expected a distribution");
      }
      for (std::size_t i = 0; i < masses.size(); ++i)
        if (masses[i] < 0) bad(path, "negative probability");
      Rational total = 0;
      for (const auto& m : masses) total += m;
      if (total != 1) bad(path, "probabilities sum to " + format_rational(total) + ", not 1");
      return FElem::dist(std::move(support), std::move(masses));
    }
    case Functor::Kind::Labelled: {
      if (!j.is_array() || j.size() != 2) bad(path, "expected [label, element]");
      auto label = label_index(f.labels(), string_at(j[0], at(0)), at(0));
      return FElem::tagged(label, {felem_from_json(f.inner(), j[1], states, at(1))});
    }
    case Functor::Kind::Power: {
      if (!j.is_object()) bad(path, "expected one entry per label");
      std::vector<FElem> parts;
      for (const auto& l : f.labels()) {
        auto it = j.find(l);
        if (it == j.end()) bad(path + "." + l, "missing");
        parts.push_back(felem_from_json(f.inner(), *it, states, path + "." + l));
      }
      for (auto it = j.begin(); it != j.end(); ++it) label_index(f.labels(), it.key(), path + "." + it.key());
      return FElem::tuple(std::move(parts));
    }
    case Functor::Kind::Maybe:
      if (j.is_null()) return FElem::tagged(0, {});
      return FElem::tagged(1, {felem_from_json(f.inner(), j, states, path)});
    case Functor::Kind::Neighbourhood: {
      if (!j.is_array()) bad(path, "expected an array of state sets");
      std::vector<FElem> sets;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array()) bad(at(i), "expected an array of states");
        std::vector<FElem> m;
        for (std::size_t k = 0; k < j[i].size(); ++k)
          m.push_back(FElem::atom(index_in(states, j[i][k], at(i) + "[" + std::to_string(k) + "]")));
        sets.push_back(FElem::set(std::move(m)));
      }
      return FElem::set(std::move(sets));
    }
  }
  bad(path, "unsupported functor");
}

// ---------------------------------------------------------------------------

SystemSpec parse_spec(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) bad("$", "expected an object");
  static const std::vector<std::string> known{"quantale", "functor",  "states",    "metric",
                                              "transitions", "labels", "lifting", "modalities"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) bad(it.key(), "unknown field");

  SystemSpec s;
  auto q = quantale_from_json(field(j, "quantale", "$"), "quantale", base_dir);
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    if (!l.is_array()) bad("labels", "expected an array of names");
    s.labels = carrier_from_json(l, "labels");
  }
  auto ftext = string_at(field(j, "functor", "$"), "functor");
  try {
    s.system.functor = parse_functor(ftext, s.labels);
  } catch (const Error& e) {
    bad("functor", e.what());
  }
  auto states = carrier_from_json(field(j, "states", "$"), "states");
  if (states.empty()) bad("states", "at least one state is required");

  if (j.contains("metric")) {
    auto m = matrix_from_json(q, j.at("metric"), states.size(), states.size(), "metric");
    s.system.states = VCategory(q, states, m);
    auto rep = validate_category(s.system.states);
    if (!rep.reflexivity_failures.empty())
      bad("metric[" + std::to_string(rep.reflexivity_failures[0]) + "]", "not reflexive");
    if (!rep.transitivity_failures.empty()) {
      auto [x, y, z] = rep.transitivity_failures[0];
      bad("metric", "triangle inequality fails at (" + states[x] + ", " + states[y] + ", " + states[z] + ")");
    }
  } else {
    s.system.states = discrete(q, states);
  }

  const auto& t = field(j, "transitions", "$");
  if (t.is_object()) {
    for (auto it = t.begin(); it != t.end(); ++it) index_in(states, it.key(), "transitions." + it.key());
    for (const auto& x : states) {
      auto it = t.find(x);
      if (it == t.end()) bad("transitions." + x, "missing");
      s.system.alpha.push_back(felem_from_json(s.system.functor, *it, states, "transitions." + x));
    }
  } else if (t.is_array()) {
    if (t.size() != states.size()) bad("transitions", "expected one entry per state");
    for (std::size_t i = 0; i < t.size(); ++i)
      s.system.alpha.push_back(felem_from_json(s.system.functor, t[i], states, "transitions." + states[i]));
  } else {
    bad("transitions", "expected an object keyed by state");
  }
  s.system.validate();

  if (j.contains("lifting")) s.lifting = string_at(j.at("lifting"), "lifting");
  if (j.contains("modalities")) {
    const auto& m = j.at("modalities");
    if (!m.is_array()) bad("modalities", "expected an array of names");
    for (std::size_t i = 0; i < m.size(); ++i) s.modalities.push_back(string_at(m[i], "modalities[" + std::to_string(i) + "]"));
  }
  // resolve names now so errors point at the spec
  spec_family(s);
  spec_lifting(s);
  return s;
}

SystemSpec load_spec(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    bad("$", std::string("not valid JSON: ") + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_spec(j, dir.empty() ? "." : dir);
}

Json spec_to_json(const SystemSpec& s) {
  const auto& c = s.system;
  Json out{{"quantale", quantale_to_json(c.quantale())}, {"functor", c.functor.name()}};
  if (!s.labels.empty()) out["labels"] = s.labels;
  out["states"] = c.states.carrier;
  if (!(c.states == discrete(c.quantale(), c.states.carrier)))
    out["metric"] = matrix_to_json(c.quantale(), c.states.matrix, c.size(), c.size());
  Json t = Json::object();
  for (std::size_t x = 0; x < c.size(); ++x) t[c.states.carrier[x]] = felem_to_json(c.functor, c.alpha[x], c.states.carrier);
  out["transitions"] = t;
  out["lifting"] = s.lifting;
  if (!s.modalities.empty()) out["modalities"] = s.modalities;
  return out;
}

std::vector<PredicateLifting> spec_family(const SystemSpec& s) {
  auto all = canonical_family(s.system.functor, s.system.quantale());
  if (s.modalities.empty()) return all;
  std::vector<PredicateLifting> out;
  for (std::size_t i = 0; i < s.modalities.size(); ++i) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& l) { return l.name == s.modalities[i]; });
    if (it == all.end()) bad("modalities[" + std::to_string(i) + "]", "unknown modality '" + s.modalities[i] + "'");
    out.push_back(*it);
  }
  return out;
}

Lifting spec_lifting(const SystemSpec& s, const std::string& override_text) {
  const std::string text = override_text.empty() ? s.lifting : override_text;
  try {
    return parse_lifting(text, s.system.functor, s.system.quantale());
  } catch (const ValidationError& e) {
    bad("lifting", e.what());
  } catch (const UnsupportedError& e) {
    bad("lifting", e.what());
  } catch (const DomainError& e) {
    bad("lifting", e.what());
  }
}

std::string matrix_csv(const VCategory& c) {
  std::ostringstream out;
  out << "state";
  for (const auto& y : c.carrier) out << ',' << y;
  out << '\n';
  for (std::size_t x = 0; x < c.size(); ++x) {
    out << c.carrier[x];
    for (std::size_t y = 0; y < c.size(); ++y) out << ',' << c.quantale.format(c.at(x, y));
    out << '\n';
  }
  return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, "cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace qk
