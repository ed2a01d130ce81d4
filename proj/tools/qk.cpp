// qk: behavioural and logical distances on finite coalgebras, plus the
// property-check suites.
//
// Exit codes: 0 ok, 1 check failure, 2 input error, 3 non-convergence.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qk/io.hpp"
#include "qk/logic.hpp"
#include "qk/propcheck.hpp"

using namespace qk;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kInputError = 2, kNotConverged = 3;

std::string table(const VCategory& c) { return format_matrix(c.quantale, c.carrier, c.carrier, c.matrix); }

void emit(const std::string& path, const std::string& content) {
  if (!path.empty()) write_atomic(path, content);
}

Json distance_json(const DistanceResult& r, const std::string& lifting) {
  return Json{{"lifting", lifting},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"epsilon_used", format_rational(r.epsilon_used)},
              {"matrix", category_to_json(r.matrix)}};
}

std::vector<Value> parse_grid(const std::string& text, const Quantale& q) {
  if (text.empty()) return default_grid(q);
  if (text.find_first_not_of("0123456789") == std::string::npos) return default_grid(q, std::stoi(text));
  std::vector<Value> out;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    try {
      out.push_back(q.parse(item));
    } catch (const Error& e) {
      throw ValidationError("--grid", e.what());
    }
  }
  if (out.empty()) throw ValidationError("--grid", "no constants given");
  return out;
}

Rational max_gap(const VCategory& a, const VCategory& b) {
  const auto& q = a.quantale;
  Rational gap = 0;
  for (std::size_t i = 0; i < a.matrix.size(); ++i) {
    Rational g;
    if (q.kind() == QuantaleKind::FreeOnMonoid) {
      g = a.matrix[i] == b.matrix[i] ? 0 : 1;
    } else {
      auto x = q.numeric(a.matrix[i]), y = q.numeric(b.matrix[i]);
      if (x.infinite || y.infinite) g = x.infinite == y.infinite ? 0 : 1;
      else g = abs(x.value - y.value);
    }
    if (g > gap) gap = g;
  }
  return gap;
}

LaxExtension extension_by_name(const std::string& name) {
  auto p = Functor::powerset();
  if (name == "egli-lower") return egli_milner(EgliMode::Lower);
  if (name == "egli-upper") return egli_milner(EgliMode::Upper);
  if (name == "egli") return egli_milner(EgliMode::Both);
  if (name == "kantorovich") return kantorovich_extension(canonical_family(p, Quantale::bool2()), p);
  if (name == "broken") return broken_egli_fixture();
  throw ValidationError("--lifting", "unknown extension '" + name + "' (egli-lower, egli-upper, egli, kantorovich, broken)");
}

// ---------------------------------------------------------------------------

struct BdArgs {
  std::string spec, lifting, csv, json, epsilon;
  std::size_t max_iter = 500;
};

int cmd_bd(const BdArgs& a) {
  auto s = load_spec(a.spec);
  auto lift = spec_lifting(s, a.lifting);
  DistanceOptions o;
  o.max_iter = a.max_iter;
  if (!a.epsilon.empty()) {
    try {
      o.epsilon = parse_rational(a.epsilon);
    } catch (const Error& e) {
      throw ValidationError("--epsilon", e.what());
    }
  }
  auto r = behavioural_distance(s.system, lift, o);
  std::cout << "lifting " << lift.name << ", " << r.iterations << " iterations, "
            << (r.converged ? "converged" : "NOT converged");
  if (r.converged && r.epsilon_used != 0) std::cout << " within " << format_rational(r.epsilon_used);
  std::cout << "\n" << table(r.matrix);
  emit(a.csv, matrix_csv(r.matrix));
  emit(a.json, distance_json(r, lift.name).dump(2) + "\n");
  return r.converged ? kOk : kNotConverged;
}

struct LdArgs {
  std::string spec, formula, grid, csv, json, lifting;
  std::size_t depth = 2, budget = 1000;
  bool expressivity = false;
};

int cmd_ld(const LdArgs& a) {
  auto s = load_spec(a.spec);
  const auto& q = s.system.quantale();
  auto family = spec_family(s);
  if (!a.formula.empty()) {
    auto f = parse_formula(a.formula, q, &family);
    auto v = eval_formula(f, s.system, family);
    Json out = Json::object();
    std::cout << format_formula(f, q) << "\n";
    for (std::size_t x = 0; x < v.size(); ++x) {
      std::cout << s.system.states.carrier[x] << "  " << q.format(v[x]) << "\n";
      out[s.system.states.carrier[x]] = q.format(v[x]);
    }
    emit(a.json, Json{{"formula", format_formula(f, q)}, {"values", out}}.dump(2) + "\n");
    return kOk;
  }
  LogicOptions o;
  o.depth = a.depth;
  o.budget = a.budget;
  o.grid = parse_grid(a.grid, q);
  std::cout << "constants:";
  for (const auto& u : o.grid) std::cout << " " << q.format(u);
  std::cout << (q.is_finite() ? "" : "  (grid restriction)") << "\n";

  if (a.expressivity) {
    auto rep = expressivity_report(s.system, spec_lifting(s, a.lifting), family, a.depth, o);
    std::ostringstream csv;
    csv << "depth,max_gap,formulas_enumerated,bd_below_ld,partial\n";
    std::cout << "depth  max_gap  formulas  bd<=ld  partial\n";
    for (const auto& r : rep.rows) {
      csv << r.depth << ',' << format_rational(r.max_gap) << ',' << r.formulas << ',' << (r.bd_below_ld ? 1 : 0) << ','
          << (r.partial ? 1 : 0) << '\n';
      std::cout << r.depth << "  " << format_rational(r.max_gap) << "  " << r.formulas << "  "
                << (r.bd_below_ld ? "yes" : "NO") << "  " << (r.partial ? "yes" : "no") << "\n";
    }
    std::cout << "gap non-increasing: " << (rep.gap_non_increasing ? "yes" : "no") << "\n";
    emit(a.csv, csv.str());
    return kOk;
  }

  auto ld = logical_distance(s.system, family, o);
  Json levels = Json::array();
  for (const auto& l : ld.levels) {
    std::cout << "depth " << l.depth << ", " << l.formulas << " formulas" << (l.partial ? " (budget hit)" : "") << "\n"
              << table(l.matrix);
    levels.push_back(Json{{"depth", l.depth}, {"formulas", l.formulas}, {"partial", l.partial},
                          {"matrix", category_to_json(l.matrix)}});
  }
  emit(a.csv, matrix_csv(ld.matrix));
  emit(a.json, Json{{"partial", ld.partial}, {"levels", levels}}.dump(2) + "\n");
  return kOk;
}

struct CheckArgs {
  std::string suite = "all", lifting, functor = "powerset", quantale = "bool2", json;
  std::uint64_t seed = 1;
  std::size_t budget = 2000;
};

int cmd_check(CheckArgs a) {
  if (const char* env = std::getenv("QK_SEED")) {
    try {
      a.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("QK_SEED", "not a number");
    }
  }
  CheckOptions o;
  o.seed = a.seed;
  o.budget = a.budget;
  std::vector<CheckReport> reports;
  if (a.lifting.empty()) {
    reports = run_suite(a.suite, o);
  } else {
    auto q = quantale_by_name(a.quantale);
    if (a.suite == "initial") {
      Functor f = Functor::identity();
      try {
        f = parse_functor(a.functor);
      } catch (const Error& e) {
        throw ValidationError("--functor", e.what());
      }
      reports.push_back(check_preserves_initial(parse_lifting(a.lifting, f, q), q, o));
    } else if (a.suite == "lax") {
      reports.push_back(check_lax_axioms(extension_by_name(a.lifting), q, o));
    } else if (a.suite == "enriched") {
      reports.push_back(check_enriched(extension_by_name(a.lifting), q, q.grid(4), o));
    } else if (a.suite == "galois") {
      reports.push_back(check_galois_extension(extension_by_name(a.lifting), q, o));
    } else {
      throw ValidationError("--suite", "--lifting needs one of the suites lax, initial, galois, enriched");
    }
    // an explicitly chosen target is judged on its own result
    for (auto& r : reports) r.negative_control = false;
  }
  bool ok = true;
  Json all = Json::array();
  for (const auto& r : reports) {
    std::cout << r.summary() << "\n";
    for (const auto& w : r.witnesses) std::cout << "  witness " << w.dump() << "\n";
    ok = ok && r.as_expected();
    all.push_back(r.to_json());
  }
  std::size_t instances = 0;
  for (const auto& r : reports) instances += r.instances;
  std::cout << reports.size() << " checks, " << instances << " instances" << (instances == 0 ? " (trivial)" : "")
            << ", " << (ok ? "all as expected" : "FAILURES") << "\n";
  emit(a.json, Json{{"seed", a.seed}, {"budget", a.budget}, {"trivial", instances == 0}, {"reports", all}}.dump(2) +
                   "\n");
  return ok ? kOk : kCheckFailed;
}

struct CompareArgs {
  std::string spec, liftings, json;
};

int cmd_compare(const CompareArgs& a) {
  auto s = load_spec(a.spec);
  auto comma = a.liftings.find(',');
  if (comma == std::string::npos) throw ValidationError("--liftings", "expected two liftings 'a,b'");
  auto la = spec_lifting(s, a.liftings.substr(0, comma));
  auto lb = spec_lifting(s, a.liftings.substr(comma + 1));
  auto ra = behavioural_distance(s.system, la);
  auto rb = behavioural_distance(s.system, lb);
  auto gap = max_gap(ra.matrix, rb.matrix);
  std::cout << la.name << (ra.converged ? "" : " (NOT converged)") << "\n" << table(ra.matrix);
  std::cout << lb.name << (rb.converged ? "" : " (NOT converged)") << "\n" << table(rb.matrix);
  std::cout << "max gap " << format_rational(gap) << "\n";
  emit(a.json, Json{{"left", distance_json(ra, la.name)},
                    {"right", distance_json(rb, lb.name)},
                    {"max_gap", format_rational(gap)}}
                       .dump(2) +
                   "\n");
  return ra.converged && rb.converged ? kOk : kNotConverged;
}

struct LiftArgs {
  std::string category, functor = "powerset", lifting = "kantorovich", csv, labels;
};

int cmd_lift(const LiftArgs& a) {
  Json j;
  try {
    j = Json::parse(read_file(a.category));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("$", e.what());
  }
  auto c = category_from_json(j, "category");
  if (!validate_category(c).is_category) throw ValidationError("category.matrix", "not a V-category");
  std::vector<std::string> labels;
  std::istringstream in(a.labels);
  for (std::string l; std::getline(in, l, ',');)
    if (!l.empty()) labels.push_back(l);
  Functor f = Functor::identity();
  try {
    f = parse_functor(a.functor, labels);
  } catch (const Error& e) {
    throw ValidationError("--functor", e.what());
  }
  auto l = parse_lifting(a.lifting, f, c.quantale);
  auto lifted = l.apply(c);
  std::cout << l.name << " on " << f.name() << "\n" << table(lifted);
  emit(a.csv, matrix_csv(lifted));
  return kOk;
}

struct RelArgs {
  std::string op, first, second, json;
};

int cmd_rel(const RelArgs& a) {
  auto load = [](const std::string& path, const char* what) {
    Json j;
    try {
      j = Json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(what, e.what());
    }
    return relation_from_json(j, what);
  };
  auto r = load(a.first, "first");
  VRelation out;
  if (a.op == "converse") {
    out = converse(r);
  } else {
    if (a.second.empty()) throw ValidationError("second", a.op + " needs two relations");
    auto s = load(a.second, "second");
    if (!(r.quantale == s.quantale)) throw ValidationError("second.quantale", "relations over different quantales");
    if (a.op == "compose") {
      // first: X↛Y, second: Y↛Z, result second · first
      if (r.target != s.source) throw ValidationError("second.rows", "does not match first.cols");
      out = compose(s, r);
    } else if (a.op == "residual") {
      // first ⊸ second for first: X↛Y, second: X↛Z
      if (r.source != s.source) throw ValidationError("second.rows", "does not match first.rows");
      out = kan_extension(r, s);
    } else {
      throw ValidationError("op", "unknown operation '" + a.op + "' (compose, converse, residual)");
    }
  }
  std::cout << format_matrix(out.quantale, out.source, out.target, out.matrix);
  emit(a.json, relation_to_json(out).dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qk: quantale-valued behavioural distances, modal logic and property checks"};
  app.require_subcommand(1);

  BdArgs bd;
  auto* sbd = app.add_subcommand("bd", "behavioural distance of a system");
  sbd->add_option("spec", bd.spec, "system file (JSON)")->required();
  sbd->add_option("--lifting", bd.lifting, "override the spec's lifting");
  sbd->add_option("--epsilon", bd.epsilon, "stopping tolerance for infinite quantales, e.g. 1/1000000");
  sbd->add_option("--max-iter", bd.max_iter, "iteration cap");
  sbd->add_option("--csv", bd.csv, "write the matrix as CSV");
  sbd->add_option("--json", bd.json, "write a JSON report");

  LdArgs ld;
  auto* sld = app.add_subcommand("ld", "logical distance, single formulas, expressivity");
  sld->add_option("spec", ld.spec, "system file (JSON)")->required();
  sld->add_option("--depth", ld.depth, "modal depth");
  sld->add_option("--grid", ld.grid, "max denominator, or constants separated by spaces");
  sld->add_option("--budget", ld.budget, "new formulas allowed per depth");
  sld->add_option("--formula", ld.formula, "evaluate one formula");
  sld->add_flag("--expressivity", ld.expressivity, "compare with bd per depth");
  sld->add_option("--lifting", ld.lifting, "lifting for --expressivity (default: the spec's)");
  sld->add_option("--csv", ld.csv, "write CSV");
  sld->add_option("--json", ld.json, "write a JSON report");

  CheckArgs ck;
  auto* sck = app.add_subcommand("check", "run property-check suites");
  sck->add_option("--suite", ck.suite, "lax, initial, galois, enriched or all");
  sck->add_option("--seed", ck.seed, "seed (QK_SEED overrides)");
  sck->add_option("--budget", ck.budget, "instances per check");
  sck->add_option("--lifting", ck.lifting, "check one lifting (initial) or extension (lax, galois, enriched)");
  sck->add_option("--functor", ck.functor, "functor for --lifting with --suite initial");
  sck->add_option("--quantale", ck.quantale, "quantale for --lifting");
  sck->add_option("--json", ck.json, "write the reports as JSON");

  CompareArgs cmp;
  auto* scmp = app.add_subcommand("compare", "bd under two liftings side by side");
  scmp->add_option("spec", cmp.spec, "system file (JSON)")->required();
  scmp->add_option("--liftings", cmp.liftings, "two liftings, 'a,b'")->required();
  scmp->add_option("--json", cmp.json, "write a JSON report");

  LiftArgs lf;
  auto* slf = app.add_subcommand("lift", "lifted structure on F X for a V-category");
  slf->add_option("category", lf.category, "V-category file (JSON)")->required();
  slf->add_option("--functor", lf.functor, "enumerable functor");
  slf->add_option("--labels", lf.labels, "labels for A, comma separated");
  slf->add_option("--lifting", lf.lifting, "lifting");
  slf->add_option("--csv", lf.csv, "write CSV");

  RelArgs rl;
  auto* srl = app.add_subcommand("rel", "relation calculator");
  srl->add_option("op", rl.op, "compose, converse or residual")->required();
  srl->add_option("first", rl.first, "relation file (JSON)")->required();
  srl->add_option("second", rl.second, "second relation file (JSON)");
  srl->add_option("--json", rl.json, "write the result as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*sbd) return cmd_bd(bd);
    if (*sld) return cmd_ld(ld);
    if (*sck) return cmd_check(ck);
    if (*scmp) return cmd_compare(cmp);
    if (*slf) return cmd_lift(lf);
    if (*srl) return cmd_rel(rl);
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    std::cerr << "formula error " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
