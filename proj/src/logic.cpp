#include "qk/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace qk {

namespace {

Formula node(FormulaKind k, Value u, std::string name, std::vector<Formula> args) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = k;
  n->constant = std::move(u);
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

}  // namespace

Formula f_top() { return node(FormulaKind::Top, {}, {}, {}); }
Formula f_or(Formula a, Formula b) { return node(FormulaKind::Or, {}, {}, {std::move(a), std::move(b)}); }
Formula f_and(Formula a, Formula b) { return node(FormulaKind::And, {}, {}, {std::move(a), std::move(b)}); }
Formula f_tensor(Value u, Formula a) { return node(FormulaKind::Tensor, std::move(u), {}, {std::move(a)}); }
Formula f_hom(Value u, Formula a) { return node(FormulaKind::Hom, std::move(u), {}, {std::move(a)}); }
Formula f_modal(std::string name, std::vector<Formula> args) {
  return node(FormulaKind::Modal, {}, std::move(name), std::move(args));
}

bool formula_equal(const Formula& a, const Formula& b) {
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
  if ((a->kind == FormulaKind::Tensor || a->kind == FormulaKind::Hom) && !(a->constant == b->constant)) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!formula_equal(a->args[i], b->args[i])) return false;
  return true;
}

std::size_t modal_depth(const Formula& f) {
  std::size_t d = 0;
  for (const auto& a : f->args) d = std::max(d, modal_depth(a));
  return d + (f->kind == FormulaKind::Modal ? 1 : 0);
}

std::size_t formula_size(const Formula& f) {
  std::size_t s = 1;
  for (const auto& a : f->args) s += formula_size(a);
  return s;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Quantale& q, const std::vector<PredicateLifting>* family)
      : s_(text), q_(q), family_(family) {}

  Formula run() {
    auto f = formula();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  std::string_view s_;
  const Quantale& q_;
  const std::vector<PredicateLifting>* family_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || std::string_view("()|&*,<>").find(c) != std::string_view::npos;
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '{') {
      while (pos_ < s_.size() && s_[pos_] != '}') ++pos_;
      if (pos_ == s_.size()) fail("unterminated '{'");
      ++pos_;
    } else {
      while (pos_ < s_.size() && !delimiter(s_[pos_])) ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  Value constant_from(const std::string& text, std::size_t at) {
    try {
      return q_.parse(text);
    } catch (const Error& e) {
      throw ParseError(at, std::string("bad constant: ") + e.what());
    }
  }

  /// u or <u>
  Value constant() {
    skip();
    std::size_t at = pos_;
    if (peek('<')) {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != '>') ++pos_;
      if (pos_ == s_.size()) fail("unterminated '<'");
      std::string text(s_.substr(start, pos_ - start));
      ++pos_;
      while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
      return constant_from(text, at);
    }
    auto w = word();
    if (w.empty()) fail("expected a constant");
    return constant_from(w, at);
  }

  Formula formula() {
    skip();
    if (pos_ == s_.size()) fail("expected a formula");
    if (s_[pos_] == '(') {
      ++pos_;
      auto a = formula();
      skip();
      if (pos_ == s_.size() || (s_[pos_] != '|' && s_[pos_] != '&')) fail("expected '|' or '&'");
      char op = s_[pos_++];
      auto b = formula();
      expect(')');
      return op == '|' ? f_or(a, b) : f_and(a, b);
    }
    if (s_[pos_] == '<') {
      auto u = constant();
      expect('*');
      return f_tensor(u, formula());
    }
    std::size_t at = pos_;
    auto w = word();
    if (w.empty()) fail("expected a formula");
    if (peek('*')) {
      auto u = constant_from(w, at);
      ++pos_;
      return f_tensor(u, formula());
    }
    if (w == "T") return f_top();
    if (w == "hom" && peek('(')) {
      ++pos_;
      auto u = constant();
      expect(',');
      auto a = formula();
      expect(')');
      return f_hom(u, a);
    }
    std::vector<Formula> args;
    if (peek('(')) {
      ++pos_;
      if (!peek(')')) {
        args.push_back(formula());
        while (peek(',')) {
          ++pos_;
          args.push_back(formula());
        }
      }
      expect(')');
    }
    if (family_) {
      auto it = std::find_if(family_->begin(), family_->end(), [&](const auto& l) { return l.name == w; });
      if (it == family_->end()) throw ParseError(at, "unknown modality '" + w + "'");
      if (it->arity != args.size())
        throw ParseError(at, "modality '" + w + "' takes " + std::to_string(it->arity) + " arguments, got " +
                                 std::to_string(args.size()));
    }
    return f_modal(w, std::move(args));
  }
};

}  // namespace

Formula parse_formula(std::string_view text, const Quantale& q, const std::vector<PredicateLifting>* family) {
  return Parser(text, q, family).run();
}

std::string format_formula(const Formula& f, const Quantale& q) {
  switch (f->kind) {
    case FormulaKind::Top: return "T";
    case FormulaKind::Or: return "(" + format_formula(f->args[0], q) + " | " + format_formula(f->args[1], q) + ")";
    case FormulaKind::And: return "(" + format_formula(f->args[0], q) + " & " + format_formula(f->args[1], q) + ")";
    case FormulaKind::Tensor: return q.format(f->constant) + " * " + format_formula(f->args[0], q);
    case FormulaKind::Hom: return "hom(" + q.format(f->constant) + ", " + format_formula(f->args[0], q) + ")";
    case FormulaKind::Modal: {
      std::string out = f->name + "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) out += (i ? ", " : "") + format_formula(f->args[i], q);
      return out + ")";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Semantics

namespace {

std::vector<Value> modal_image(const PredicateLifting& l, const Coalgebra& c,
                               const std::vector<const std::vector<Value>*>& args) {
  const std::size_t n = c.size();
  Predicates p{args.size(), n, {}};
  p.values.reserve(args.size() * n);
  for (const auto* a : args) p.values.insert(p.values.end(), a->begin(), a->end());
  std::vector<Value> out;
  out.reserve(n);
  for (std::size_t x = 0; x < n; ++x) out.push_back(l.eval(c.quantale(), p, c.alpha[x]));
  return out;
}

std::vector<Value> pointwise(const std::vector<Value>& a, const std::vector<Value>& b, bool join, const Quantale& q) {
  std::vector<Value> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = join ? q.join(a[i], b[i]) : q.meet(a[i], b[i]);
  return out;
}

std::vector<Value> tensor_by(const Value& u, const std::vector<Value>& a, const Quantale& q) {
  std::vector<Value> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = q.tensor(u, a[i]);
  return out;
}

std::vector<Value> hom_s_by(const Value& u, const std::vector<Value>& a, const Quantale& q) {
  std::vector<Value> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = q.hom_s(u, a[i]);
  return out;
}

}  // namespace

std::vector<Value> eval_formula(const Formula& f, const Coalgebra& c, const std::vector<PredicateLifting>& family) {
  const auto& q = c.quantale();
  switch (f->kind) {
    case FormulaKind::Top: return std::vector<Value>(c.size(), q.top());
    case FormulaKind::Or:
    case FormulaKind::And:
      return pointwise(eval_formula(f->args[0], c, family), eval_formula(f->args[1], c, family),
                       f->kind == FormulaKind::Or, q);
    case FormulaKind::Tensor: q.check(f->constant); return tensor_by(f->constant, eval_formula(f->args[0], c, family), q);
    case FormulaKind::Hom: q.check(f->constant); return hom_s_by(f->constant, eval_formula(f->args[0], c, family), q);
    case FormulaKind::Modal: {
      auto l = find_lifting(family, f->name);
      if (l.arity != f->args.size())
        throw ValidationError("formula", "modality '" + f->name + "' takes " + std::to_string(l.arity) + " arguments");
      std::vector<std::vector<Value>> vals;
      for (const auto& a : f->args) vals.push_back(eval_formula(a, c, family));
      std::vector<const std::vector<Value>*> ptrs;
      for (const auto& v : vals) ptrs.push_back(&v);
      return modal_image(l, c, ptrs);
    }
  }
  return {};
}

std::vector<Value> default_grid(const Quantale& q, int max_denominator) { return q.grid(max_denominator); }

// ---------------------------------------------------------------------------
// Enumeration

namespace {

class Pool {
 public:
  Pool(const Coalgebra& c, std::size_t budget) : c_(c), q_(c.quantale()), budget_(budget) {
    ld_ = indiscrete(q_, c.states.carrier);
  }

  /// False if the vector was known or the budget is exhausted.
  bool add(std::vector<Value> v, const std::function<Formula()>& witness) {
    if (index_.count(v)) return false;
    if (vectors.size() >= limit_) {
      partial = full_ = true;
      return false;
    }
    const std::size_t n = c_.size();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) ld_.at(x, y) = q_.meet(ld_.at(x, y), q_.hom_s(v[x], v[y]));
    index_.emplace(v, vectors.size());
    vectors.push_back(std::move(v));
    witnesses.push_back(witness());
    return true;
  }

  /// Propositional closure of everything from `from` on.
  void close(std::size_t from, const std::vector<Value>& grid) {
    for (std::size_t i = from; i < vectors.size() && !full_; ++i) {
      for (const auto& u : grid) {
        // copies: add() may reallocate `vectors`
        auto t = tensor_by(u, vectors[i], q_);
        add(std::move(t), [&] { return f_tensor(u, witnesses[i]); });
        auto h = hom_s_by(u, vectors[i], q_);
        add(std::move(h), [&] { return f_hom(u, witnesses[i]); });
      }
      for (std::size_t j = 0; j < i && !full_; ++j) {
        auto m = pointwise(vectors[i], vectors[j], false, q_);
        add(std::move(m), [&] { return f_and(witnesses[j], witnesses[i]); });
        auto jn = pointwise(vectors[i], vectors[j], true, q_);
        add(std::move(jn), [&] { return f_or(witnesses[j], witnesses[i]); });
      }
    }
  }

  /// λ applied to all tuples over [0, end) that use an index ≥ fresh.
  void modal_step(const PredicateLifting& l, std::size_t fresh, std::size_t end) {
    const std::size_t k = l.arity;
    if (k == 0) {
      if (fresh == 0) add(modal_image(l, c_, {}), [&] { return f_modal(l.name, {}); });
      return;
    }
    if (fresh >= end) return;
    std::vector<std::size_t> idx(k, 0);
    while (!full_) {
      if (std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return i >= fresh; })) {
        std::vector<const std::vector<Value>*> args;
        for (auto i : idx) args.push_back(&vectors[i]);
        auto img = modal_image(l, c_, args);
        add(std::move(img), [&] {
          std::vector<Formula> fs;
          for (auto i : idx) fs.push_back(witnesses[i]);
          return f_modal(l.name, fs);
        });
      }
      std::size_t p = 0;
      while (p < k && ++idx[p] == end) idx[p++] = 0;
      if (p == k) break;
    }
  }

  const VCategory& ld() const { return ld_; }
  /// Allows `budget` more vectors from now on.
  void open_level() {
    limit_ = vectors.size() + budget_;
    full_ = false;
  }

  std::vector<std::vector<Value>> vectors;
  std::vector<Formula> witnesses;
  bool partial = false;

 private:
  const Coalgebra& c_;
  const Quantale& q_;
  std::size_t budget_;
  std::size_t limit_ = 0;
  bool full_ = false;
  VCategory ld_;
  std::map<std::vector<Value>, std::size_t, ValueKeyLess> index_;
};

}  // namespace

LogicalDistance logical_distance(const Coalgebra& c, const std::vector<PredicateLifting>& family,
                                 const LogicOptions& opts) {
  const auto& q = c.quantale();
  const auto grid = opts.grid.empty() ? default_grid(q) : opts.grid;
  for (const auto& u : grid) q.check(u);
  for (const auto& l : family)
    if (!(l.functor == c.functor))
      throw ShapeError("modality " + l.name + " is for " + l.functor.name() + ", the system for " + c.functor.name());

  Pool pool(c, std::max<std::size_t>(opts.budget, 1));
  LogicalDistance out;
  pool.open_level();
  pool.add(std::vector<Value>(c.size(), q.top()), [] { return f_top(); });
  pool.close(0, grid);
  out.levels.push_back({0, pool.ld(), pool.vectors.size(), pool.partial});

  std::size_t fresh = 0;
  for (std::size_t d = 1; d <= opts.depth; ++d) {
    const std::size_t end = pool.vectors.size();
    pool.open_level();
    for (const auto& l : family) pool.modal_step(l, fresh, end);
    fresh = end;
    pool.close(end, grid);
    out.levels.push_back({d, pool.ld(), pool.vectors.size(), pool.partial});
  }
  out.matrix = pool.ld();
  out.partial = pool.partial;
  out.witnesses = std::move(pool.witnesses);
  out.vectors = std::move(pool.vectors);
  return out;
}

ExpressivityReport expressivity_report(const Coalgebra& c, const Lifting& l, const std::vector<PredicateLifting>& family,
                                       std::size_t max_depth, const LogicOptions& opts, const DistanceOptions& bd_opts) {
  const auto& q = c.quantale();
  ExpressivityReport rep;
  DistanceOptions o = bd_opts;
  o.min_iter = std::max(o.min_iter, max_depth);
  rep.bd = behavioural_distance(c, l, o);
  LogicOptions lo = opts;
  lo.depth = max_depth;
  if (lo.grid.empty()) lo.grid = default_grid(q);
  rep.grid = lo.grid;
  auto ld = logical_distance(c, family, lo);

  const std::size_t n = c.size();
  for (const auto& level : ld.levels) {
    ExpressivityRow row;
    row.depth = level.depth;
    row.formulas = level.formulas;
    row.partial = level.partial;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        const auto& b = rep.bd.matrix.at(x, y);
        const auto& v = level.matrix.at(x, y);
        if (!q.leq(b, v)) row.bd_below_ld = false;
        Rational gap = 0;
        if (q.is_numeric() || q.kind() == QuantaleKind::Bool2) {
          auto nb = q.numeric(b), nv = q.numeric(v);
          if (nb.infinite || nv.infinite)
            gap = nb.infinite == nv.infinite ? Rational(0) : Rational(1);
          else
            gap = abs(nb.value - nv.value);
        } else {
          gap = b == v ? 0 : 1;
        }
        if (gap > row.max_gap) row.max_gap = gap;
      }
    if (!rep.rows.empty() && row.max_gap > rep.rows.back().max_gap) rep.gap_non_increasing = false;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace qk
