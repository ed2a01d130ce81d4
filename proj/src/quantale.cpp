#include "qk/quantale.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

namespace qk {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return DomainError("not a rational literal: '" + s + "'"); };
  if (s.empty()) throw bad();
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !std::all_of(whole.begin(), whole.end(), ::isdigit) ||
        !std::all_of(frac.begin(), frac.end(), ::isdigit))
      throw bad();
    mpz_class num(whole + frac, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational r(num, den);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  auto digits = [](const std::string& d, bool allow_sign) {
    std::size_t start = allow_sign && !d.empty() && d[0] == '-' ? 1 : 0;
    return d.size() > start && std::all_of(d.begin() + start, d.end(), ::isdigit);
  };
  if (!digits(num, true) || !digits(den, false)) throw bad();
  mpz_class d(den, 10);
  if (d == 0) throw DomainError("zero denominator in '" + s + "'");
  Rational r(mpz_class(num, 10), d);
  r.canonicalize();
  return r;
}

std::string format_rational(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------

void FiniteMonoid::validate() const {
  const std::size_t n = elements.size();
  if (n == 0) throw DomainError("monoid has no elements");
  if (n > 64) throw DomainError("monoid too large: at most 64 elements are supported");
  if (unit >= n) throw DomainError("monoid unit out of range");
  if (table.size() != n) throw DomainError("monoid table has wrong row count");
  for (const auto& row : table) {
    if (row.size() != n) throw DomainError("monoid table has wrong column count");
    for (auto v : row)
      if (v >= n) throw DomainError("monoid table entry out of range");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (table[unit][a] != a || table[a][unit] != a) throw DomainError("monoid unit is not neutral");
    for (std::size_t b = 0; b < n; ++b) {
      if (table[a][b] != table[b][a])
        throw DomainError("monoid is not commutative at (" + elements[a] + "," + elements[b] + ")");
      for (std::size_t c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw DomainError("monoid is not associative");
    }
  }
}

std::size_t FiniteMonoid::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i] == name) return i;
  throw DomainError("unknown monoid element '" + std::string(name) + "'");
}

FiniteMonoid FiniteMonoid::truncated_free_commutative(const std::vector<std::string>& generators,
                                                      std::size_t max_length) {
  // Words are exponent vectors; enumerate all with total length <= max_length.
  const std::size_t g = generators.size();
  std::vector<std::vector<std::size_t>> words;
  std::vector<std::size_t> current(g, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos == g) {
      words.push_back(current);
      return;
    }
    for (std::size_t e = 0; e <= remaining; ++e) {
      current[pos] = e;
      self(self, pos + 1, remaining - e);
    }
    current[pos] = 0;
  };
  rec(rec, 0, max_length);
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    std::size_t la = 0, lb = 0;
    for (auto x : a) la += x;
    for (auto x : b) lb += x;
    if (la != lb) return la < lb;
    return a > b;
  });

  FiniteMonoid m;
  std::map<std::vector<std::size_t>, std::size_t> index;
  for (const auto& w : words) {
    std::string name;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t k = 0; k < w[i]; ++k) name += generators[i];
    if (name.empty()) name = "e";
    index[w] = m.elements.size();
    m.elements.push_back(name);
  }
  const std::size_t overflow = m.elements.size();
  m.elements.push_back("~");
  const std::size_t n = m.elements.size();
  m.table.assign(n, std::vector<std::size_t>(n, overflow));
  for (const auto& a : words)
    for (const auto& b : words) {
      std::vector<std::size_t> c(g);
      std::size_t len = 0;
      for (std::size_t i = 0; i < g; ++i) {
        c[i] = a[i] + b[i];
        len += c[i];
      }
      if (len <= max_length) m.table[index[a]][index[b]] = index[c];
    }
  m.unit = index[std::vector<std::size_t>(g, 0)];
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = QuantaleKind::Bool2;
  v.payload_ = b;
  return v;
}

Value Value::number(QuantaleKind kind, Rational r) {
  Value v;
  v.kind_ = kind;
  r.canonicalize();
  v.payload_ = Extended{std::move(r), false};
  return v;
}

Value Value::infinity(QuantaleKind kind) {
  Value v;
  v.kind_ = kind;
  v.payload_ = Extended{Rational(0), true};
  return v;
}

Value Value::subset(std::uint64_t bits) {
  Value v;
  v.kind_ = QuantaleKind::FreeOnMonoid;
  v.payload_ = bits;
  return v;
}

bool Value::as_bool() const {
  if (auto* b = std::get_if<bool>(&payload_)) return *b;
  throw DomainError("value is not a Bool2 element");
}

const Extended& Value::as_number() const {
  if (auto* n = std::get_if<Extended>(&payload_)) return *n;
  throw DomainError("value is not numeric");
}

std::uint64_t Value::as_subset() const {
  if (auto* s = std::get_if<std::uint64_t>(&payload_)) return *s;
  throw DomainError("value is not a subset of a monoid");
}

bool operator==(const Value& a, const Value& b) {
  return a.kind_ == b.kind_ && a.payload_ == b.payload_;
}

bool ValueKeyLess::operator()(const Value& a, const Value& b) const {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case QuantaleKind::Bool2:
      return a.as_bool() < b.as_bool();
    case QuantaleKind::FreeOnMonoid:
      return a.as_subset() < b.as_subset();
    default: {
      const auto& x = a.as_number();
      const auto& y = b.as_number();
      if (x.infinite != y.infinite) return y.infinite;
      return !x.infinite && x.value < y.value;
    }
  }
}

bool ValueKeyLess::operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), *this);
}

// ---------------------------------------------------------------------------

Quantale Quantale::bool2() { return Quantale(QuantaleKind::Bool2, nullptr); }
Quantale Quantale::luk01() { return Quantale(QuantaleKind::Luk01, nullptr); }
Quantale Quantale::lawvere_cost() { return Quantale(QuantaleKind::LawvereCost, nullptr); }
Quantale Quantale::lawvere_max() { return Quantale(QuantaleKind::LawvereMax, nullptr); }

Quantale Quantale::free_on_monoid(FiniteMonoid monoid) {
  monoid.validate();
  return Quantale(QuantaleKind::FreeOnMonoid, std::make_shared<const FiniteMonoid>(std::move(monoid)));
}

bool operator==(const Quantale& a, const Quantale& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != QuantaleKind::FreeOnMonoid) return true;
  return a.monoid_ == b.monoid_ ||
         (a.monoid_->elements == b.monoid_->elements && a.monoid_->table == b.monoid_->table &&
          a.monoid_->unit == b.monoid_->unit);
}

std::string Quantale::name() const {
  switch (kind_) {
    case QuantaleKind::Bool2: return "bool2";
    case QuantaleKind::Luk01: return "luk01";
    case QuantaleKind::LawvereCost: return "cost";
    case QuantaleKind::LawvereMax: return "maxcost";
    case QuantaleKind::FreeOnMonoid: return "free";
  }
  return "?";
}

bool Quantale::is_finite() const {
  return kind_ == QuantaleKind::Bool2 || kind_ == QuantaleKind::FreeOnMonoid;
}

bool Quantale::is_numeric() const { return !is_finite(); }

bool Quantale::is_integral() const { return equal(top(), unit()); }

std::uint64_t Quantale::carrier_mask() const {
  const auto n = monoid_->elements.size();
  return n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

Value Quantale::top() const {
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(true);
    case QuantaleKind::FreeOnMonoid: return Value::subset(carrier_mask());
    default: return Value::number(kind_, 0);
  }
}

Value Quantale::bottom() const {
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(false);
    case QuantaleKind::FreeOnMonoid: return Value::subset(0);
    case QuantaleKind::Luk01: return Value::number(kind_, 1);
    default: return Value::infinity(kind_);
  }
}

Value Quantale::unit() const {
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(true);
    case QuantaleKind::FreeOnMonoid: return Value::subset(std::uint64_t{1} << monoid_->unit);
    default: return Value::number(kind_, 0);
  }
}

Value Quantale::boolean(bool b) const {
  if (kind_ != QuantaleKind::Bool2) throw DomainError("boolean value requested from " + name());
  return Value::boolean(b);
}

Value Quantale::number(const Rational& r) const {
  if (!is_numeric()) throw DomainError("numeric value requested from " + name());
  if (r < 0) throw DomainError("negative value " + r.get_str() + " in " + name());
  if (kind_ == QuantaleKind::Luk01 && r > 1)
    throw DomainError("value " + r.get_str() + " outside [0,1]");
  return Value::number(kind_, r);
}

Value Quantale::infinity() const {
  if (kind_ != QuantaleKind::LawvereCost && kind_ != QuantaleKind::LawvereMax)
    throw DomainError("infinity is not an element of " + name());
  return Value::infinity(kind_);
}

Value Quantale::subset(std::uint64_t bits) const {
  if (kind_ != QuantaleKind::FreeOnMonoid) throw DomainError("subset value requested from " + name());
  if (bits & ~carrier_mask()) throw DomainError("subset mentions elements outside the monoid");
  return Value::subset(bits);
}

void Quantale::check(const Value& v) const { require(v); }

void Quantale::require(const Value& v) const {
  if (v.kind() != kind_) throw DomainError("value of another quantale used in " + name());
  if (kind_ == QuantaleKind::FreeOnMonoid && (v.as_subset() & ~carrier_mask()))
    throw DomainError("subset mentions elements outside the monoid");
  if (kind_ == QuantaleKind::Luk01) {
    const auto& n = v.as_number();
    if (n.infinite || n.value < 0 || n.value > 1) throw DomainError("value outside [0,1]");
  }
}

namespace {

// Numeric comparison with infinity on top.
bool num_ge(const Extended& a, const Extended& b) {
  if (a.infinite) return true;
  if (b.infinite) return false;
  return a.value >= b.value;
}

}  // namespace

bool Quantale::leq(const Value& a, const Value& b) const {
  require(a);
  require(b);
  switch (kind_) {
    case QuantaleKind::Bool2: return !a.as_bool() || b.as_bool();
    case QuantaleKind::FreeOnMonoid: return (a.as_subset() & ~b.as_subset()) == 0;
    default: return num_ge(a.as_number(), b.as_number());
  }
}

bool Quantale::equal(const Value& a, const Value& b) const {
  require(a);
  require(b);
  return a == b;
}

Value Quantale::join(const Value& a, const Value& b) const {
  require(a);
  require(b);
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(a.as_bool() || b.as_bool());
    case QuantaleKind::FreeOnMonoid: return Value::subset(a.as_subset() | b.as_subset());
    default: return num_ge(a.as_number(), b.as_number()) ? b : a;
  }
}

Value Quantale::meet(const Value& a, const Value& b) const {
  require(a);
  require(b);
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(a.as_bool() && b.as_bool());
    case QuantaleKind::FreeOnMonoid: return Value::subset(a.as_subset() & b.as_subset());
    default: return num_ge(a.as_number(), b.as_number()) ? a : b;
  }
}

Value Quantale::tensor(const Value& a, const Value& b) const {
  require(a);
  require(b);
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(a.as_bool() && b.as_bool());
    case QuantaleKind::FreeOnMonoid: {
      std::uint64_t out = 0;
      const auto n = monoid_->elements.size();
      const auto x = a.as_subset(), y = b.as_subset();
      for (std::size_t i = 0; i < n; ++i) {
        if (!(x >> i & 1)) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (y >> j & 1) out |= std::uint64_t{1} << monoid_->table[i][j];
      }
      return Value::subset(out);
    }
    case QuantaleKind::Luk01: {
      Rational s = a.as_number().value + b.as_number().value;
      return Value::number(kind_, s > 1 ? Rational(1) : s);
    }
    case QuantaleKind::LawvereCost: {
      const auto& x = a.as_number();
      const auto& y = b.as_number();
      if (x.infinite || y.infinite) return Value::infinity(kind_);
      return Value::number(kind_, x.value + y.value);
    }
    case QuantaleKind::LawvereMax:
      return num_ge(a.as_number(), b.as_number()) ? a : b;
  }
  throw DomainError("unknown quantale");
}

Value Quantale::hom(const Value& u, const Value& w) const {
  require(u);
  require(w);
  switch (kind_) {
    case QuantaleKind::Bool2: return Value::boolean(!u.as_bool() || w.as_bool());
    case QuantaleKind::FreeOnMonoid: {
      // {m | u·m ⊆ w}
      std::uint64_t out = 0;
      const auto n = monoid_->elements.size();
      const auto x = u.as_subset(), y = w.as_subset();
      for (std::size_t m = 0; m < n; ++m) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
          if ((x >> i & 1) && !(y >> monoid_->table[i][m] & 1)) ok = false;
        if (ok) out |= std::uint64_t{1} << m;
      }
      return Value::subset(out);
    }
    case QuantaleKind::Luk01: {
      Rational d = w.as_number().value - u.as_number().value;
      return Value::number(kind_, d < 0 ? Rational(0) : d);
    }
    case QuantaleKind::LawvereCost: {
      const auto& x = u.as_number();
      const auto& y = w.as_number();
      if (x.infinite) return Value::number(kind_, 0);
      if (y.infinite) return Value::infinity(kind_);
      Rational d = y.value - x.value;
      return Value::number(kind_, d < 0 ? Rational(0) : d);
    }
    case QuantaleKind::LawvereMax:
      if (num_ge(u.as_number(), w.as_number())) return Value::number(kind_, 0);
      return w;
  }
  throw DomainError("unknown quantale");
}

Value Quantale::hom_s(const Value& u, const Value& v) const { return meet(hom(u, v), hom(v, u)); }

Value Quantale::join_all(std::span<const Value> values) const {
  Value acc = bottom();
  for (const auto& v : values) acc = join(acc, v);
  return acc;
}

Value Quantale::meet_all(std::span<const Value> values) const {
  Value acc = top();
  for (const auto& v : values) acc = meet(acc, v);
  return acc;
}

std::vector<Value> Quantale::elements() const {
  switch (kind_) {
    case QuantaleKind::Bool2: return {Value::boolean(false), Value::boolean(true)};
    case QuantaleKind::FreeOnMonoid: {
      const auto n = monoid_->elements.size();
      if (n > 16) throw BudgetError("free quantale with more than 16 generators is not enumerable");
      std::vector<Value> out;
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) out.push_back(Value::subset(s));
      return out;
    }
    default:
      throw UnsupportedError("quantale " + name() + " is infinite; use grid() or a closed form");
  }
}

std::vector<Value> Quantale::grid(int max_denominator) const {
  if (is_finite()) return elements();
  if (max_denominator < 1) throw DomainError("grid denominator must be positive");
  const Rational upper = kind_ == QuantaleKind::Luk01 ? Rational(1) : Rational(2);
  std::set<Rational> points;
  for (int q = 1; q <= max_denominator; ++q)
    for (int p = 0; Rational(p, q) <= upper; ++p) {
      Rational r(p, q);
      r.canonicalize();
      points.insert(r);
    }
  std::vector<Value> out;
  for (const auto& r : points) out.push_back(Value::number(kind_, r));
  if (kind_ != QuantaleKind::Luk01) out.push_back(Value::infinity(kind_));
  return out;
}

Extended Quantale::numeric(const Value& v) const {
  require(v);
  switch (kind_) {
    case QuantaleKind::Bool2: return Extended{Rational(v.as_bool() ? 0 : 1), false};
    case QuantaleKind::FreeOnMonoid: throw UnsupportedError("free quantales have no numeric reading");
    default: return v.as_number();
  }
}

std::string Quantale::format(const Value& v) const {
  require(v);
  switch (kind_) {
    case QuantaleKind::Bool2: return v.as_bool() ? "top" : "bot";
    case QuantaleKind::FreeOnMonoid: {
      std::string out = "{";
      bool first = true;
      for (std::size_t i = 0; i < monoid_->elements.size(); ++i)
        if (v.as_subset() >> i & 1) {
          if (!first) out += ",";
          out += monoid_->elements[i];
          first = false;
        }
      return out + "}";
    }
    default: {
      const auto& n = v.as_number();
      return n.infinite ? "inf" : format_rational(n.value);
    }
  }
}

Value Quantale::parse(std::string_view text) const {
  std::string s(text);
  if (s == "top") return top();
  if (s == "bot") return bottom();
  if (s == "unit" || s == "k") return unit();
  switch (kind_) {
    case QuantaleKind::Bool2:
      if (s == "true" || s == "T") return Value::boolean(true);
      if (s == "false" || s == "F") return Value::boolean(false);
      throw DomainError("not a Bool2 value: '" + s + "'");
    case QuantaleKind::FreeOnMonoid: {
      if (s.size() < 2 || s.front() != '{' || s.back() != '}')
        throw DomainError("subset values are written {a,b}: '" + s + "'");
      std::uint64_t bits = 0;
      std::string body = s.substr(1, s.size() - 2);
      std::size_t start = 0;
      while (start <= body.size() && !body.empty()) {
        auto comma = body.find(',', start);
        std::string item = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        bits |= std::uint64_t{1} << monoid_->index_of(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return Value::subset(bits);
    }
    default:
      if (s == "inf" || s == "∞") return infinity();
      return number(parse_rational(s));
  }
}

// ---------------------------------------------------------------------------

FiniteMonoid load_monoid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open monoid file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path, e.what());
  }
  if (doc.contains("generators")) {
    auto gens = doc.at("generators").get<std::vector<std::string>>();
    auto len = doc.value("max_length", std::size_t{2});
    return FiniteMonoid::truncated_free_commutative(gens, len);
  }
  FiniteMonoid m;
  try {
    m.elements = doc.at("elements").get<std::vector<std::string>>();
    m.unit = m.index_of(doc.at("unit").get<std::string>());
    for (const auto& row : doc.at("table")) {
      std::vector<std::size_t> r;
      for (const auto& cell : row) r.push_back(m.index_of(cell.get<std::string>()));
      m.table.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path, e.what());
  } catch (const DomainError& e) {
    throw ValidationError(path, e.what());
  }
  m.validate();
  return m;
}

Quantale quantale_by_name(std::string_view name, const std::string& base_dir) {
  if (name == "bool2") return Quantale::bool2();
  if (name == "luk01") return Quantale::luk01();
  if (name == "cost") return Quantale::lawvere_cost();
  if (name == "maxcost") return Quantale::lawvere_max();
  if (name.starts_with("free:")) {
    std::string file(name.substr(5));
    if (!file.empty() && file[0] != '/') file = base_dir + "/" + file;
    return Quantale::free_on_monoid(load_monoid(file));
  }
  throw ValidationError("quantale", "unknown quantale '" + std::string(name) + "'");
}

}  // namespace qk
