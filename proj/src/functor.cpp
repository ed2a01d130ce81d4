#include "qk/functor.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace qk {

FElem FElem::atom(std::size_t i) {
  FElem e;
  e.tag = Tag::Atom;
  e.index = i;
  return e;
}

FElem FElem::set(std::vector<FElem> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  FElem e;
  e.tag = Tag::Set;
  e.items = std::move(members);
  return e;
}

FElem FElem::dist(std::vector<FElem> support, std::vector<Rational> masses) {
  if (support.size() != masses.size()) throw ShapeError("distribution support and masses differ in length");
  std::map<FElem, Rational> merged;
  for (std::size_t i = 0; i < support.size(); ++i) {
    masses[i].canonicalize();
    merged[support[i]] += masses[i];
  }
  FElem e;
  e.tag = Tag::Dist;
  for (auto& [k, m] : merged) {
    if (m == 0) continue;
    e.items.push_back(k);
    e.weights.push_back(m);
  }
  return e;
}

FElem FElem::tagged(std::size_t tag, std::vector<FElem> child) {
  if (child.size() > 1) throw ShapeError("a tagged element has at most one child");
  FElem e;
  e.tag = Tag::Tagged;
  e.index = tag;
  e.items = std::move(child);
  return e;
}

FElem FElem::tuple(std::vector<FElem> parts) {
  FElem e;
  e.tag = Tag::Tuple;
  e.items = std::move(parts);
  return e;
}

std::strong_ordering operator<=>(const FElem& a, const FElem& b) {
  if (a.tag != b.tag) return a.tag <=> b.tag;
  if (a.index != b.index) return a.index <=> b.index;
  if (a.items.size() != b.items.size()) return a.items.size() <=> b.items.size();
  for (std::size_t i = 0; i < a.items.size(); ++i)
    if (auto c = a.items[i] <=> b.items[i]; c != 0) return c;
  for (std::size_t i = 0; i < a.weights.size() && i < b.weights.size(); ++i) {
    if (a.weights[i] < b.weights[i]) return std::strong_ordering::less;
    if (b.weights[i] < a.weights[i]) return std::strong_ordering::greater;
  }
  return a.weights.size() <=> b.weights.size();
}

// ---------------------------------------------------------------------------

Functor Functor::identity() { return Functor(Kind::Identity, nullptr, {}); }

Functor Functor::powerset(Functor inner) {
  return Functor(Kind::Powerset, std::make_shared<const Functor>(std::move(inner)), {});
}

Functor Functor::distribution(Functor inner) {
  return Functor(Kind::Distribution, std::make_shared<const Functor>(std::move(inner)), {});
}

Functor Functor::labelled(std::vector<std::string> labels, Functor inner) {
  if (labels.empty()) throw DomainError("label set must not be empty");
  return Functor(Kind::Labelled, std::make_shared<const Functor>(std::move(inner)), std::move(labels));
}

Functor Functor::power(std::vector<std::string> labels, Functor inner) {
  return Functor(Kind::Power, std::make_shared<const Functor>(std::move(inner)), std::move(labels));
}

Functor Functor::maybe(Functor inner) {
  return Functor(Kind::Maybe, std::make_shared<const Functor>(std::move(inner)), {});
}

Functor Functor::neighbourhood() { return Functor(Kind::Neighbourhood, nullptr, {}); }

const Functor& Functor::inner() const {
  if (!inner_) throw UnsupportedError(name() + " has no inner functor");
  return *inner_;
}

bool operator==(const Functor& a, const Functor& b) {
  if (a.kind_ != b.kind_ || a.labels_ != b.labels_) return false;
  if (!a.inner_ || !b.inner_) return !a.inner_ && !b.inner_;
  return *a.inner_ == *b.inner_;
}

namespace {

std::string label_set(const std::vector<std::string>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? "," : "") + labels[i];
  return out + "}";
}

}  // namespace

std::string Functor::name() const {
  switch (kind_) {
    case Kind::Identity: return "id";
    case Kind::Neighbourhood: return "nbhd";
    case Kind::Powerset:
      return inner_->kind_ == Kind::Identity ? "powerset" : "powerset(" + inner_->name() + ")";
    case Kind::Distribution:
      return inner_->kind_ == Kind::Identity ? "dist" : "dist(" + inner_->name() + ")";
    case Kind::Labelled: return label_set(labels_) + "×" + inner_->name();
    case Kind::Power: {
      auto in = inner_->name();
      if (in.find_first_of("×^") != std::string::npos) in = "(" + in + ")";
      return in + "^" + label_set(labels_);
    }
    case Kind::Maybe: return "(1+" + inner_->name() + ")";
  }
  return "?";
}

bool Functor::enumerable() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::Neighbourhood: return true;
    case Kind::Distribution: return false;
    default: return inner_->enumerable();
  }
}

namespace {

std::vector<std::vector<FElem>> subsets(const std::vector<FElem>& base, std::size_t max_elements) {
  if (base.size() >= 63 || (std::size_t{1} << base.size()) > max_elements)
    throw BudgetError("powerset of " + std::to_string(base.size()) + " elements exceeds the size guard");
  std::vector<std::vector<FElem>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << base.size()); ++mask) {
    std::vector<FElem> s;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (mask >> i & 1) s.push_back(base[i]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<FElem> Functor::enumerate(std::size_t n, std::size_t max_elements) const {
  std::vector<FElem> out;
  switch (kind_) {
    case Kind::Identity:
      for (std::size_t i = 0; i < n; ++i) out.push_back(FElem::atom(i));
      break;
    case Kind::Powerset: {
      if (inner_->kind_ == Kind::Identity && n > 10)
        throw BudgetError("powerset is limited to carriers with at most 10 elements");
      for (auto& s : subsets(inner_->enumerate(n, max_elements), max_elements)) out.push_back(FElem::set(std::move(s)));
      break;
    }
    case Kind::Distribution:
      throw UnsupportedError("the distribution functor has infinitely many elements");
    case Kind::Labelled: {
      auto in = inner_->enumerate(n, max_elements);
      if (in.size() * labels_.size() > max_elements) throw BudgetError(name() + " exceeds the size guard");
      for (std::size_t a = 0; a < labels_.size(); ++a)
        for (const auto& e : in) out.push_back(FElem::tagged(a, {e}));
      break;
    }
    case Kind::Power: {
      auto in = inner_->enumerate(n, max_elements);
      std::size_t count = 1;
      for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!in.empty() && count > max_elements / in.size()) throw BudgetError(name() + " exceeds the size guard");
        count *= in.size();
      }
      for (std::size_t c = 0; c < count; ++c) {
        std::vector<FElem> parts;
        std::size_t rest = c;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
          parts.push_back(in[rest % in.size()]);
          rest /= in.size();
        }
        out.push_back(FElem::tuple(std::move(parts)));
      }
      break;
    }
    case Kind::Maybe:
      out.push_back(FElem::tagged(0, {}));
      for (auto& e : inner_->enumerate(n, max_elements)) out.push_back(FElem::tagged(1, {std::move(e)}));
      break;
    case Kind::Neighbourhood: {
      if (n > 3) throw BudgetError("the neighbourhood functor is limited to carriers with at most 3 elements");
      std::vector<FElem> pw;
      for (auto& s : subsets(Functor::identity().enumerate(n), max_elements)) pw.push_back(FElem::set(std::move(s)));
      for (auto& s : subsets(pw, max_elements)) out.push_back(FElem::set(std::move(s)));
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

FElem Functor::map(const FElem& e, const MapWitness& f) const {
  switch (kind_) {
    case Kind::Identity:
      if (e.index >= f.source_size) throw ShapeError("atom outside the domain of the map");
      return FElem::atom(f(e.index));
    case Kind::Powerset: {
      std::vector<FElem> out;
      for (const auto& x : e.items) out.push_back(inner_->map(x, f));
      return FElem::set(std::move(out));
    }
    case Kind::Distribution: {
      std::vector<FElem> out;
      for (const auto& x : e.items) out.push_back(inner_->map(x, f));
      return FElem::dist(std::move(out), e.weights);
    }
    case Kind::Labelled:
      return FElem::tagged(e.index, {inner_->map(e.items.at(0), f)});
    case Kind::Power: {
      std::vector<FElem> out;
      for (const auto& x : e.items) out.push_back(inner_->map(x, f));
      return FElem::tuple(std::move(out));
    }
    case Kind::Maybe:
      if (e.index == 0) return e;
      return FElem::tagged(1, {inner_->map(e.items.at(0), f)});
    case Kind::Neighbourhood: {
      // N f(S) = {B ⊆ Y | f⁻¹(B) ∈ S}
      std::vector<FElem> out;
      for (auto& b : subsets(Functor::identity().enumerate(f.target_size), std::size_t{1} << 20)) {
        std::vector<FElem> pre;
        for (std::size_t x = 0; x < f.source_size; ++x)
          if (std::binary_search(b.begin(), b.end(), FElem::atom(f(x)))) pre.push_back(FElem::atom(x));
        if (std::binary_search(e.items.begin(), e.items.end(), FElem::set(pre))) out.push_back(FElem::set(b));
      }
      return FElem::set(std::move(out));
    }
  }
  throw UnsupportedError("unknown functor");
}

void Functor::validate(const FElem& e, std::size_t n, const std::string& path) const {
  auto fail = [&](const std::string& msg) { throw ValidationError(path, msg); };
  auto expect = [&](FElem::Tag t, const char* what) {
    if (e.tag != t) fail(std::string("expected ") + what + " for functor " + name());
  };
  switch (kind_) {
    case Kind::Identity:
      expect(FElem::Tag::Atom, "a state");
      if (e.index >= n) fail("state index out of range");
      return;
    case Kind::Powerset:
      expect(FElem::Tag::Set, "a set");
      for (std::size_t i = 0; i < e.items.size(); ++i) inner_->validate(e.items[i], n, path + "[" + std::to_string(i) + "]");
      return;
    case Kind::Distribution: {
      expect(FElem::Tag::Dist, "a distribution");
      if (e.items.empty()) fail("empty distribution");
      Rational total = 0;
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (e.weights[i] < 0) fail("negative probability");
        total += e.weights[i];
        inner_->validate(e.items[i], n, path + "[" + std::to_string(i) + "]");
      }
      if (total != 1) fail("probabilities sum to " + total.get_str() + ", not 1");
      return;
    }
    case Kind::Labelled:
      expect(FElem::Tag::Tagged, "a labelled pair");
      if (e.index >= labels_.size() || e.items.size() != 1) fail("bad label");
      inner_->validate(e.items[0], n, path + "." + labels_[e.index]);
      return;
    case Kind::Power:
      expect(FElem::Tag::Tuple, "one entry per label");
      if (e.items.size() != labels_.size()) fail("expected one entry per label");
      for (std::size_t i = 0; i < e.items.size(); ++i) inner_->validate(e.items[i], n, path + "." + labels_[i]);
      return;
    case Kind::Maybe:
      expect(FElem::Tag::Tagged, "termination or a continuation");
      if (e.index == 0 && e.items.empty()) return;
      if (e.index != 1 || e.items.size() != 1) fail("malformed 1+F element");
      inner_->validate(e.items[0], n, path);
      return;
    case Kind::Neighbourhood:
      expect(FElem::Tag::Set, "a set of sets");
      for (const auto& s : e.items) {
        if (s.tag != FElem::Tag::Set) fail("neighbourhood members must be sets");
        for (const auto& a : s.items)
          if (a.tag != FElem::Tag::Atom || a.index >= n) fail("state index out of range");
      }
      return;
  }
}

std::string Functor::format(const FElem& e, const Carrier& carrier) const {
  auto join_items = [&](const Functor& in, const char* open, const char* close) {
    std::string out = open;
    for (std::size_t i = 0; i < e.items.size(); ++i) {
      if (i) out += ",";
      out += in.format(e.items[i], carrier);
      if (e.tag == FElem::Tag::Dist) out += ":" + e.weights[i].get_str();
    }
    return out + close;
  };
  switch (kind_) {
    case Kind::Identity:
      return e.index < carrier.size() ? carrier[e.index] : "#" + std::to_string(e.index);
    case Kind::Powerset:
    case Kind::Distribution: return join_items(*inner_, "{", "}");
    case Kind::Labelled: return "(" + labels_.at(e.index) + "," + inner_->format(e.items.at(0), carrier) + ")";
    case Kind::Power: {
      std::string out = "[";
      for (std::size_t i = 0; i < e.items.size(); ++i)
        out += (i ? "," : "") + labels_.at(i) + ":" + inner_->format(e.items[i], carrier);
      return out + "]";
    }
    case Kind::Maybe: return e.index == 0 ? "term" : inner_->format(e.items.at(0), carrier);
    case Kind::Neighbourhood: return join_items(Functor::powerset(), "{", "}");
  }
  return "?";
}

std::vector<std::size_t> Functor::support(const FElem& e) const {
  std::vector<std::size_t> out;
  auto walk = [&](auto&& self, const FElem& x) -> void {
    if (x.tag == FElem::Tag::Atom) {
      out.push_back(x.index);
      return;
    }
    for (const auto& c : x.items) self(self, c);
  };
  if (kind_ == Kind::Neighbourhood) {
    // Every state is "mentioned" by a neighbourhood system.
    return {};
  }
  walk(walk, e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct FunctorParser {
  std::string_view s;
  std::size_t pos = 0;
  const std::vector<std::string>& labels;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("functor", msg + " at offset " + std::to_string(pos) + " in '" + std::string(s) + "'");
  }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s.substr(pos, tok.size()) == tok) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  std::string word() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
    return std::string(s.substr(start, pos - start));
  }
  std::vector<std::string> label_list() {
    if (eat("{")) {
      std::vector<std::string> out;
      if (eat("}")) return out;
      do {
        auto w = word();
        if (w.empty()) fail("expected a label");
        out.push_back(w);
      } while (eat(","));
      if (!eat("}")) fail("expected '}'");
      return out;
    }
    auto w = word();
    if (w != "A") fail("expected a label set");
    if (labels.empty()) fail("functor mentions A but no labels are given");
    return labels;
  }

  Functor atom() {
    if (eat("(")) {
      if (eat("1")) {
        if (!eat("+")) fail("expected '+' after '(1'");
        auto in = expr();
        if (!eat(")")) fail("expected ')'");
        return Functor::maybe(in);
      }
      auto in = expr();
      if (!eat(")")) fail("expected ')'");
      return in;
    }
    skip();
    if (pos < s.size() && s[pos] == '{') {
      auto ls = label_list();
      if (!eat("×") && !eat("*")) fail("expected '×' after label set");
      return Functor::labelled(ls, atom_with_powers());
    }
    std::size_t save = pos;
    auto w = word();
    if (w == "A") {
      if (eat("×") || eat("*")) return Functor::labelled(labels, atom_with_powers());
      pos = save;
      fail("bare label set");
    }
    auto wrapped = [&](Functor (*make)(Functor)) {
      if (eat("(")) {
        auto in = expr();
        if (!eat(")")) fail("expected ')'");
        return make(in);
      }
      return make(Functor::identity());
    };
    if (w == "id") return Functor::identity();
    if (w == "powerset" || w == "P") return wrapped(&Functor::powerset);
    if (w == "dist" || w == "D") return wrapped(&Functor::distribution);
    if (w == "nbhd" || w == "N") return Functor::neighbourhood();
    pos = save;
    fail("unknown functor '" + w + "'");
  }

  Functor atom_with_powers() {
    Functor f = atom();
    while (eat("^")) f = Functor::power(label_list(), f);
    return f;
  }

  Functor expr() { return atom_with_powers(); }
};

}  // namespace

Functor parse_functor(std::string_view text, const std::vector<std::string>& labels) {
  FunctorParser p{text, 0, labels};
  Functor f = p.expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

}  // namespace qk

namespace qk {

FElem random_element(const Functor& f, std::size_t n, std::mt19937_64& rng, int max_denominator,
                     std::size_t max_members) {
  if (n == 0) throw DomainError("random elements need a non-empty carrier");
  auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
  switch (f.kind()) {
    case Functor::Kind::Identity: return FElem::atom(pick(n));
    case Functor::Kind::Powerset: {
      std::size_t k = pick(max_members + 1);
      std::vector<FElem> m;
      for (std::size_t i = 0; i < k; ++i) m.push_back(random_element(f.inner(), n, rng, max_denominator, max_members));
      return FElem::set(std::move(m));
    }
    case Functor::Kind::Distribution: {
      // Split max_denominator units among up to max_members support points.
      std::size_t k = 1 + pick(std::max<std::size_t>(1, max_members));
      std::vector<long> units(k, 0);
      for (int u = 0; u < max_denominator; ++u) ++units[pick(k)];
      std::vector<FElem> support;
      std::vector<Rational> masses;
      for (std::size_t i = 0; i < k; ++i) {
        support.push_back(random_element(f.inner(), n, rng, max_denominator, max_members));
        Rational m(units[i], max_denominator);
        m.canonicalize();
        masses.push_back(m);
      }
      return FElem::dist(std::move(support), std::move(masses));
    }
    case Functor::Kind::Labelled:
      return FElem::tagged(pick(f.labels().size()), {random_element(f.inner(), n, rng, max_denominator, max_members)});
    case Functor::Kind::Power: {
      std::vector<FElem> parts;
      for (std::size_t i = 0; i < f.labels().size(); ++i)
        parts.push_back(random_element(f.inner(), n, rng, max_denominator, max_members));
      return FElem::tuple(std::move(parts));
    }
    case Functor::Kind::Maybe:
      if (pick(4) == 0) return FElem::tagged(0, {});
      return FElem::tagged(1, {random_element(f.inner(), n, rng, max_denominator, max_members)});
    case Functor::Kind::Neighbourhood: {
      auto all = f.enumerate(n);
      return all[pick(all.size())];
    }
  }
  throw UnsupportedError("unknown functor");
}

}  // namespace qk
