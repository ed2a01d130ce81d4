#include "qk/enriched.hpp"

#include <algorithm>
#include <sstream>

namespace qk {

Carrier numbered_carrier(std::size_t n, const std::string& prefix) {
  Carrier c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(prefix + std::to_string(i));
  return c;
}

VRelation::VRelation(Quantale q, Carrier s, Carrier t, const Value& fill)
    : quantale(std::move(q)), source(std::move(s)), target(std::move(t)) {
  quantale.check(fill);
  matrix.assign(source.size() * target.size(), fill);
}

bool VRelation::leq(const VRelation& other) const {
  if (rows() != other.rows() || cols() != other.cols()) throw ShapeError("relations of different shape");
  if (!(quantale == other.quantale)) throw DomainError("relations over different quantales");
  for (std::size_t i = 0; i < matrix.size(); ++i)
    if (!quantale.leq(matrix[i], other.matrix[i])) return false;
  return true;
}

bool operator==(const VRelation& a, const VRelation& b) {
  return a.quantale == b.quantale && a.rows() == b.rows() && a.cols() == b.cols() && a.matrix == b.matrix;
}

VCategory::VCategory(Quantale q, Carrier c, std::vector<Value> m)
    : quantale(std::move(q)), carrier(std::move(c)), matrix(std::move(m)) {
  if (matrix.size() != carrier.size() * carrier.size())
    throw ShapeError("structure matrix is not " + std::to_string(carrier.size()) + "x" +
                     std::to_string(carrier.size()));
  for (const auto& v : matrix) quantale.check(v);
}

VRelation VCategory::as_relation() const {
  VRelation r;
  r.quantale = quantale;
  r.source = carrier;
  r.target = carrier;
  r.matrix = matrix;
  return r;
}

VCategory VCategory::from_relation(const VRelation& r) {
  if (r.rows() != r.cols()) throw ShapeError("a V-category needs a square matrix");
  return VCategory(r.quantale, r.source, r.matrix);
}

bool operator==(const VCategory& a, const VCategory& b) {
  return a.quantale == b.quantale && a.size() == b.size() && a.matrix == b.matrix;
}

MapWitness::MapWitness(std::size_t target, std::vector<std::size_t> img)
    : source_size(img.size()), target_size(target), image(std::move(img)) {
  validate();
}

MapWitness MapWitness::identity(std::size_t n) {
  std::vector<std::size_t> img(n);
  for (std::size_t i = 0; i < n; ++i) img[i] = i;
  return MapWitness(n, std::move(img));
}

MapWitness MapWitness::compose(const MapWitness& g, const MapWitness& f) {
  if (f.target_size != g.source_size) throw ShapeError("maps do not compose");
  std::vector<std::size_t> img(f.source_size);
  for (std::size_t i = 0; i < f.source_size; ++i) img[i] = g(f(i));
  return MapWitness(g.target_size, std::move(img));
}

void MapWitness::validate() const {
  if (image.size() != source_size) throw ShapeError("map table does not cover its source");
  for (auto y : image)
    if (y >= target_size) throw ShapeError("map sends a point outside its target");
}

CategoryReport validate_category(const VCategory& c) {
  const auto& q = c.quantale;
  const std::size_t n = c.size();
  if (c.matrix.size() != n * n) throw ShapeError("structure matrix has the wrong size");
  CategoryReport rep;
  const Value k = q.unit();
  for (std::size_t x = 0; x < n; ++x)
    if (!q.leq(k, c.at(x, x))) rep.reflexivity_failures.push_back(x);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        if (!q.leq(q.tensor(c.at(x, y), c.at(y, z)), c.at(x, z)))
          rep.transitivity_failures.push_back({x, y, z});
  rep.is_category = rep.reflexivity_failures.empty() && rep.transitivity_failures.empty();

  rep.is_symmetric = true;
  rep.natural_order.assign(n * n, false);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (!(c.at(x, y) == c.at(y, x))) rep.is_symmetric = false;
      rep.natural_order[x * n + y] = q.leq(k, c.at(x, y));
    }
  rep.is_separated = true;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      if (rep.natural_order[x * n + y] && rep.natural_order[y * n + x]) rep.is_separated = false;
  return rep;
}

VRelation identity_relation(const Quantale& q, const Carrier& x) {
  VRelation r(q, x, x, q.bottom());
  for (std::size_t i = 0; i < x.size(); ++i) r.at(i, i) = q.unit();
  return r;
}

VRelation graph(const Quantale& q, const MapWitness& f, const Carrier& source, const Carrier& target) {
  if (f.source_size != source.size() || f.target_size != target.size())
    throw ShapeError("map does not match the given carriers");
  VRelation r(q, source, target, q.bottom());
  for (std::size_t i = 0; i < source.size(); ++i) r.at(i, f(i)) = q.unit();
  return r;
}

namespace {

void same_quantale(const VRelation& a, const VRelation& b) {
  if (!(a.quantale == b.quantale)) throw DomainError("relations over different quantales");
}

}  // namespace

VRelation compose(const VRelation& s, const VRelation& r) {
  same_quantale(s, r);
  if (r.cols() != s.rows()) throw ShapeError("relations do not compose: inner carriers differ in size");
  const auto& q = r.quantale;
  VRelation out(q, r.source, s.target, q.bottom());
  for (std::size_t x = 0; x < r.rows(); ++x)
    for (std::size_t z = 0; z < s.cols(); ++z) {
      Value acc = q.bottom();
      for (std::size_t y = 0; y < r.cols(); ++y) acc = q.join(acc, q.tensor(r.at(x, y), s.at(y, z)));
      out.at(x, z) = acc;
    }
  return out;
}

VRelation converse(const VRelation& r) {
  VRelation out(r.quantale, r.target, r.source, r.quantale.bottom());
  for (std::size_t x = 0; x < r.rows(); ++x)
    for (std::size_t y = 0; y < r.cols(); ++y) out.at(y, x) = r.at(x, y);
  return out;
}

VRelation kan_extension(const VRelation& r, const VRelation& s) {
  same_quantale(r, s);
  if (r.rows() != s.rows()) throw ShapeError("kan extension needs relations with a common source");
  const auto& q = r.quantale;
  VRelation out(q, s.target, r.target, q.top());
  for (std::size_t z = 0; z < s.cols(); ++z)
    for (std::size_t y = 0; y < r.cols(); ++y) {
      Value acc = q.top();
      for (std::size_t x = 0; x < r.rows(); ++x) acc = q.meet(acc, q.hom(s.at(x, z), r.at(x, y)));
      out.at(z, y) = acc;
    }
  return out;
}

VRelation meet(const VRelation& a, const VRelation& b) {
  same_quantale(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("relations of different shape");
  VRelation out = a;
  for (std::size_t i = 0; i < a.matrix.size(); ++i) out.matrix[i] = a.quantale.meet(a.matrix[i], b.matrix[i]);
  return out;
}

VRelation scale(const Value& u, const VRelation& r) {
  VRelation out = r;
  for (auto& v : out.matrix) v = r.quantale.tensor(u, v);
  return out;
}

VCategory initial_structure(const Quantale& q, const Carrier& carrier, std::span<const ConeLeg> cone) {
  const std::size_t n = carrier.size();
  for (const auto& leg : cone) {
    if (leg.map.source_size != n || leg.map.target_size != leg.target.size())
      throw ShapeError("cone leg does not match the carrier");
    if (!(leg.target.quantale == q)) throw DomainError("cone leg over another quantale");
  }
  std::vector<Value> m(n * n, q.top());
  for (const auto& leg : cone)
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        m[x * n + y] = q.meet(m[x * n + y], leg.target.at(leg.map(x), leg.map(y)));
  return VCategory(q, carrier, std::move(m));
}

VCategory initial_structure_residual(const Quantale& q, const Carrier& carrier,
                                     std::span<const VRelation> flat_predicates) {
  VRelation acc(q, carrier, carrier, q.top());
  for (const auto& p : flat_predicates) {
    if (p.cols() != carrier.size()) throw ShapeError("predicate does not live on the carrier");
    acc = meet(acc, kan_extension(p, p));
  }
  return VCategory(q, carrier, acc.matrix);
}

namespace {

void check_map(const MapWitness& f, const VCategory& dom, const VCategory& cod) {
  if (f.source_size != dom.size() || f.target_size != cod.size())
    throw ShapeError("map does not match the categories");
  if (!(dom.quantale == cod.quantale)) throw DomainError("categories over different quantales");
}

}  // namespace

bool is_vfunctor(const MapWitness& f, const VCategory& dom, const VCategory& cod) {
  check_map(f, dom, cod);
  for (std::size_t x = 0; x < dom.size(); ++x)
    for (std::size_t y = 0; y < dom.size(); ++y)
      if (!dom.quantale.leq(dom.at(x, y), cod.at(f(x), f(y)))) return false;
  return true;
}

bool is_initial_morphism(const MapWitness& f, const VCategory& dom, const VCategory& cod) {
  check_map(f, dom, cod);
  for (std::size_t x = 0; x < dom.size(); ++x)
    for (std::size_t y = 0; y < dom.size(); ++y)
      if (!(dom.at(x, y) == cod.at(f(x), f(y)))) return false;
  return true;
}

VCategory symmetrize(const VCategory& c) {
  VCategory out = c;
  for (std::size_t x = 0; x < c.size(); ++x)
    for (std::size_t y = 0; y < c.size(); ++y) out.at(x, y) = c.quantale.meet(c.at(x, y), c.at(y, x));
  return out;
}

VCategory dualize(const VCategory& c) {
  VCategory out = c;
  for (std::size_t x = 0; x < c.size(); ++x)
    for (std::size_t y = 0; y < c.size(); ++y) out.at(x, y) = c.at(y, x);
  return out;
}

VCategory discrete(const Quantale& q, const Carrier& carrier) {
  return VCategory(q, carrier, identity_relation(q, carrier).matrix);
}

VCategory indiscrete(const Quantale& q, const Carrier& carrier) {
  return VCategory(q, carrier, std::vector<Value>(carrier.size() * carrier.size(), q.top()));
}

VCategory power(const VCategory& c, std::size_t exponent, std::size_t max_size) {
  const std::size_t n = c.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (n != 0 && count > max_size / n) throw BudgetError("power category exceeds the size guard");
    count *= n;
  }
  if (count > max_size) throw BudgetError("power category exceeds the size guard");
  // Function number f has digits f_0 f_1 ... in base n (digit i = value at i).
  std::vector<std::vector<std::size_t>> funcs(count, std::vector<std::size_t>(exponent));
  Carrier names(count);
  for (std::size_t f = 0; f < count; ++f) {
    std::size_t rest = f;
    std::string name = "(";
    for (std::size_t i = 0; i < exponent; ++i) {
      funcs[f][i] = rest % n;
      rest /= n;
      if (i) name += ",";
      name += c.carrier[funcs[f][i]];
    }
    names[f] = name + ")";
  }
  std::vector<Value> m(count * count, c.quantale.top());
  for (std::size_t f = 0; f < count; ++f)
    for (std::size_t g = 0; g < count; ++g) {
      Value acc = c.quantale.top();
      for (std::size_t i = 0; i < exponent; ++i) acc = c.quantale.meet(acc, c.at(funcs[f][i], funcs[g][i]));
      m[f * count + g] = acc;
    }
  return VCategory(c.quantale, std::move(names), std::move(m));
}

VCategory value_category(const Quantale& q, std::span<const Value> values) {
  Carrier names;
  for (const auto& v : values) names.push_back(q.format(v));
  std::vector<Value> m;
  m.reserve(values.size() * values.size());
  for (const auto& u : values)
    for (const auto& w : values) m.push_back(q.hom(u, w));
  return VCategory(q, std::move(names), std::move(m));
}

VCategory restrict_along(const MapWitness& f, const VCategory& cod, const Carrier& carrier) {
  if (f.source_size != carrier.size() || f.target_size != cod.size())
    throw ShapeError("map does not match the carriers");
  const std::size_t n = carrier.size();
  std::vector<Value> m(n * n, cod.quantale.top());
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) m[x * n + y] = cod.at(f(x), f(y));
  return VCategory(cod.quantale, carrier, std::move(m));
}

VCategory transitive_closure(VCategory c) {
  const auto& q = c.quantale;
  const std::size_t n = c.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t z = 0; z < n; ++z) {
          Value v = q.join(c.at(x, z), q.tensor(c.at(x, y), c.at(y, z)));
          if (!(v == c.at(x, z))) {
            c.at(x, z) = v;
            changed = true;
          }
        }
  }
  return c;
}

std::string format_matrix(const Quantale& q, const Carrier& rows, const Carrier& cols,
                          std::span<const Value> matrix) {
  std::ostringstream out;
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.size());
  std::vector<std::string> cells;
  std::size_t cell_width = 0;
  for (const auto& c : cols) cell_width = std::max(cell_width, c.size());
  for (const auto& v : matrix) {
    cells.push_back(q.format(v));
    cell_width = std::max(cell_width, cells.back().size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  out << pad("", width);
  for (const auto& c : cols) out << "  " << pad(c, cell_width);
  out << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << pad(rows[i], width);
    for (std::size_t j = 0; j < cols.size(); ++j) out << "  " << pad(cells[i * cols.size() + j], cell_width);
    out << "\n";
  }
  return out.str();
}

}  // namespace qk
