#include "doctest.h"

#include <filesystem>

#include "qk/io.hpp"

using namespace qk;

namespace {

std::string error_path(const Json& j) {
  try {
    parse_spec(j);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<none>";
}

Json deadlock() {
  return Json::parse(R"({"quantale": "bool2", "functor": "powerset", "states": ["x", "y"],
                         "transitions": {"x": ["x"], "y": []}, "lifting": "egli-lower"})");
}

}  // namespace

TEST_CASE("categories and relations round-trip through JSON") {
  auto l = Quantale::luk01();
  VCategory c(l, {"p", "q"}, {l.top(), l.number(Rational(3, 10)), l.number(Rational(1, 2)), l.top()});
  auto j = category_to_json(c);
  CHECK(j.at("matrix")[0][1] == "3/10");
  CHECK(category_from_json(j) == c);

  auto b = Quantale::bool2();
  VRelation r(b, {"a"}, {"u", "v"}, b.bottom());
  r.at(0, 1) = b.top();
  CHECK(relation_from_json(relation_to_json(r)) == r);

  auto fm = Quantale::free_on_monoid(FiniteMonoid::truncated_free_commutative({"a"}, 2));
  VCategory fc(fm, {"s"}, {fm.top()});
  CHECK(category_from_json(category_to_json(fc)) == fc);
}

TEST_CASE("value parsing") {
  auto l = Quantale::luk01();
  CHECK(value_from_json(l, Json(0.25), "v") == l.number(Rational(1, 4)));
  CHECK(value_from_json(l, Json("2/8"), "v") == l.number(Rational(1, 4)));
  CHECK(value_from_json(l, Json(1), "v") == l.number(1));
  CHECK_THROWS_AS(value_from_json(l, Json("7/4"), "v"), ValidationError);
  CHECK_THROWS_AS(value_from_json(l, Json::array(), "v"), ValidationError);
  auto b = Quantale::bool2();
  CHECK(value_from_json(b, Json(true), "v") == b.top());
}

TEST_CASE("elements of F X round-trip through JSON") {
  Carrier s{"x", "y", "z"};
  auto p = Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity()));
  auto md = Functor::power({"a"}, Functor::maybe(Functor::distribution()));
  auto nb = Functor::neighbourhood();
  std::mt19937_64 rng(3);
  for (const auto& f : {p, md, nb, Functor::distribution(Functor::powerset())}) {
    for (int i = 0; i < 30; ++i) {
      auto e = random_element(f, 3, rng);
      auto j = felem_to_json(f, e, s);
      REQUIRE(felem_from_json(f, j, s, "e") == e);
    }
  }
  auto d = Functor::distribution();
  auto e = felem_from_json(d, Json::parse(R"({"x": "1/2", "z": 0.5})"), s, "e");
  CHECK(e == FElem::dist({FElem::atom(0), FElem::atom(2)}, {Rational(1, 2), Rational(1, 2)}));
  CHECK(felem_from_json(Functor::maybe(d), nullptr, s, "e") == FElem::tagged(0, {}));
}

TEST_CASE("system specs load and validate with field paths") {
  auto s = parse_spec(deadlock());
  CHECK(s.system.size() == 2);
  CHECK(s.system.alpha[1] == FElem::set({}));
  CHECK(s.lifting == "egli-lower");
  CHECK(parse_spec(spec_to_json(s)).system.alpha == s.system.alpha);

  auto j = deadlock();
  j.erase("transitions");
  CHECK(error_path(j) == "transitions");
  j = deadlock();
  j["transitions"]["y"] = Json::array({"w"});
  CHECK(error_path(j) == "transitions.y[0]");
  j = deadlock();
  j["transitions"].erase("y");
  CHECK(error_path(j) == "transitions.y");
  j = deadlock();
  j["quantale"] = "reals";
  CHECK(error_path(j) == "quantale");
  j = deadlock();
  j["lifting"] = "nope";
  CHECK(error_path(j) == "lifting");
  j = deadlock();
  j["modalities"] = Json::array({"box"});
  CHECK(error_path(j) == "modalities[0]");
  j = deadlock();
  j["extra"] = 1;
  CHECK(error_path(j) == "extra");
  j = deadlock();
  j["metric"] = Json::parse(R"([["top", "bot"], ["bot", "bot"]])");
  CHECK(error_path(j) == "metric[1]");

  auto m = Json::parse(R"({"quantale": "luk01", "functor": "dist", "states": ["x", "y"],
                           "transitions": {"x": {"x": "1/2", "y": "1/3"}, "y": {"y": 1}}})");
  CHECK(error_path(m) == "transitions.x");
  m["transitions"]["x"] = Json::parse(R"({"x": "3/2", "y": "-1/2"})");
  CHECK(error_path(m) == "transitions.x");
  m["transitions"]["x"] = Json::parse(R"({"x": "1/2", "y": "1/2"})");
  m["metric"] = Json::parse(R"([[0, "1/2"], ["1/2", 0]])");
  auto ok = parse_spec(m);
  CHECK(ok.system.states.at(0, 1) == Quantale::luk01().number(Rational(1, 2)));
  m["metric"] = Json::parse(R"([[0, "1/2"], ["1/2", 0], [0, 0]])");
  CHECK(error_path(m) == "metric");
}

TEST_CASE("csv and atomic writes") {
  auto b = Quantale::bool2();
  VCategory c(b, {"x", "y"}, {b.top(), b.bottom(), b.top(), b.top()});
  CHECK(matrix_csv(c) == "state,x,y\nx,top,bot\ny,top,top\n");
  auto dir = std::filesystem::temp_directory_path() / "qk_io_test";
  std::filesystem::remove_all(dir);
  auto file = (dir / "sub" / "m.csv").string();
  write_atomic(file, "one");
  write_atomic(file, "two");
  CHECK(read_file(file) == "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) ++entries;
  CHECK(entries == 1);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_file(file), ValidationError);
}
