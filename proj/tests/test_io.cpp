#include <cmath>
#include <numbers>
#include <random>

#include "phg/error.hpp"
#include "phg/io.hpp"
#include "support.hpp"

using namespace phg;
using io::Json;

TEST_CASE("series JSON round trip is bit-exact") {
  auto m = phgtest::shared(SpectralModel::circle(3));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  PhgSeries s(m, 4.5);
  for (int n = 0; n < 6; ++n)
    s = s.withTerm({std::sqrt(2.0) * n / 2, n % 3}, SpectralFunction{u(rng) / 3, u(rng) * 1e-17, u(rng) * 7e5});
  auto back = io::seriesFromJson(Json::parse(io::toJson(s).dump()), m);
  REQUIRE(back.size() == s.size());
  CHECK(back.truncation() == s.truncation());
  for (std::size_t n = 0; n < s.size(); ++n) {
    CHECK(back.terms()[n].monomial.exponent == s.terms()[n].monomial.exponent);
    CHECK(back.terms()[n].monomial.logPower == s.terms()[n].monomial.logPower);
    CHECK(back.terms()[n].coeff == s.terms()[n].coeff);
  }
  CHECK(io::toJson(PhgSeries(m))["truncation"].is_null());
}

TEST_CASE("model files") {
  SUBCASE("dense") {
    auto m = io::modelFromJson(Json::parse(
        R"({"dimD": 0, "eigenvalues": [0], "volume": 1, "triple_product": {"kind": "dense", "data": [1]}})"));
    CHECK(m->size() == 1);
  }
  SUBCASE("circle reproduces listed eigenvalues") {
    const double v = 2 * std::numbers::pi;
    Json j{{"dimD", 1}, {"eigenvalues", {0, 1, 1}}, {"volume", v}, {"triple_product", {{"kind", "circle"}}}};
    CHECK(io::modelFromJson(j)->kind() == ModelKind::Circle);
    j["eigenvalues"] = {0, 2, 2};
    CHECK_THROWS_AS(io::modelFromJson(j), InputError);
  }
  SUBCASE("torus") {
    const double v = std::pow(2 * std::numbers::pi, 2);
    auto ref = SpectralModel::torus(2, 1);
    Json j{{"dimD", 2},
           {"eigenvalues", ref.eigenvalues()},
           {"volume", v},
           {"triple_product", {{"kind", "torus"}, {"lattice_cutoff", 1}}}};
    CHECK(io::modelFromJson(j)->size() == ref.size());
  }
  SUBCASE("shorthands") {
    CHECK(io::modelFromJson(Json{{"kind", "point"}})->size() == 1);
    CHECK(io::modelFromJson(Json{{"kind", "circle"}, {"modes", 5}})->size() == 5);
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(io::modelFromJson(Json{{"dimD", 1}}), InputError);
    CHECK_THROWS_AS(io::modelFromJson(Json{{"kind", "sphere"}}), InputError);
  }
}

TEST_CASE("source files") {
  auto m = phgtest::pointModel();
  auto spec = io::sourceFromJson(Json::parse(R"({"truncation": 3, "terms": [{"i": 0, "j": 0, "coeff": [-0.5]},
      {"i": 1, "coeff": [0.09]}], "nonlinearity": {"taylor": [0, 1, -0.5]}})"), m);
  CHECK(spec.source.coefficient(1, 0)[0] == 0.09);
  CHECK(spec.nonlinearity.coefficient(2) == -0.5);
  CHECK_FALSE(spec.perturbation);
  CHECK_THROWS_AS(io::sourceFromJson(Json::parse(R"({"truncation": null, "terms": [{"i": 1, "coeff": [1, 2]}]})"), m),
                  InputError);
  CHECK_THROWS_AS(io::sourceFromJson(Json::parse(R"({"truncation": null, "terms": [], "nonlinearity": "tanh"})"), m),
                  InputError);
}

TEST_CASE("roots JSON carries exact values when available") {
  auto j = io::toJson(characteristicRoots(5.0));
  CHECK(j["exact"]["m_bar"] == "3");
  CHECK_FALSE(io::toJson(characteristicRoots(1.0)).contains("exact"));
}

TEST_CASE("missing files are input errors") {
  CHECK_THROWS_AS(io::readJsonFile("/nonexistent/model.json"), InputError);
}
