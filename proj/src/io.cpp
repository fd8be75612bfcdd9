#include "phg/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "phg/error.hpp"

namespace phg::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InputError("io", what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number(x, what));
  return out;
}

Json finiteOrNull(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json monomialJson(const LogMonomial& m) { return Json{{"i", m.exponent}, {"j", m.logPower}}; }

}  // namespace

namespace {

std::shared_ptr<const SpectralModel> shorthandModel(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "point") return std::make_shared<const SpectralModel>(SpectralModel::point());
  if (kind == "circle") {
    const auto modes = field(j, "modes").get<std::size_t>();
    const double radius = j.contains("radius") ? number(j.at("radius"), "radius") : 1.0;
    return std::make_shared<const SpectralModel>(SpectralModel::circle(modes, radius));
  }
  if (kind == "torus") {
    return std::make_shared<const SpectralModel>(
        SpectralModel::torus(field(j, "n").get<int>(), field(j, "lattice_cutoff").get<int>()));
  }
  bad("unknown model kind \"" + kind + "\"");
}

// A built-in model must reproduce the eigenvalues and volume the file lists.
void confirm(const SpectralModel& m, const std::vector<double>& eig, double volume) {
  bool same = m.size() == eig.size() && std::abs(m.volume() - volume) <= 1e-9 * volume;
  for (std::size_t l = 0; same && l < eig.size(); ++l) {
    same = std::abs(m.eigenvalue(l) - eig[l]) <= 1e-9 * std::max(1.0, eig[l]);
  }
  if (!same) bad("eigenvalues or volume do not match the " + m.describe() + " model");
}

}  // namespace

std::shared_ptr<const SpectralModel> modelFromJson(const Json& j) {
  try {
    if (j.contains("kind")) return shorthandModel(j);
    const int dimD = field(j, "dimD").get<int>();
    const auto eig = numbers(field(j, "eigenvalues"), "eigenvalues");
    const double volume = number(field(j, "volume"), "volume");
    const Json& t = field(j, "triple_product");
    const std::string kind = field(t, "kind").get<std::string>();
    if (kind == "dense") {
      const auto tensor = numbers(field(t, "data"), "triple_product data");
      return std::make_shared<const SpectralModel>(SpectralModel::dense(dimD, eig, volume, tensor));
    }
    std::shared_ptr<const SpectralModel> m;
    if (kind == "circle") {
      if (dimD != 1) bad("a circle model has dimD = 1");
      m = std::make_shared<const SpectralModel>(SpectralModel::circle(eig.size(), volume / (2.0 * std::numbers::pi)));
    } else if (kind == "torus") {
      if (dimD < 2 || dimD % 2 != 0) bad("a torus model has even dimD ≥ 2");
      m = std::make_shared<const SpectralModel>(
          SpectralModel::torus(dimD / 2 + 1, field(t, "lattice_cutoff").get<int>()));
    } else {
      bad("unknown triple_product kind \"" + kind + "\"");
    }
    confirm(*m, eig, volume);
    return m;
  } catch (const Json::exception& e) {
    bad(std::string("malformed model: ") + e.what());
  }
}

Json toJson(const PhgSeries& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms()) {
    Json term = monomialJson(t.monomial);
    term["coeff"] = t.coeff.vector();
    terms.push_back(std::move(term));
  }
  return Json{{"truncation", finiteOrNull(s.truncation())}, {"terms", std::move(terms)}};
}

PhgSeries seriesFromJson(const Json& j, std::shared_ptr<const SpectralModel> model,
                         std::shared_ptr<const IndexSet> indices) {
  try {
    const Json& tr = field(j, "truncation");
    const double truncation = tr.is_null() ? kInfiniteOrder : number(tr, "truncation");
    PhgSeries s(model, truncation, indices);
    for (const auto& t : field(j, "terms")) {
      const double i = number(field(t, "i"), "term exponent");
      const int power = t.contains("j") ? t.at("j").get<int>() : 0;
      if (!(i >= 0.0) || power < 0) bad("term exponents and log powers must be non-negative");
      auto coeff = numbers(field(t, "coeff"), "coeff");
      if (coeff.size() != model->size()) {
        std::ostringstream os;
        os << "coefficient of x^" << i << " has " << coeff.size() << " entries; the model has "
           << model->size() << " modes";
        bad(os.str());
      }
      s = s.withTerm({i, power}, SpectralFunction(std::move(coeff)));
    }
    return s;
  } catch (const Json::exception& e) {
    bad(std::string("malformed series: ") + e.what());
  }
}

SourceSpec sourceFromJson(const Json& j, std::shared_ptr<const SpectralModel> model) {
  SourceSpec spec{seriesFromJson(j, model), AnalyticGerm::log1p(), std::nullopt};
  if (j.contains("nonlinearity")) {
    const Json& g = j.at("nonlinearity");
    if (g.is_string()) {
      const auto name = g.get<std::string>();
      if (name == "log1p") spec.nonlinearity = AnalyticGerm::log1p();
      else if (name == "expm1") spec.nonlinearity = AnalyticGerm::expm1();
      else if (name == "identity") spec.nonlinearity = AnalyticGerm::identity();
      else bad("unknown nonlinearity \"" + name + "\"");
    } else {
      spec.nonlinearity = AnalyticGerm::fromTaylor(numbers(field(g, "taylor"), "taylor"));
    }
  }
  if (j.contains("perturbation")) spec.perturbation = seriesFromJson(j.at("perturbation"), model);
  return spec;
}

Json toJson(const AnalyticGerm& g) {
  if (g.explicitLength() > 0) return Json{{"taylor", g.taylor()}};
  return Json(g.name());
}

Json toJson(const IndicialRoots& r) {
  Json j{{"lambda", r.eigenvalue}, {"m_bar", r.mBar}, {"m_under", r.mUnder}};
  if (r.exactBar && r.exactUnder) {
    auto str = [](const Rational& q) {
      std::ostringstream os;
      os << q;
      return os.str();
    };
    j["exact"] = Json{{"m_bar", str(*r.exactBar)}, {"m_under", str(*r.exactUnder)}};
  }
  return j;
}

Json toJson(const IndexSet& I) {
  Json elems = Json::array();
  for (std::size_t n = 0; n < I.size(); ++n) {
    elems.push_back(Json{{"index", I[n]}, {"resonant_modes", I.resonantModes(n)}});
  }
  Json eps = Json::array();
  for (const auto& e : I.epsilonLedger()) {
    eps.push_back(Json{{"k", e.index}, {"k_plus", e.next}, {"epsilon", e.epsilon}});
  }
  return Json{{"cutoff", I.cutoff()}, {"generators", I.generators()}, {"elements", std::move(elems)},
              {"epsilon", std::move(eps)}};
}

Json toJson(const FormalSolution& f) {
  Json bounds = Json::array();
  for (const auto& [i, n] : f.logBounds) bounds.push_back(Json{{"i", i}, {"N", n}});
  Json free = Json::array();
  for (const auto& fc : f.freeComponents) {
    free.push_back(Json{{"i", fc.exponent}, {"mode", fc.mode}, {"value", fc.value}});
  }
  Json steps = Json::array();
  for (const auto& s : f.steps) {
    Json step{{"target", monomialJson(s.target)},
              {"resonant", s.resonant},
              {"log_raised", s.logRaised},
              {"before", s.targetBefore},
              {"after", s.targetAfter}};
    step["next_leading"] = s.nextLeading ? monomialJson(*s.nextLeading) : Json(nullptr);
    steps.push_back(std::move(step));
  }
  Json ledger = Json::array();
  for (const auto& r : f.logLedger) {
    ledger.push_back(Json{{"i", r.index},
                          {"forcing_log_power", r.forcingLogPower},
                          {"produced_log_power", r.producedLogPower},
                          {"resonant", r.resonant}});
  }
  return Json{{"order", f.order},           {"psi", toJson(f.psi)},
              {"log_bounds", bounds},       {"free_components", free},
              {"steps", steps},             {"log_ledger", ledger},
              {"final_residual", toJson(f.finalResidual)}};
}

Json toJson(const Grid& g) {
  return Json{{"x0", g.x0}, {"xmin", g.xMin}, {"n", g.count}, {"points", g.points}};
}

Json toJson(const std::vector<ModeSolution>& modes, const Grid& grid) {
  Json arr = Json::array();
  for (const auto& m : modes) {
    arr.push_back(Json{{"mode", m.modeIndex},
                       {"lambda", m.roots.eigenvalue},
                       {"m_bar", m.roots.mBar},
                       {"m_under", m.roots.mUnder},
                       {"boundary_datum", m.boundaryDatum},
                       {"values", m.values}});
  }
  return Json{{"grid", toJson(grid)}, {"modes", std::move(arr)}};
}

Json toJson(const ExpansionReport& r) {
  Json fitted = Json::array();
  for (const auto& fc : r.fittedFreeComponents) {
    fitted.push_back(Json{{"i", fc.exponent}, {"mode", fc.mode}, {"value", fc.value}});
  }
  Json slopes = Json::array();
  for (const auto& s : r.remainderSlopes) {
    slopes.push_back(Json{{"k", s.k},
                          {"expected", s.expected},
                          {"slope", s.points ? Json(s.slope) : Json(nullptr)},
                          {"log_power", s.logPower},
                          {"points", s.points},
                          {"pass", s.pass}});
  }
  Json disc = Json::array();
  for (const auto& c : r.discrepancies) {
    disc.push_back(Json{{"i", c.exponent},
                        {"j", c.logPower},
                        {"mode", c.mode},
                        {"formal", c.formal},
                        {"oracle", c.oracle},
                        {"discrepancy", c.discrepancy},
                        {"relative", c.relative},
                        {"free", c.free}});
  }
  return Json{{"order", r.order},
              {"window", Json::array({r.windowLo, r.windowHi})},
              {"coefficients", toJson(r.formal.psi)},
              {"formal", toJson(r.formal)},
              {"fitted_free_components", std::move(fitted)},
              {"remainder_slopes", std::move(slopes)},
              {"discrepancies", std::move(disc)}};
}

Json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("io", "cannot write " + path.string());
  out << text;
  if (!out) throw InputError("io", "write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace phg::io
