#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phg/fit.hpp"
#include "phg/formal.hpp"
#include "phg/indices.hpp"
#include "phg/modeode.hpp"
#include "phg/phgseries.hpp"
#include "phg/spectral.hpp"

namespace phg::io {

using Json = nlohmann::ordered_json;

// Model files:
//   {"dimD": d, "eigenvalues": [...], "volume": V, "triple_product": T}
// with T one of {"kind": "dense", "data": [L³ numbers, row-major]},
// {"kind": "circle"} or {"kind": "torus", "lattice_cutoff": c}. Built-in
// kinds must reproduce the listed eigenvalues and volume. Shorthands:
//   {"kind": "point"}, {"kind": "circle", "modes": M, "radius": r},
//   {"kind": "torus", "n": n, "lattice_cutoff": c}
std::shared_ptr<const SpectralModel> modelFromJson(const Json& j);

// Series: {"truncation": A or null, "terms": [{"i": .., "j": .., "coeff": [..]}]}.
// Doubles are written in shortest round-trip form, so reading back is exact.
Json toJson(const PhgSeries& s);
PhgSeries seriesFromJson(const Json& j, std::shared_ptr<const SpectralModel> model,
                         std::shared_ptr<const IndexSet> indices = nullptr);

// Source files are series objects with two optional extras:
//   "nonlinearity": "log1p" | "expm1" | "identity" | {"taylor": [0, 1, g2, ...]}
//   "perturbation": a series object (the O(x) operator perturbation p)
struct SourceSpec {
  PhgSeries source;
  AnalyticGerm nonlinearity = AnalyticGerm::log1p();
  std::optional<PhgSeries> perturbation;
};
SourceSpec sourceFromJson(const Json& j, std::shared_ptr<const SpectralModel> model);
Json toJson(const AnalyticGerm& g);

Json toJson(const IndicialRoots& r);
Json toJson(const IndexSet& I);
Json toJson(const FormalSolution& f);
Json toJson(const Grid& g);
Json toJson(const std::vector<ModeSolution>& modes, const Grid& grid);
Json toJson(const ExpansionReport& r);

Json readJsonFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, const std::string& text);
// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace phg::io
