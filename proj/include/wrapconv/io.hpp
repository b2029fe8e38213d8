#pragma once

// JSON serialization for the measure and descriptor types, and CSV + JSON
// sidecar emission for recovered profiles.
//
// Schemas:
//   CircleMeasure        {"atoms":[{"theta":f,"mass":f}],
//                         "fourier":{"c0":f,"cn":[[re,im],...]}}
//   RealAtomicMeasure    {"atoms":[{"x":f,"w":f}]}
//   ClassLDescriptor     {"beta":f,"sigma":<CircleMeasure>}
//   BooleanIDDescriptor  {"gamma":[re,im],"sigma":<CircleMeasure>}
//   CanonicalPairR       {"alpha":f,"tau":<RealAtomicMeasure>}
//   MultPair             {"gamma":[re,im],"beta":f,"sigma":<CircleMeasure>}
//
// Profiles are written as CSV with header "abscissa,density" plus a JSON
// sidecar carrying atoms and mass accounting.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wrapconv/class_l.hpp"
#include "wrapconv/common.hpp"
#include "wrapconv/levy.hpp"
#include "wrapconv/measures.hpp"
#include "wrapconv/wrapping.hpp"

namespace wrapconv::io {

using nlohmann::json;

inline json to_json(const CircleMeasure& m) {
  json atoms = json::array();
  for (const CircleAtom& a : m.atoms()) atoms.push_back({{"theta", a.theta}, {"mass", a.mass}});
  json cn = json::array();
  for (const cplx& c : m.cn()) cn.push_back({c.real(), c.imag()});
  return json{{"atoms", atoms}, {"fourier", {{"c0", m.c0()}, {"cn", cn}}}};
}

inline CircleMeasure circle_measure_from_json(const json& j) {
  std::vector<CircleAtom> atoms;
  if (j.contains("atoms"))
    for (const json& a : j.at("atoms"))
      atoms.push_back(CircleAtom{a.at("theta").get<double>(), a.at("mass").get<double>()});
  double c0 = 0.0;
  std::vector<cplx> cn;
  if (j.contains("fourier")) {
    const json& f = j.at("fourier");
    c0 = f.value("c0", 0.0);
    if (f.contains("cn"))
      for (const json& c : f.at("cn")) cn.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  }
  return CircleMeasure(std::move(atoms), c0, std::move(cn));
}

inline json to_json(const RealAtomicMeasure& m) {
  json atoms = json::array();
  for (const RealAtom& a : m.atoms()) atoms.push_back({{"x", a.x}, {"w", a.w}});
  return json{{"atoms", atoms}};
}

inline RealAtomicMeasure real_atomic_from_json(const json& j) {
  std::vector<RealAtom> atoms;
  if (j.contains("atoms"))
    for (const json& a : j.at("atoms"))
      atoms.push_back(RealAtom{a.at("x").get<double>(), a.at("w").get<double>()});
  return RealAtomicMeasure(std::move(atoms));
}

inline json to_json(const ClassLDescriptor& d) {
  return json{{"beta", d.beta}, {"sigma", to_json(d.sigma)}};
}

inline ClassLDescriptor classl_from_json(const json& j) {
  return ClassLDescriptor{j.at("beta").get<double>(), circle_measure_from_json(j.at("sigma"))};
}

inline json to_json(const BooleanIDDescriptor& b) {
  return json{{"gamma", {b.gamma.real(), b.gamma.imag()}}, {"sigma", to_json(b.sigma)}};
}

inline BooleanIDDescriptor boolean_id_from_json(const json& j) {
  const json& g = j.at("gamma");
  BooleanIDDescriptor b{cplx{g.at(0).get<double>(), g.at(1).get<double>()},
                        circle_measure_from_json(j.at("sigma"))};
  b.validate();
  return b;
}

inline json to_json(const levy::CanonicalPairR& p) {
  return json{{"alpha", p.alpha}, {"tau", to_json(p.tau)}};
}

inline levy::CanonicalPairR canonical_pair_from_json(const json& j) {
  return levy::CanonicalPairR{j.at("alpha").get<double>(), real_atomic_from_json(j.at("tau"))};
}

inline json to_json(const levy::MultPair& p) {
  return json{{"gamma", {p.gamma.real(), p.gamma.imag()}},
              {"beta", p.beta},
              {"sigma", to_json(p.sigma)}};
}

inline levy::MultPair mult_pair_from_json(const json& j) {
  levy::MultPair p;
  if (j.contains("gamma")) {
    const json& g = j.at("gamma");
    p.gamma = cplx{g.at(0).get<double>(), g.at(1).get<double>()};
  }
  p.beta = j.value("beta", 0.0);
  if (!j.contains("gamma")) p.gamma = std::polar(1.0, -p.beta);
  p.sigma = circle_measure_from_json(j.at("sigma"));
  return p;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

/// Shortest round-trippable decimal form, stable across runs.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string profile_csv(const MeasureProfile& p) {
  std::ostringstream out;
  out << "abscissa,density\n";
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    out << format_double(p.grid[i]) << "," << format_double(p.density[i]) << "\n";
  return out.str();
}

inline json profile_sidecar(const MeasureProfile& p) {
  json atoms = json::array();
  for (const ProfileAtom& a : p.atoms)
    atoms.push_back({{"position", a.position}, {"weight", a.weight}});
  return json{{"domain", p.domain == Domain::Line ? "line" : "circle"},
              {"atoms", atoms},
              {"atom_mass", p.atom_mass()},
              {"density_mass", p.density_mass()},
              {"captured_mass", p.captured_mass},
              {"truncation_note", p.truncation_note}};
}

/// Writes <path> (CSV) and <path>.json (sidecar).
inline void emit_profile(const MeasureProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot open " + path + " for writing");
  out << profile_csv(p);
  save_json(profile_sidecar(p), path + ".json");
}

}  // namespace wrapconv::io
