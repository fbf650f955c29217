#pragma once
// JSON encoding for the library types: spaces, vectors, matrix levels,
// measures, supports, separable decompositions, certificates, block maps,
// and run reports. Every *_from_json(*_to_json(x)) reproduces x exactly;
// doubles survive the trip bit for bit.

#include <opcone/finite.hpp>
#include <opcone/geometry.hpp>
#include <opcone/support.hpp>

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace opcone {

using Json = nlohmann::json;

// ------------------------------------------------------------ scalar blocks

inline Json complex_to_json(const std::complex<double>& z) {
  return Json::array({z.real(), z.imag()});
}

inline std::complex<double> complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("json: complex entries are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json vec_r_to_json(const VecR<>& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline VecR<> vec_r_from_json(const Json& j) {
  VecR<> v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

inline Json vec_c_to_json(const VecC<>& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline VecC<> vec_c_from_json(const Json& j) {
  VecC<> v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json mat_c_to_json(const MatC<>& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatC<> mat_c_from_json(const Json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  MatC<> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[static_cast<std::size_t>(i)].size()) != cols)
      throw std::invalid_argument("json: ragged matrix");
    for (int c = 0; c < cols; ++c)
      m(i, c) = complex_from_json(j[static_cast<std::size_t>(i)]
                                   [static_cast<std::size_t>(c)]);
  }
  return m;
}

inline Json mat_r_to_json(const MatR<>& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatR<> mat_r_from_json(const Json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  MatR<> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c)
      m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]
                    .get<double>();
  return m;
}

// ------------------------------------------------------------------ spaces

inline Json space_to_json(const SpacePtr& sp) {
  return Json{{"dim", sp->dim},
              {"unit", sp->unit_index},
              {"labels", sp->labels}};
}

inline SpacePtr space_from_json(const Json& j) {
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  return make_space(j.at("dim").get<int>(), j.value("unit", 0),
                    std::move(labels));
}

inline Json x_to_json(const XPtr& x) {
  if (x->kind == XKind::Atoms)
    return Json{{"kind", "atoms"}, {"points", x->points}};
  return Json{{"kind", "interval"},
              {"a", x->a},
              {"b", x->b},
              {"nodes", vec_r_to_json(x->nodes)},
              {"weights", vec_r_to_json(x->weights)}};
}

inline XPtr x_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "atoms")
    return make_atomic_space(j.at("points").get<std::vector<double>>());
  if (kind != "interval")
    throw std::invalid_argument("json: unknown compact space kind");
  auto sp = std::make_shared<CompactSpace>();
  sp->kind = XKind::Interval;
  sp->a = j.at("a").get<double>();
  sp->b = j.at("b").get<double>();
  sp->nodes = vec_r_from_json(j.at("nodes"));
  sp->weights = vec_r_from_json(j.at("weights"));
  if (sp->nodes.size() != sp->weights.size())
    throw std::invalid_argument("json: interval nodes/weights mismatch");
  return sp;
}

inline Json measure_to_json(const MeasureOnX& mu) {
  return Json{{"x", x_to_json(mu.space)}, {"w", vec_r_to_json(mu.w)}};
}

inline MeasureOnX measure_from_json(const Json& j) {
  return make_measure(x_from_json(j.at("x")), vec_r_from_json(j.at("w")));
}

// ----------------------------------------------------------------- vectors

inline Json hvector_to_json(const HVector<>& v) {
  return Json{{"space", space_to_json(v.space)},
              {"coords", vec_c_to_json(v.coords)}};
}

inline HVector<> hvector_from_json(const Json& j) {
  auto sp = space_from_json(j.at("space"));
  auto coords = vec_c_from_json(j.at("coords"));
  if (coords.size() != sp->dim)
    throw std::invalid_argument("json: coords length != dim");
  return HVector<>{std::move(sp), std::move(coords)};
}

// row-major entries: item i*n + j holds the coordinates of entry (i, j)
inline Json hmatrix_to_json(const HMatrix<>& z) {
  Json entries = Json::array();
  for (int r = 0; r < z.data.rows(); ++r)
    entries.push_back(vec_c_to_json(VecC<>(z.data.row(r).transpose())));
  return Json{{"space", space_to_json(z.space)},
              {"n", z.n},
              {"entries", std::move(entries)}};
}

inline HMatrix<> hmatrix_from_json(const Json& j) {
  auto sp = space_from_json(j.at("space"));
  const int n = j.at("n").get<int>();
  const auto& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != n * n)
    throw std::invalid_argument("json: need n*n entries");
  auto z = zero_hmatrix<double>(sp, n);
  for (int r = 0; r < n * n; ++r) {
    VecC<> row = vec_c_from_json(entries[static_cast<std::size_t>(r)]);
    if (row.size() != sp->dim)
      throw std::invalid_argument("json: entry length != dim");
    z.data.row(r) = row.transpose();
  }
  return z;
}

inline Json l2_to_json(const L2Element<>& eta) {
  return Json{{"x", x_to_json(eta.space)},
              {"w", vec_r_to_json(eta.mu.w)},
              {"values", vec_c_to_json(eta.values)}};
}

inline L2Element<> l2_from_json(const Json& j) {
  auto x = x_from_json(j.at("x"));
  auto mu = make_measure(x, vec_r_from_json(j.at("w")));
  auto values = vec_c_from_json(j.at("values"));
  if (static_cast<int>(values.size()) != x->size())
    throw std::invalid_argument("json: values length != point count");
  return L2Element<>{std::move(x), std::move(mu), std::move(values)};
}

// ---------------------------------------------------------------- supports

inline Json support_to_json(const SupportOnX<>& s) {
  Json k = Json::object();
  for (int f = 0; f < s.target->dim; ++f)
    k[s.target->labels[static_cast<std::size_t>(f)]] =
        vec_r_to_json(VecR<>(s.k.row(f).transpose()));
  return Json{{"target", space_to_json(s.target)},
              {"mu", measure_to_json(s.mu)},
              {"k", std::move(k)}};
}

inline SupportOnX<> support_from_json(const Json& j, double tol = kDefaultTol,
                                      int samples = 200,
                                      std::uint64_t seed = 0) {
  auto target = space_from_json(j.at("target"));
  auto mu = measure_from_json(j.at("mu"));
  const auto& k = j.at("k");
  MatR<> rows(target->dim, mu.space->size());
  for (int f = 0; f < target->dim; ++f) {
    const auto& label = target->labels[static_cast<std::size_t>(f)];
    if (!k.contains(label))
      throw std::invalid_argument("json: support row missing for " + label);
    VecR<> row = vec_r_from_json(k.at(label));
    if (row.size() != rows.cols())
      throw std::invalid_argument("json: support row length mismatch");
    rows.row(f) = row.transpose();
  }
  return make_support_on_x(target, mu, rows, tol, samples, seed);
}

inline Json atom_map_to_json(const AtomMap<>& m) {
  return Json{{"target", space_to_json(m.target)},
              {"x", x_to_json(m.x)},
              {"cols", mat_r_to_json(m.cols)}};
}

inline AtomMap<> atom_map_from_json(const Json& j) {
  auto target = space_from_json(j.at("target"));
  auto x = x_from_json(j.at("x"));
  MatR<> cols = mat_r_from_json(j.at("cols"));
  if (cols.rows() != target->dim || cols.cols() != x->size())
    throw std::invalid_argument("json: cols must be dim x npoints");
  return AtomMap<>{std::move(target), std::move(x), std::move(cols)};
}

inline Json decomposition_to_json(const SeparableDecomposition<>& d) {
  Json terms = Json::array();
  for (const auto& t : d.terms)
    terms.push_back(Json{{"p", hvector_to_json(t.p)},
                         {"point", t.point},
                         {"weight", t.weight}});
  return Json{{"terms", std::move(terms)},
              {"correction", vec_r_to_json(d.correction)},
              {"q0", vec_r_to_json(d.q0)},
              {"reconstruction_error", d.reconstruction_error}};
}

inline SeparableDecomposition<> decomposition_from_json(const Json& j) {
  SeparableDecomposition<> d;
  for (const auto& t : j.at("terms"))
    d.terms.push_back(SepTerm<>{hvector_from_json(t.at("p")),
                                t.at("point").get<int>(),
                                t.at("weight").get<double>()});
  d.correction = vec_r_from_json(j.at("correction"));
  d.q0 = vec_r_from_json(j.at("q0"));
  d.reconstruction_error = j.value("reconstruction_error", 0.0);
  return d;
}

// ----------------------------------------------------- geometry and finite

inline Json unital_measure_to_json(const UnitalMeasure<>& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms)
    atoms.push_back(Json{{"s0", vec_r_to_json(a.s.s0)}, {"c", a.c}});
  return Json{{"space", space_to_json(mu.space)}, {"atoms", std::move(atoms)}};
}

inline UnitalMeasure<> unital_measure_from_json(const Json& j,
                                                double tol = kDefaultTol) {
  auto sp = space_from_json(j.at("space"));
  std::vector<WeightedState<>> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back(WeightedState<>{
        StatePoint<>{sp, vec_r_from_json(a.at("s0"))},
        a.at("c").get<double>()});
  return make_unital_measure(sp, std::move(atoms), tol);
}

inline Json mass_assignment_to_json(const MassAssignment<>& a) {
  Json points = Json::array();
  for (const auto& p : a.points)
    points.push_back(Json{{"s0", vec_r_to_json(p.s.s0)}, {"c", p.c}});
  return Json{{"space", space_to_json(a.space)},
              {"points", std::move(points)}};
}

inline MassAssignment<> mass_assignment_from_json(const Json& j) {
  auto sp = space_from_json(j.at("space"));
  std::vector<WeightedState<>> points;
  for (const auto& p : j.at("points"))
    points.push_back(WeightedState<>{
        StatePoint<>{sp, vec_r_from_json(p.at("s0"))},
        p.at("c").get<double>()});
  return MassAssignment<>{std::move(sp), std::move(points)};
}

inline Json certificate_to_json(const MaxCertificate<>& cert) {
  Json terms = Json::array();
  for (const auto& t : cert.terms)
    terms.push_back(
        Json{{"a", mat_c_to_json(t.a)}, {"s", hvector_to_json(t.s)}});
  return Json{{"terms", std::move(terms)},
              {"residual", cert.residual_bound}};
}

inline MaxCertificate<> certificate_from_json(const Json& j) {
  MaxCertificate<> cert;
  for (const auto& t : j.at("terms"))
    cert.terms.push_back(
        CertTerm<>{mat_c_from_json(t.at("a")), hvector_from_json(t.at("s"))});
  cert.residual_bound = j.value("residual", 0.0);
  return cert;
}

inline Json eb_map_to_json(const EbMap<>& f) {
  Json phi = Json::array();
  for (const auto& b : f.phi) phi.push_back(mat_c_to_json(b));
  return Json{{"domain", space_to_json(f.domain)},
              {"m", f.m},
              {"phi", std::move(phi)}};
}

inline EbMap<> eb_map_from_json(const Json& j) {
  auto sp = space_from_json(j.at("domain"));
  std::vector<MatC<>> blocks;
  for (const auto& b : j.at("phi")) blocks.push_back(mat_c_from_json(b));
  return make_eb_map<double>(sp, std::move(blocks));
}

inline Json hs_to_json(const HSElement<>& x) {
  return Json{{"n", x.n}, {"m", mat_c_to_json(x.m)}};
}

inline HSElement<> hs_from_json(const Json& j) {
  HSElement<> x{j.at("n").get<int>(), mat_c_from_json(j.at("m"))};
  if (x.m.rows() != x.n || x.m.cols() != x.n)
    throw std::invalid_argument("json: matrix size != n");
  return x;
}

// ------------------------------------------------------------- run reports

inline Json verdict_to_json(const MembershipVerdict<>& v) {
  Json out{{"kind", verdict_name(v.kind)}, {"margin", v.margin}};
  if (!v.note.empty()) out["note"] = v.note;
  if (v.certificate)
    out["certificate"] = certificate_to_json(*v.certificate);
  if (v.witness_beta) out["witness_beta"] = vec_c_to_json(*v.witness_beta);
  return out;
}

struct RunReport {
  std::string command;
  std::string inputs_digest;
  std::vector<std::pair<std::string, std::string>> verdicts;
  std::vector<std::pair<std::string, double>> margins;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::uint64_t seed = 0;
};

inline Json run_report_to_json(const RunReport& r) {
  Json verdicts = Json::object(), margins = Json::object(),
       timings = Json::object();
  for (const auto& [k, v] : r.verdicts) verdicts[k] = v;
  for (const auto& [k, v] : r.margins) margins[k] = v;
  for (const auto& [k, v] : r.timings_ms) timings[k] = v;
  return Json{{"command", r.command},  {"inputs", r.inputs_digest},
              {"verdicts", verdicts},  {"margins", margins},
              {"timings_ms", timings}, {"seed", r.seed}};
}

// FNV-1a digest of the canonical input text, printed as 16 hex digits
inline std::string digest_text(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace opcone
