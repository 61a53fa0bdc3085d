#include "liectrl/spec_io.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace liectrl::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& msg) {
  fail(ErrorCode::ParseError, path + ": " + msg);
}

const json& require(const json& doc, const char* key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key))
    parse_fail(path, std::string("missing key '") + key + "'");
  return doc.at(key);
}

Vec parse_vec(const json& doc, const std::string& path, int expected = -1) {
  if (!doc.is_array()) parse_fail(path, "expected an array of numbers");
  Vec v(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) parse_fail(path + "[" + std::to_string(i) + "]", "expected a number");
    v(static_cast<int>(i)) = doc[i].get<double>();
  }
  if (expected >= 0 && v.size() != expected)
    parse_fail(path, "expected length " + std::to_string(expected));
  return v;
}

Mat parse_mat(const json& doc, const std::string& path, int rows, int cols) {
  if (!doc.is_array() || static_cast<int>(doc.size()) != rows)
    parse_fail(path, "expected " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    m.row(i) = parse_vec(doc[i], path + "[" + std::to_string(i) + "]", cols).transpose();
  return m;
}

Mat parse_flat_mat(const json& doc, const std::string& path, int n) {
  Vec flat = parse_vec(doc, path, n * n);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = flat(i * n + j);  // row-major
  return m;
}

json flat_mat_to_json(const Mat& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

MatrixCheck parse_check(const json& doc, const std::string& path) {
  std::string s = doc.is_string() ? doc.get<std::string>() : "";
  if (s == "unit_determinant") return MatrixCheck::UnitDeterminant;
  if (s == "orthogonal") return MatrixCheck::Orthogonal;
  parse_fail(path, "unknown check '" + s + "' (unit_determinant | orthogonal)");
}

}  // namespace

Bundle load_system(const json& doc) {
  const json& alg = require(doc, "algebra", "$");
  if (!require(alg, "dim", "$.algebra").is_number_integer())
    parse_fail("$.algebra.dim", "expected an integer");
  int dim = alg.at("dim").get<int>();
  if (dim <= 0) parse_fail("$.algebra.dim", "dim must be positive");

  std::vector<std::string> names;
  if (alg.contains("basis_names")) {
    for (const auto& n : alg.at("basis_names")) names.push_back(n.get<std::string>());
    if (static_cast<int>(names.size()) != dim)
      parse_fail("$.algebra.basis_names", "length must equal dim");
  }

  std::vector<LieAlgebra::StructureEntry> entries;
  std::set<std::tuple<int, int, int>> seen;
  const json& structure = require(alg, "structure", "$.algebra");
  for (std::size_t idx = 0; idx < structure.size(); ++idx) {
    const json& entry = structure[idx];
    std::string path = "$.algebra.structure[" + std::to_string(idx) + "]";
    if (!entry.is_array() || entry.size() != 4)
      parse_fail(path, "expected [i, j, k, value]");
    int i = entry[0].get<int>(), j = entry[1].get<int>(), k = entry[2].get<int>();
    double value = entry[3].get<double>();
    if (i < 0 || j < 0 || k < 0 || i >= dim || j >= dim || k >= dim)
      parse_fail(path, "index out of range");
    if (i >= j)
      parse_fail(path, "entries must be in canonical antisymmetric form i < j");
    if (!seen.insert({i, j, k}).second) parse_fail(path, "duplicate (i, j, k) entry");
    entries.push_back({i, j, k, value});
  }
  LieAlgebra algebra(dim, names, entries);

  const json& deriv = require(doc, "derivation", "$");
  std::string kind = require(deriv, "kind", "$.derivation").get<std::string>();
  Derivation derivation;
  if (kind == "matrix") {
    derivation.matrix = parse_mat(require(deriv, "matrix", "$.derivation"),
                                  "$.derivation.matrix", dim, dim);
  } else if (kind == "inner") {
    Vec element = parse_vec(require(deriv, "inner_element", "$.derivation"),
                            "$.derivation.inner_element", dim);
    derivation = ad(algebra, element);
  } else {
    parse_fail("$.derivation.kind", "expected 'matrix' or 'inner'");
  }

  std::vector<Vec> fields;
  const json& cf = require(doc, "control_fields", "$");
  if (!cf.is_array() || cf.empty())
    parse_fail("$.control_fields", "expected a nonempty array");
  for (std::size_t i = 0; i < cf.size(); ++i)
    fields.push_back(parse_vec(cf[i], "$.control_fields[" + std::to_string(i) + "]", dim));

  ControlRange range = ControlRange::unrestricted();
  const json& rj = require(doc, "range", "$");
  if (rj.is_string()) {
    if (rj.get<std::string>() != "unrestricted")
      parse_fail("$.range", "expected 'unrestricted' or {\"restricted\": ...}");
  } else {
    const json& bounds = require(rj, "restricted", "$.range");
    if (bounds.size() != cf.size())
      parse_fail("$.range.restricted", "one [lo, hi] pair per channel required");
    std::vector<std::pair<double, double>> b;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      Vec pair = parse_vec(bounds[i], "$.range.restricted[" + std::to_string(i) + "]", 2);
      if (!(pair(0) < 0.0 && 0.0 < pair(1)))
        parse_fail("$.range.restricted[" + std::to_string(i) + "]",
                   "bounds must satisfy lo < 0 < hi");
      b.emplace_back(pair(0), pair(1));
    }
    range = ControlRange::restricted_box(std::move(b));
  }

  GroupMeta meta;
  std::vector<FactorSpec> specs;
  if (doc.contains("group")) {
    const json& group = doc.at("group");
    if (group.contains("connected")) meta.connected = group.at("connected").get<bool>();
    if (group.contains("simply_connected"))
      meta.simply_connected_hint = group.at("simply_connected").get<bool>();
    if (group.contains("declarations")) {
      for (const auto& d : group.at("declarations"))
        meta.declarations.push_back(
            {require(d, "factor", "$.group.declarations").get<std::string>(),
             require(d, "finite_center", "$.group.declarations").get<bool>()});
    }
    const json& factors = require(group, "factors", "$.group");
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const json& fj = factors[i];
      std::string path = "$.group.factors[" + std::to_string(i) + "]";
      FactorSpec f;
      std::string type = require(fj, "type", path).get<std::string>();
      f.size = require(fj, "size", path).get<int>();
      if (type == "translation") {
        f.type = FactorSpec::Type::Translation;
      } else if (type == "matrix") {
        f.type = FactorSpec::Type::Matrix;
        const json& emb = require(fj, "embedding", path);
        for (std::size_t k = 0; k < emb.size(); ++k)
          f.embedding.push_back(parse_flat_mat(
              emb[k], path + ".embedding[" + std::to_string(k) + "]", f.size));
        if (fj.contains("checks"))
          for (std::size_t k = 0; k < fj.at("checks").size(); ++k)
            f.checks.push_back(parse_check(fj.at("checks")[k], path + ".checks"));
      } else {
        parse_fail(path + ".type", "expected 'translation' or 'matrix'");
      }
      specs.push_back(std::move(f));
    }
  }

  bool drift_realized = false;
  if (doc.contains("realization_derivation")) {
    if (specs.empty())
      parse_fail("$.realization_derivation", "requires a group section");
    const json& rd = doc.at("realization_derivation");
    if (rd.size() != specs.size())
      parse_fail("$.realization_derivation", "one entry per group factor required");
    for (std::size_t i = 0; i < specs.size(); ++i) {
      std::string path = "$.realization_derivation[" + std::to_string(i) + "]";
      std::string k = require(rd[i], "kind", path).get<std::string>();
      if (k == "linear_map") specs[i].deriv = FactorSpec::DerivKind::LinearMap;
      else if (k == "inner") specs[i].deriv = FactorSpec::DerivKind::Inner;
      else if (k == "trivial") specs[i].deriv = FactorSpec::DerivKind::Trivial;
      else parse_fail(path + ".kind", "expected linear_map | inner | trivial");
      if (rd[i].contains("element"))
        specs[i].inner_element = parse_vec(rd[i].at("element"), path + ".element");
    }
    drift_realized = true;
  }

  ControlSystem sys{std::move(algebra), std::move(derivation), std::move(fields),
                    std::move(range), std::move(meta)};
  return Bundle{std::move(sys), std::move(specs), drift_realized};
}

Bundle load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  return load_system(doc);
}

json save_system(const Bundle& bundle) {
  const ControlSystem& sys = bundle.system;
  json doc;
  json alg;
  alg["dim"] = sys.algebra.dim();
  alg["basis_names"] = sys.algebra.basis_names();
  json structure = json::array();
  for (const auto& e : sys.algebra.canonical_entries())
    structure.push_back(json::array({e.i, e.j, e.k, e.value}));
  alg["structure"] = structure;
  doc["algebra"] = alg;

  json deriv;
  deriv["kind"] = "matrix";
  deriv["matrix"] = to_json(sys.derivation.matrix);
  doc["derivation"] = deriv;

  json cf = json::array();
  for (const auto& b : sys.control_fields) cf.push_back(to_json(b));
  doc["control_fields"] = cf;

  if (sys.range.restricted()) {
    json bounds = json::array();
    for (const auto& [lo, hi] : *sys.range.bounds)
      bounds.push_back(json::array({lo, hi}));
    doc["range"] = json{{"restricted", bounds}};
  } else {
    doc["range"] = "unrestricted";
  }

  if (!bundle.factor_specs.empty()) {
    json group;
    group["connected"] = sys.meta.connected;
    if (sys.meta.simply_connected_hint.has_value())
      group["simply_connected"] = *sys.meta.simply_connected_hint;
    json decls = json::array();
    for (const auto& d : sys.meta.declarations)
      decls.push_back(json{{"factor", d.factor_id}, {"finite_center", d.finite_center}});
    if (!decls.empty()) group["declarations"] = decls;
    json factors = json::array();
    for (const auto& f : bundle.factor_specs) {
      json fj;
      if (f.type == FactorSpec::Type::Translation) {
        fj["type"] = "translation";
        fj["size"] = f.size;
      } else {
        fj["type"] = "matrix";
        fj["size"] = f.size;
        json emb = json::array();
        for (const auto& m : f.embedding) emb.push_back(flat_mat_to_json(m));
        fj["embedding"] = emb;
        json checks = json::array();
        for (MatrixCheck c : f.checks)
          checks.push_back(c == MatrixCheck::Orthogonal ? "orthogonal"
                                                        : "unit_determinant");
        if (!checks.empty()) fj["checks"] = checks;
      }
      factors.push_back(fj);
    }
    group["factors"] = factors;
    doc["group"] = group;

    if (bundle.drift_realized) {
      json rd = json::array();
      for (const auto& f : bundle.factor_specs) {
        json e;
        switch (f.deriv) {
          case FactorSpec::DerivKind::LinearMap: e["kind"] = "linear_map"; break;
          case FactorSpec::DerivKind::Inner: e["kind"] = "inner"; break;
          case FactorSpec::DerivKind::Trivial: e["kind"] = "trivial"; break;
        }
        if (f.inner_element.has_value()) e["element"] = to_json(*f.inner_element);
        rd.push_back(e);
      }
      doc["realization_derivation"] = rd;
    }
  }
  return doc;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << h;
  return os.str();
}

json make_report(const std::string& command, const std::string& input_digest,
                 json parameters, json results, json tolerances) {
  json rep;
  rep["command"] = command;
  rep["input_digest"] = input_digest;
  rep["parameters"] = std::move(parameters);
  rep["results"] = std::move(results);
  rep["tolerances"] = std::move(tolerances);
  rep["version"] = kVersion;
  return rep;
}

json to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Mat& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(to_json(Vec(m.row(i).transpose())));
  return out;
}

json to_json(const Subspace& s) {
  json out = json::array();
  for (int i = 0; i < s.dim(); ++i) out.push_back(to_json(Vec(s.basis.col(i))));
  return out;
}

json to_json(const Spectrum& s) {
  json classes = json::array();
  for (const auto& c : s.classes)
    classes.push_back(json{{"re", c.value.real()},
                           {"im", c.value.imag()},
                           {"multiplicity", c.multiplicity},
                           {"zero_real_part", c.zero_real()}});
  json raw = json::array();
  for (const auto& v : s.raw) raw.push_back(json{{"re", v.real()}, {"im", v.imag()}});
  return json{{"classes", classes}, {"raw", raw}};
}

json to_json(const DDecomposition& dec) {
  json per = json::array();
  for (const auto& [cls, space] : dec.per_eigenvalue)
    per.push_back(json{{"re", cls.value.real()},
                       {"im", cls.value.imag()},
                       {"multiplicity", cls.multiplicity},
                       {"basis", to_json(space)}});
  return json{{"spectrum", to_json(dec.spec)},
              {"g_plus", to_json(dec.g_plus)},
              {"g_minus", to_json(dec.g_minus)},
              {"g_zero", to_json(dec.g_zero)},
              {"g_kernel", to_json(dec.g_kernel)},
              {"dims",
               {{"g_plus", dec.g_plus.dim()},
                {"g_minus", dec.g_minus.dim()},
                {"g_zero", dec.g_zero.dim()},
                {"g_kernel", dec.g_kernel.dim()}}},
              {"per_eigenvalue", per}};
}

json to_json(const Verdict& v) {
  json offending = json::array();
  for (const auto& c : v.offending_eigenvalues)
    offending.push_back(json{{"re", c.value.real()}, {"im", c.value.imag()}});
  json out;
  out["ad_rank"] = {{"holds", v.ad_rank.holds},
                    {"achieved_dimension", v.ad_rank.achieved_dim},
                    {"spanning_set", to_json(Subspace{v.ad_rank.spanning_set})}};
  out["spectrum"] = {{"all_zero_real_part", v.spectrum_all_zero_real},
                     {"classes", to_json(v.decomposition.spec)["classes"]},
                     {"offending", offending},
                     {"criterion", "zero real part"}};
  out["finite_semisimple_center"] = {{"status", to_string(v.fsc.status)},
                                     {"reason", v.fsc.reason}};
  out["conclusion"] = to_string(v.conclusion);
  out["failed_hypotheses"] = v.failed_hypotheses;
  out["missing_certificates"] = v.missing_certificates;
  out["guaranteed_reachable"] = to_json(v.guaranteed_reachable);
  out["guaranteed_co_reachable"] = to_json(v.guaranteed_co_reachable);
  out["notes"] = v.notes;
  return out;
}

json to_json(const G0StructureReport& rep) {
  return json{{"g0_dim", rep.g0_dim},
              {"radical_dim", rep.radical_dim},
              {"levi_dim", rep.levi_dim},
              {"killing_signature",
               {{"negative", rep.killing_negative},
                {"positive", rep.killing_positive},
                {"zero", rep.killing_zero}}},
              {"levi_class", to_string(rep.levi_class)},
              {"d_maps_g0_into_radical", rep.d_maps_g0_into_radical},
              {"d_into_radical_residual", rep.d_into_radical_residual}};
}

json to_json(const AccessibilityResult& res) {
  return json{{"pass", res.pass},
              {"dimension", res.dimension},
              {"margin", res.margin},
              {"certificate", res.certificate},
              {"usable_points", res.usable_points}};
}

GroupElement parse_element(const GroupRealization& r, const json& doc) {
  if (doc.is_string()) {
    if (doc.get<std::string>() == "identity") return identity_element(r);
    fail(ErrorCode::ParseError, "element: expected 'identity', {exp}, or {factors}");
  }
  if (doc.contains("exp"))
    return group_exp(r, parse_vec(doc.at("exp"), "$.exp", r.algebra_dim()));
  if (doc.contains("factors")) {
    const json& fj = doc.at("factors");
    const auto& factors = r.factors();
    if (fj.size() != factors.size())
      fail(ErrorCode::ParseError, "element: one entry per group factor required");
    GroupElement g;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& f = factors[i];
      std::string path = "$.factors[" + std::to_string(i) + "]";
      if (f.type == FactorSpec::Type::Translation)
        g.parts.emplace_back(parse_vec(fj[i], path, f.subdim));
      else
        g.parts.emplace_back(parse_flat_mat(fj[i], path, f.n));
    }
    return g;
  }
  fail(ErrorCode::ParseError, "element: expected 'identity', {exp}, or {factors}");
}

json element_to_json(const GroupRealization& r, const GroupElement& g) {
  json factors = json::array();
  const auto& fs = r.factors();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].type == FactorSpec::Type::Translation)
      factors.push_back(to_json(std::get<Vec>(g.parts[i])));
    else
      factors.push_back(flat_mat_to_json(std::get<Mat>(g.parts[i])));
  }
  return json{{"factors", factors}};
}

namespace {

void csv_header(std::ostream& os, const GroupRealization& r) {
  os << "time";
  const auto& fs = r.factors();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].type == FactorSpec::Type::Translation) {
      for (int k = 0; k < fs[i].subdim; ++k) os << ",f" << i << "_x" << k;
    } else {
      for (int a = 0; a < fs[i].n; ++a)
        for (int b = 0; b < fs[i].n; ++b) os << ",f" << i << "_m" << a << b;
    }
  }
  os << "\n";
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const GroupRealization& r,
                          const Trajectory& traj) {
  csv_header(os, r);
  os.precision(15);
  const auto& fs = r.factors();
  for (const auto& sample : traj.samples) {
    os << sample.t;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (fs[i].type == FactorSpec::Type::Translation) {
        const Vec& x = std::get<Vec>(sample.g.parts[i]);
        for (int k = 0; k < x.size(); ++k) os << "," << x(k);
      } else {
        const Mat& m = std::get<Mat>(sample.g.parts[i]);
        for (int a = 0; a < m.rows(); ++a)
          for (int b = 0; b < m.cols(); ++b) os << "," << m(a, b);
      }
    }
    os << "\n";
  }
}

void write_trajectory_jsonl(std::ostream& os, const GroupRealization& r,
                            const Trajectory& traj) {
  for (const auto& sample : traj.samples) {
    json rec = element_to_json(r, sample.g);
    rec["time"] = sample.t;
    os << rec.dump() << "\n";
  }
}

void write_cloud_jsonl(std::ostream& os, const GroupRealization& r,
                       const EndpointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    json rec = element_to_json(r, cloud.points[i]);
    rec["index"] = i;
    rec["log"] = cloud.log_chart[i].has_value() ? to_json(*cloud.log_chart[i])
                                                : json(nullptr);
    os << rec.dump() << "\n";
  }
}

}  // namespace liectrl::io
