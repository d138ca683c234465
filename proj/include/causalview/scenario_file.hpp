#pragma once

// JSON scenario documents.
//
//   {
//     "kind": "causal" | "spacelike" | "tripartite_causal" | "tripartite_spacelike",
//     "dims": {"a": 2, "b": 2}            // plus "c" for tripartite kinds
//     "rho":   [[[re, im], ...], ...]     // causal kinds (on A, or on C)
//     "kraus": [matrix, ...]              // causal kinds
//     "tau":   matrix                     // spacelike kinds, A (x) B [(x) C]
//     "povm_a": {"labels": [...], "effects": [matrix, ...]},
//     "povm_b": {...}, "povm_c": {...}    // povm_c for tripartite kinds
//   }
//
// For spacelike kinds povm_a / povm_c hold the spacelike-view effects (a'_i,
// c'_k). Errors name the offending JSON field.

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "causalview/multiparty.hpp"

namespace causalview {

using json = nlohmann::json;

using ScenarioDocument =
    std::variant<CausalScenario, SpacelikeScenario, TripartiteCausalScenario, TripartiteSpacelikeScenario>;

/// Malformed or invalid scenario file. `where()` is a JSON pointer (or
/// "line:column" for syntax errors).
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ValidationOptions {
  double tol = kDefaultTol;
  double full_rank_threshold = kFullRankThreshold;
};

inline const char* kind_name(const ScenarioDocument& doc) {
  static constexpr const char* names[] = {"causal", "spacelike", "tripartite_causal", "tripartite_spacelike"};
  return names[doc.index()];
}

namespace detail {

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + "/" + key, "missing field");
  return *it;
}

inline ComplexMatrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw FormatError(where, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto& first = j.front();
  if (!first.is_array() || first.empty()) throw FormatError(where + "/0", "expected a non-empty row array");
  const auto cols = static_cast<Eigen::Index>(first.size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_at = where + "/" + std::to_string(r);
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw FormatError(row_at, "expected a row of " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw FormatError(row_at + "/" + std::to_string(c), "expected a [re, im] pair of numbers");
      }
      const cplx z(e[0].get<double>(), e[1].get<double>());
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw FormatError(row_at + "/" + std::to_string(c), "entry is not finite");
      }
      m(r, c) = z;
    }
  }
  return m;
}

inline void require_dims(const ComplexMatrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (m.rows() != rows || m.cols() != cols) {
    throw FormatError(where, "matrix is " + dims_of(m) + ", expected " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
  }
}

inline Eigen::Index parse_dim(const json& dims, const char* key) {
  const std::string where = std::string("/dims/") + key;
  const json& d = field(dims, key, "/dims");
  if (!d.is_number_integer() || d.get<long long>() < 1) throw FormatError(where, "expected a positive integer");
  return static_cast<Eigen::Index>(d.get<long long>());
}

/// Runs a constructor, tagging domain/shape failures with the JSON location.
template <typename F>
auto validated(const std::string& where, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ShapeError& e) {
    throw FormatError(where, e.what());
  } catch (const DomainError& e) {
    throw FormatError(where, e.what());
  }
}

inline Povm parse_povm(const json& doc, const char* key, Eigen::Index dim, const ValidationOptions& opt) {
  const std::string where = std::string("/") + key;
  const json& block = field(doc, key, "");
  const json& effects_json = field(block, "effects", where);
  if (!effects_json.is_array() || effects_json.empty()) throw FormatError(where + "/effects", "expected a non-empty array");
  std::vector<ComplexMatrix> effects;
  for (std::size_t k = 0; k < effects_json.size(); ++k) {
    const std::string at = where + "/effects/" + std::to_string(k);
    effects.push_back(parse_matrix(effects_json[k], at));
    require_dims(effects.back(), dim, dim, at);
  }
  std::vector<std::string> labels;
  if (auto it = block.find("labels"); it != block.end()) {
    if (!it->is_array() || it->size() != effects.size()) {
      throw FormatError(where + "/labels", "expected " + std::to_string(effects.size()) + " labels");
    }
    for (std::size_t k = 0; k < it->size(); ++k) {
      if (!(*it)[k].is_string()) throw FormatError(where + "/labels/" + std::to_string(k), "expected a string");
      labels.push_back((*it)[k].get<std::string>());
    }
  } else {
    for (std::size_t k = 0; k < effects.size(); ++k) labels.push_back(std::to_string(k));
  }
  return validated(where, [&] { return Povm(std::move(labels), std::move(effects), opt.tol); });
}

inline DensityMatrix parse_state(const json& doc, const char* key, Eigen::Index dim, const ValidationOptions& opt) {
  const std::string where = std::string("/") + key;
  ComplexMatrix m = parse_matrix(field(doc, key, ""), where);
  require_dims(m, dim, dim, where);
  return validated(where, [&] { return DensityMatrix(m, opt.tol); });
}

inline KrausChannel parse_kraus(const json& doc, Eigen::Index d_in, Eigen::Index d_out, const ValidationOptions& opt) {
  const json& ops_json = field(doc, "kraus", "");
  if (!ops_json.is_array() || ops_json.empty()) throw FormatError("/kraus", "expected a non-empty array of matrices");
  std::vector<ComplexMatrix> ops;
  for (std::size_t m = 0; m < ops_json.size(); ++m) {
    const std::string at = "/kraus/" + std::to_string(m);
    ops.push_back(parse_matrix(ops_json[m], at));
    require_dims(ops.back(), d_out, d_in, at);
  }
  return validated("/kraus", [&] { return KrausChannel(d_in, d_out, std::move(ops), opt.tol); });
}

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json povm_to_json(const Povm& p) {
  json effects = json::array();
  for (const auto& e : p.effects()) effects.push_back(matrix_to_json(e));
  return {{"labels", p.labels()}, {"effects", std::move(effects)}};
}

inline json kraus_to_json(const KrausChannel& ch) {
  json ops = json::array();
  for (const auto& k : ch.kraus_ops()) ops.push_back(matrix_to_json(k));
  return ops;
}

}  // namespace detail

inline ScenarioDocument parse_scenario(const json& doc, const ValidationOptions& opt = {}) {
  using namespace detail;
  const json& kind_json = field(doc, "kind", "");
  if (!kind_json.is_string()) throw FormatError("/kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();
  const json& dims = field(doc, "dims", "");
  const bool tripartite = kind == "tripartite_causal" || kind == "tripartite_spacelike";
  const Eigen::Index da = parse_dim(dims, "a");
  const Eigen::Index db = parse_dim(dims, "b");
  const Eigen::Index dc = tripartite ? parse_dim(dims, "c") : 0;

  if (kind == "causal") {
    DensityMatrix rho = parse_state(doc, "rho", da, opt);
    KrausChannel ch = parse_kraus(doc, da, db, opt);
    Povm pa = parse_povm(doc, "povm_a", da, opt);
    Povm pb = parse_povm(doc, "povm_b", db, opt);
    return validated("/rho", [&] {
      return CausalScenario(std::move(rho), std::move(ch), std::move(pa), std::move(pb), opt.full_rank_threshold);
    });
  }
  if (kind == "spacelike") {
    DensityMatrix tau = parse_state(doc, "tau", da * db, opt);
    Povm pa = parse_povm(doc, "povm_a", da, opt);
    Povm pb = parse_povm(doc, "povm_b", db, opt);
    return SpacelikeScenario(std::move(tau), BipartiteShape(da, db), std::move(pa), std::move(pb));
  }
  if (kind == "tripartite_causal") {
    DensityMatrix rho = parse_state(doc, "rho", dc, opt);
    KrausChannel ch = parse_kraus(doc, dc, da * db, opt);
    Povm pa = parse_povm(doc, "povm_a", da, opt);
    Povm pb = parse_povm(doc, "povm_b", db, opt);
    Povm pc = parse_povm(doc, "povm_c", dc, opt);
    return validated("/rho", [&] {
      return TripartiteCausalScenario(std::move(rho), std::move(ch), std::move(pa), std::move(pb), std::move(pc),
                                      opt.full_rank_threshold);
    });
  }
  if (kind == "tripartite_spacelike") {
    DensityMatrix tau = parse_state(doc, "tau", da * db * dc, opt);
    Povm pa = parse_povm(doc, "povm_a", da, opt);
    Povm pb = parse_povm(doc, "povm_b", db, opt);
    Povm pc = parse_povm(doc, "povm_c", dc, opt);
    return TripartiteSpacelikeScenario(std::move(tau), std::move(pa), std::move(pb), std::move(pc));
  }
  throw FormatError("/kind", "unknown kind '" + kind +
                                 "' (expected causal, spacelike, tripartite_causal or tripartite_spacelike)");
}

inline ScenarioDocument parse_scenario_text(const std::string& text, const ValidationOptions& opt = {}) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("syntax", e.what());
  }
  return parse_scenario(doc, opt);
}

inline ScenarioDocument read_scenario_file(const std::string& path, const ValidationOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str(), opt);
  } catch (const FormatError& e) {
    throw FormatError(path + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

inline json to_json(const ScenarioDocument& doc) {
  using namespace detail;
  json out;
  out["kind"] = kind_name(doc);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CausalScenario>) {
          out["dims"] = {{"a", s.shape().dim_a()}, {"b", s.shape().dim_b()}};
          out["rho"] = matrix_to_json(s.rho().mat());
          out["kraus"] = kraus_to_json(s.channel());
          out["povm_a"] = povm_to_json(s.povm_a());
          out["povm_b"] = povm_to_json(s.povm_b());
        } else if constexpr (std::is_same_v<T, SpacelikeScenario>) {
          out["dims"] = {{"a", s.shape().dim_a()}, {"b", s.shape().dim_b()}};
          out["tau"] = matrix_to_json(s.tau().mat());
          out["povm_a"] = povm_to_json(s.povm_a_prime());
          out["povm_b"] = povm_to_json(s.povm_b_prime());
        } else if constexpr (std::is_same_v<T, TripartiteCausalScenario>) {
          const TripartiteDims d = s.dims();
          out["dims"] = {{"a", d.a}, {"b", d.b}, {"c", d.c}};
          out["rho"] = matrix_to_json(s.rho_c().mat());
          out["kraus"] = kraus_to_json(s.channel());
          out["povm_a"] = povm_to_json(s.povm_a());
          out["povm_b"] = povm_to_json(s.povm_b());
          out["povm_c"] = povm_to_json(s.povm_c());
        } else {
          const TripartiteDims d = s.dims();
          out["dims"] = {{"a", d.a}, {"b", d.b}, {"c", d.c}};
          out["tau"] = matrix_to_json(s.tau_abc().mat());
          out["povm_a"] = povm_to_json(s.povm_a());
          out["povm_b"] = povm_to_json(s.povm_b());
          out["povm_c"] = povm_to_json(s.povm_c_prime());
        }
      },
      doc);
  return out;
}

/// Doubles are written in shortest round-trip form (at most 17 significant
/// digits), so reading back reproduces them exactly.
inline void write_scenario_file(const std::string& path, const ScenarioDocument& doc) {
  std::ofstream out(path);
  if (!out) throw FormatError(path, "cannot open file for writing");
  out << to_json(doc).dump(1) << '\n';
  if (!out) throw FormatError(path, "write failed");
}

}  // namespace causalview
