#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entrostab/minimizer.hpp"
#include "entrostab/stability.hpp"

namespace entrostab {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path,
                                    const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

[[noreturn]] inline void validation_fail(const std::string& path,
                                         const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

inline const Json& require_field(const Json& j, const char* key,
                                 const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(path + "." + key, "missing field");
  return *it;
}

inline std::vector<double> number_array(const Json& j,
                                        const std::string& path) {
  if (!j.is_array() || j.empty())
    parse_fail(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number())
      parse_fail(path + "[" + std::to_string(k) + "]", "expected a number");
    out.push_back(j[k].get<double>());
  }
  return out;
}

}  // namespace detail

// Complex matrices serialize as row-major nested arrays of [re, im]
// pairs.
inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    detail::parse_fail(path, "expected a nonempty array of rows");
  const auto n = j.size();
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) {
    const Json& row = j[i];
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != n)
      detail::parse_fail(row_path, "expected a square row-major matrix with " +
                                       std::to_string(n) + " entries per row");
    for (size_t k = 0; k < n; ++k) {
      const Json& cell = row[k];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
          !cell[1].is_number())
        detail::parse_fail(row_path + "[" + std::to_string(k) + "]",
                           "expected a [re, im] pair");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

inline DensityMatrix density_from_json(const Json& j,
                                       const std::string& path) {
  Matrix m = matrix_from_json(j, path);
  try {
    return DensityMatrix(std::move(m));
  } catch (const Error& e) {
    detail::validation_fail(path, e.what());
  }
}

// Constraint-spec file -> validated BlockConvexSet. ParseError for
// malformed structure, ValidationError (naming the field path) for
// semantic failures.
inline BlockConvexSet spec_from_json(const Json& j) {
  const Json& blocks_json = detail::require_field(j, "blocks", "spec");
  if (!blocks_json.is_array() || blocks_json.empty())
    detail::parse_fail("blocks", "expected a nonempty array of integers");
  std::vector<int> dims;
  for (size_t k = 0; k < blocks_json.size(); ++k) {
    if (!blocks_json[k].is_number_integer())
      detail::parse_fail("blocks[" + std::to_string(k) + "]",
                         "expected an integer");
    dims.push_back(blocks_json[k].get<int>());
  }
  std::optional<BlockDecomposition> decomp;
  try {
    decomp.emplace(std::move(dims));
  } catch (const Error& e) {
    detail::validation_fail("blocks", e.what());
  }
  const int r = decomp->block_count();

  const Json& marginal_json = detail::require_field(j, "marginal", "spec");
  const Json& mtype = detail::require_field(marginal_json, "type", "marginal");
  if (!mtype.is_string()) detail::parse_fail("marginal.type", "expected a string");
  std::optional<MarginalPolytope> marginal;
  const std::string mkind = mtype.get<std::string>();
  try {
    if (mkind == "simplex") {
      marginal.emplace(MarginalPolytope::simplex(r));
    } else if (mkind == "singleton") {
      const Json& qj = detail::require_field(marginal_json, "q", "marginal");
      marginal.emplace(MarginalPolytope::singleton(
          ProbabilityVector(detail::number_array(qj, "marginal.q"))));
    } else if (mkind == "vertices") {
      const Json& vj =
          detail::require_field(marginal_json, "vertices", "marginal");
      if (!vj.is_array() || vj.empty())
        detail::parse_fail("marginal.vertices",
                           "expected a nonempty array of vertices");
      std::vector<ProbabilityVector> vertices;
      for (size_t k = 0; k < vj.size(); ++k) {
        const std::string vpath =
            "marginal.vertices[" + std::to_string(k) + "]";
        try {
          vertices.emplace_back(detail::number_array(vj[k], vpath));
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          detail::validation_fail(vpath, e.what());
        }
      }
      marginal.emplace(r, std::move(vertices));
    } else {
      detail::parse_fail("marginal.type",
                         "unknown type '" + mkind +
                             "' (expected simplex|singleton|vertices)");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    detail::validation_fail("marginal", e.what());
  }

  const Json& conds_json = detail::require_field(j, "conditionals", "spec");
  if (!conds_json.is_array())
    detail::parse_fail("conditionals", "expected an array");
  if (static_cast<int>(conds_json.size()) != r)
    detail::validation_fail(
        "conditionals", "expected " + std::to_string(r) + " entries, got " +
                            std::to_string(conds_json.size()));
  std::vector<ConditionalSet> conds;
  for (int i = 0; i < r; ++i) {
    const std::string cpath = "conditionals[" + std::to_string(i) + "]";
    const Json& cj = conds_json[static_cast<size_t>(i)];
    const Json& ctype = detail::require_field(cj, "type", cpath);
    if (!ctype.is_string())
      detail::parse_fail(cpath + ".type", "expected a string");
    const std::string ckind = ctype.get<std::string>();
    if (ckind == "full") {
      conds.push_back(ConditionalSet::full());
    } else if (ckind == "fixed") {
      const Json& mj = detail::require_field(cj, "matrix", cpath);
      conds.push_back(
          ConditionalSet::singleton(density_from_json(mj, cpath + ".matrix")));
    } else if (ckind == "hull") {
      const Json& gj = detail::require_field(cj, "matrices", cpath);
      if (!gj.is_array() || gj.empty())
        detail::parse_fail(cpath + ".matrices",
                           "expected a nonempty array of matrices");
      std::vector<DensityMatrix> gens;
      for (size_t g = 0; g < gj.size(); ++g)
        gens.push_back(density_from_json(
            gj[g], cpath + ".matrices[" + std::to_string(g) + "]"));
      try {
        conds.push_back(ConditionalSet::hull(std::move(gens)));
      } catch (const Error& e) {
        detail::validation_fail(cpath + ".matrices", e.what());
      }
    } else {
      detail::parse_fail(cpath + ".type",
                         "unknown type '" + ckind +
                             "' (expected full|fixed|hull)");
    }
  }

  try {
    return BlockConvexSet(std::move(*decomp), std::move(*marginal),
                          std::move(conds));
  } catch (const Error& e) {
    detail::validation_fail("spec", e.what());
  }
}

inline Json spec_to_json(const BlockConvexSet& c) {
  Json j;
  Json blocks = Json::array();
  for (int d : c.decomposition().block_dims()) blocks.push_back(d);
  j["blocks"] = std::move(blocks);

  Json marginal;
  const auto& vertices = c.marginal().vertices();
  auto vertex_array = [](const ProbabilityVector& p) {
    Json a = Json::array();
    for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
    return a;
  };
  if (vertices.size() == 1) {
    marginal["type"] = "singleton";
    marginal["q"] = vertex_array(vertices[0]);
  } else {
    marginal["type"] = "vertices";
    Json vs = Json::array();
    for (const auto& v : vertices) vs.push_back(vertex_array(v));
    marginal["vertices"] = std::move(vs);
  }
  j["marginal"] = std::move(marginal);

  Json conds = Json::array();
  for (const auto& set : c.conditionals()) {
    Json cj;
    switch (set.kind()) {
      case ConditionalSet::Kind::Full:
        cj["type"] = "full";
        break;
      case ConditionalSet::Kind::Singleton:
        cj["type"] = "fixed";
        cj["matrix"] = matrix_to_json(set.state().matrix());
        break;
      case ConditionalSet::Kind::Hull: {
        cj["type"] = "hull";
        Json gens = Json::array();
        for (const auto& g : set.generators())
          gens.push_back(matrix_to_json(g.matrix()));
        cj["matrices"] = std::move(gens);
        break;
      }
    }
    conds.push_back(std::move(cj));
  }
  j["conditionals"] = std::move(conds);
  return j;
}

// Observable file: {"matrix": <complex matrix>}.
inline HermitianMatrix observable_from_json(const Json& j) {
  const Json& mj = detail::require_field(j, "matrix", "observable");
  Matrix m = matrix_from_json(mj, "matrix");
  try {
    return HermitianMatrix(std::move(m));
  } catch (const Error& e) {
    detail::validation_fail("matrix", e.what());
  }
}

inline Json parse_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": malformed JSON: " + e.what());
  }
}

inline BlockConvexSet parse_spec(const std::string& path) {
  return spec_from_json(parse_json_file(path));
}

// -- report payloads ---------------------------------------------------

namespace detail {
inline Json finite_or_null(double x) {
  if (std::isnan(x) || std::isinf(x)) return nullptr;
  return x;
}

inline Json optional_number(const std::optional<double>& x) {
  if (!x) return nullptr;
  return *x;
}
}  // namespace detail

inline Json to_json(const StabilityReport& r) {
  Json j;
  j["s_min"] = r.s_min;
  j["c1_estimate"] =
      r.c1_estimate ? Json(*r.c1_estimate) : Json("not-applicable");
  j["assembled_C"] = r.assembled_c;
  j["samples"] = r.samples;
  j["min_ratio"] = detail::optional_number(r.min_ratio);
  j["violations"] = r.violations;
  j["empirical_best_C"] = detail::optional_number(r.empirical_best_c);
  j["seed"] = r.seed;
  return j;
}

inline Json to_json(const SharpnessReport& r) {
  Json j;
  j["epsilons"] = r.epsilons;
  j["gaps"] = r.gaps;
  j["distances"] = r.distances;
  j["fitted_exponent"] = detail::finite_or_null(r.fitted_exponent);
  j["directional_derivative"] =
      detail::finite_or_null(r.directional_derivative);
  j["derivative_divergent"] = r.derivative_divergent;
  return j;
}

inline Json to_json(const MinimizerDescription& md) {
  Json j;
  j["s_min"] = md.s_min;
  Json marginals = Json::array();
  for (const auto& q : md.minimizing_marginals) {
    Json a = Json::array();
    for (int i = 0; i < q.size(); ++i) a.push_back(q[i]);
    marginals.push_back(std::move(a));
  }
  j["minimizing_marginals"] = std::move(marginals);
  j["per_block_min_entropy"] = md.per_block_min_entropy;
  Json witnesses = Json::array();
  for (const auto& w : md.per_block_witnesses) {
    Json wj;
    switch (w.kind) {
      case ConditionalSet::Kind::Full:
        wj["kind"] = "full";
        break;
      case ConditionalSet::Kind::Singleton:
        wj["kind"] = "fixed";
        break;
      case ConditionalSet::Kind::Hull:
        wj["kind"] = "hull";
        break;
    }
    if (w.any_pure())
      wj["witness"] = "any pure state";
    else
      wj["witness"] = matrix_to_json(w.state->matrix());
    witnesses.push_back(std::move(wj));
  }
  j["per_block_witnesses"] = std::move(witnesses);
  return j;
}

inline Json to_json(const SpectralBlocks& sb) {
  Json j;
  j["block_dims"] = sb.decomposition.block_dims();
  j["cluster_energies"] = sb.cluster_energies;
  j["basis"] = matrix_to_json(sb.basis);
  return j;
}

// FNV-1a 64-bit digest of a byte string, reported as fixed-width hex.
inline std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace entrostab
