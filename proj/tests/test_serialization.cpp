#include <catch2/catch_amalgamated.hpp>

#include "entrostab/fixtures.hpp"
#include "entrostab/serialization.hpp"

using namespace entrostab;
using Catch::Approx;

namespace {
const char* kGibbsSpec =
    R"({"blocks":[2,2],"marginal":{"type":"singleton","q":[0.5,0.5]},)"
    R"("conditionals":[{"type":"full"},{"type":"full"}]})";
}

TEST_CASE("parsing a well-formed spec", "[serialization]") {
  const BlockConvexSet c = spec_from_json(Json::parse(kGibbsSpec));
  REQUIRE(c.block_count() == 2);
  REQUIRE(c.decomposition().block_dim(0) == 2);
  REQUIRE(c.marginal().is_singleton());
  REQUIRE(c.marginal().vertices()[0][0] == Approx(0.5));
  REQUIRE(c.conditional_set(0).kind() == ConditionalSet::Kind::Full);
}

TEST_CASE("validation errors name the offending field", "[serialization]") {
  // vertex sums to 1.2
  const Json bad_vertex = Json::parse(
      R"({"blocks":[1,1],"marginal":{"type":"vertices","vertices":[[0.6,0.6]]},)"
      R"("conditionals":[{"type":"full"},{"type":"full"}]})");
  try {
    spec_from_json(bad_vertex);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("marginal.vertices[0]") != std::string::npos);
    REQUIRE(msg.find("sum") != std::string::npos);
  }

  // non-Hermitian hull generator
  const Json bad_hull = Json::parse(
      R"({"blocks":[2],"marginal":{"type":"singleton","q":[1.0]},)"
      R"("conditionals":[{"type":"hull","matrices":[)"
      R"([[[0.5,0.0],[1.0,0.0]],[[0.0,0.0],[0.5,0.0]]]]}]})");
  try {
    spec_from_json(bad_hull);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(std::string(e.what()).find("conditionals[0].matrices[0]") !=
            std::string::npos);
  }

  // non-PSD fixed conditional
  const Json bad_fixed = Json::parse(
      R"({"blocks":[2],"marginal":{"type":"singleton","q":[1.0]},)"
      R"("conditionals":[{"type":"fixed","matrix":)"
      R"([[[1.5,0.0],[0.0,0.0]],[[0.0,0.0],[-0.5,0.0]]]}]})");
  REQUIRE_THROWS_AS(spec_from_json(bad_fixed), ValidationError);

  // conditional count mismatch
  const Json short_conds = Json::parse(
      R"({"blocks":[1,1],"marginal":{"type":"simplex"},)"
      R"("conditionals":[{"type":"full"}]})");
  REQUIRE_THROWS_AS(spec_from_json(short_conds), ValidationError);
}

TEST_CASE("parse errors for malformed structure", "[serialization]") {
  REQUIRE_THROWS_AS(spec_from_json(Json::parse(R"({"blocks":[1,1]})")),
                    ParseError);
  REQUIRE_THROWS_AS(
      spec_from_json(Json::parse(
          R"({"blocks":"two","marginal":{"type":"simplex"},"conditionals":[]})")),
      ParseError);
  REQUIRE_THROWS_AS(
      spec_from_json(Json::parse(
          R"({"blocks":[1,1],"marginal":{"type":"octagon"},)"
          R"("conditionals":[{"type":"full"},{"type":"full"}]})")),
      ParseError);
  // matrix cell is not a [re, im] pair
  REQUIRE_THROWS_AS(
      matrix_from_json(Json::parse(R"([[1.0,0.0],[0.0,1.0]])"), "matrix"),
      ParseError);
}

TEST_CASE("spec round trip is the identity", "[serialization]") {
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(3, 2), fixtures::mixed_hull()};
  for (const auto& original : sets) {
    const BlockConvexSet back = spec_from_json(spec_to_json(original));
    REQUIRE(back.decomposition() == original.decomposition());
    const auto& va = extreme_marginals(back.marginal());
    const auto& vb = extreme_marginals(original.marginal());
    REQUIRE(va.size() == vb.size());
    for (size_t k = 0; k < va.size(); ++k)
      REQUIRE(va[k].weights() == vb[k].weights());  // bitwise through JSON
    for (int i = 0; i < original.block_count(); ++i) {
      REQUIRE(back.conditional_set(i).kind() ==
              original.conditional_set(i).kind());
      if (back.conditional_set(i).kind() == ConditionalSet::Kind::Hull) {
        const auto& ga = back.conditional_set(i).generators();
        const auto& gb = original.conditional_set(i).generators();
        REQUIRE(ga.size() == gb.size());
        for (size_t g = 0; g < ga.size(); ++g)
          REQUIRE(ga[g].matrix() == gb[g].matrix());
      }
    }
  }
}

TEST_CASE("shipped fixture files match the in-code builders",
          "[serialization]") {
  const std::string dir = ENTROSTAB_FIXTURE_DIR;
  struct Case {
    const char* file;
    BlockConvexSet set;
  };
  const std::vector<Case> cases = {
      {"classical_simplex2.json", fixtures::classical_simplex2()},
      {"classical_segment.json", fixtures::classical_segment()},
      {"gibbs_uniform_r2.json", fixtures::gibbs_uniform(2, 2)},
      {"gibbs_uniform_r3.json", fixtures::gibbs_uniform(3, 2)},
      {"mixed_hull.json", fixtures::mixed_hull()}};
  for (const auto& c : cases) {
    const BlockConvexSet parsed = parse_spec(dir + "/" + c.file);
    REQUIRE(parsed.decomposition() == c.set.decomposition());
    const auto& va = extreme_marginals(parsed.marginal());
    const auto& vb = extreme_marginals(c.set.marginal());
    REQUIRE(va.size() == vb.size());
    for (size_t k = 0; k < va.size(); ++k)
      REQUIRE(va[k].weights() == vb[k].weights());
    for (int i = 0; i < c.set.block_count(); ++i)
      REQUIRE(parsed.conditional_set(i).kind() ==
              c.set.conditional_set(i).kind());
  }
}

TEST_CASE("observable files parse and validate", "[serialization]") {
  const std::string dir = ENTROSTAB_FIXTURE_DIR;
  const HermitianMatrix h =
      observable_from_json(parse_json_file(dir + "/observable_clustered.json"));
  REQUIRE(h.dim() == 4);
  REQUIRE(h.entries()(0, 1).real() == Approx(0.75));

  REQUIRE_THROWS_AS(
      observable_from_json(Json::parse(
          R"({"matrix":[[[0.0,0.0],[1.0,0.0]],[[0.0,0.0],[0.0,0.0]]]})")),
      ValidationError);
  REQUIRE_THROWS_AS(observable_from_json(Json::parse(R"({"dim":2})")),
                    ParseError);
}

TEST_CASE("report payload serialization", "[serialization]") {
  StabilityReport r;
  r.s_min = 0.5;
  r.c1_estimate = std::nullopt;
  r.assembled_c = 0.25;
  r.samples = 100;
  r.violations = 0;
  r.seed = 7;
  const Json j = to_json(r);
  REQUIRE(j["c1_estimate"] == "not-applicable");
  REQUIRE(j["min_ratio"].is_null());

  SharpnessReport sr;
  sr.epsilons = {1e-2, 1e-3};
  sr.gaps = {1e-2, 1e-3};
  sr.distances = {2e-2, 2e-3};
  sr.fitted_exponent = 1.0;
  sr.directional_derivative = infinity;
  sr.derivative_divergent = true;
  const Json sj = to_json(sr);
  REQUIRE(sj["directional_derivative"].is_null());
  REQUIRE(sj["derivative_divergent"] == true);
}

TEST_CASE("digest is deterministic and input-sensitive", "[serialization]") {
  const std::string a = fnv1a_digest("entropy");
  REQUIRE(a.size() == 16);
  REQUIRE(a == fnv1a_digest("entropy"));
  REQUIRE(a != fnv1a_digest("entropy "));
}
