#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "phtune/config.hpp"
#include "phtune/errors.hpp"

using namespace phtune;
using nlohmann::json;

namespace {

json minimal_config() {
  return json{{"model", {{"name", "point_mass"}}},
              {"q_star", {0.0}},
              {"gains", {{"kes", 1.0}, {"kdi", 2.0}}}};
}

/// Parse must fail with InputError whose message mentions `needle`.
void expect_rejected(const json& j, const std::string& needle) {
  try {
    parse_run_config(j);
    FAIL_CHECK("config accepted but should mention '" << needle << "'");
  } catch (const InputError& e) {
    INFO("message: " << e.what());
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("minimal config fills in every default") {
  const RunConfig cfg = parse_run_config(minimal_config());

  CHECK(cfg.model_name == "point_mass");
  CHECK(cfg.model.n == 1);
  CHECK(cfg.q_star(0) == 0.0);
  CHECK(cfg.gains.kes(0, 0) == 1.0);
  CHECK(cfg.gains.kdi(0, 0) == 2.0);
  CHECK(cfg.gains.kint.rows() == 1);
  CHECK(cfg.gains.kint.cols() == 0);
  CHECK(cfg.gains.feedforward == ControllerGains::Feedforward::none);
  CHECK(cfg.generator_kind == "zero");

  CHECK((cfg.region.center - cfg.q_star).norm() == 0.0);
  CHECK(cfg.region.half_widths(0) == 0.5);
  CHECK(cfg.region.samples_per_axis == 7);
  CHECK(cfg.theta == 0.5);

  CHECK_FALSE(cfg.has_x0);
  CHECK((cfg.x0.q - cfg.q_star).norm() == 0.0);
  CHECK(cfg.x0.p.norm() == 0.0);

  CHECK(cfg.sim.t_final == 10.0);
  CHECK(cfg.sim.dt == 1e-3);
  CHECK(cfg.sim.method == SimConfig::Method::rk4);
  CHECK(cfg.sim.disturbance.kind == Disturbance::Kind::none);
  CHECK(cfg.seed == 0);
  CHECK(cfg.outputs.empty());
}

TEST_CASE("a fully specified config round-trips every field") {
  const json j = {
      {"model",
       {{"name", "spring_chain"}, {"count", 2}, {"mass", 1.5},
        {"stiffness", 3.0}, {"damping", 0.25}}},
      {"q_star", {0.1, 0.2}},
      {"gains",
       {{"kes", 4.0},
        {"kdi", {{"diag", json::array({2.5})}}},
        {"kint", json::array({json::array({0.3})})},
        {"feedforward", "none"}}},
      {"qd_generator",
       {{"kind", "linear"},
        {"matrix", json::array({json::array({0.0, 1.0}),
                                json::array({-1.0, 0.0})})}}},
      {"region",
       {{"center", {0.1, 0.2}}, {"half_widths", {0.4, 0.4}},
        {"samples_per_axis", 3}}},
      {"theta", 0.3},
      {"x0", {{"q", {0.5, 0.5}}, {"p", {0.0, 0.1}}}},
      {"sim",
       {{"t_final", 4.0}, {"dt", 0.01}, {"method", "rk45_adaptive"},
        {"abs_tol", 1e-9}, {"rel_tol", 1e-7},
        {"disturbance",
         {{"kind", "sinusoid"}, {"amplitude", {0.0, 0.0, 0.1, 0.1}},
          {"frequency", 2.0}}}}},
      {"seed", 42},
      {"outputs", {{"report", "/tmp/r.json"}, {"circles_csv", "/tmp/c.csv"}}}};

  const RunConfig cfg = parse_run_config(j);
  CHECK(cfg.model_name == "spring_chain");
  CHECK(cfg.model.n == 2);
  CHECK(cfg.model.m == 1);
  CHECK(cfg.model.mass(cfg.q_star)(0, 0) == 1.5);

  CHECK(cfg.gains.kes(0, 0) == 4.0);
  CHECK(cfg.gains.kdi(0, 0) == 2.5);
  CHECK(cfg.gains.kint(0, 0) == 0.3);

  CHECK(cfg.generator_kind == "linear");
  const Vec probe = (Vec(2) << 1.0, 2.0).finished();
  CHECK((cfg.generator.qd(probe) - (Vec(2) << 2.0, -1.0).finished()).norm() ==
        0.0);

  CHECK(cfg.region.samples_per_axis == 3);
  CHECK(cfg.region.half_widths(1) == 0.4);
  CHECK(cfg.theta == 0.3);
  CHECK(cfg.has_x0);
  CHECK(cfg.x0.p(1) == 0.1);

  CHECK(cfg.sim.t_final == 4.0);
  CHECK(cfg.sim.method == SimConfig::Method::rk45);
  CHECK(cfg.sim.abs_tol == 1e-9);
  CHECK(cfg.sim.disturbance.kind == Disturbance::Kind::sinusoid);
  CHECK(cfg.sim.disturbance.frequency == 2.0);
  CHECK(cfg.sim.disturbance.amplitude.size() == 4);

  CHECK(cfg.seed == 42);
  CHECK(cfg.outputs.at("report") == "/tmp/r.json");
  CHECK(cfg.outputs.at("circles_csv") == "/tmp/c.csv");
}

TEST_CASE("matrix values accept scalar, diagonal and row forms") {
  json j = minimal_config();

  SUBCASE("rows") {
    j["gains"]["kes"] = json::array({json::array({3.0})});
    CHECK(parse_run_config(j).gains.kes(0, 0) == 3.0);
  }
  SUBCASE("diag") {
    j["gains"]["kes"] = {{"diag", json::array({6.0})}};
    CHECK(parse_run_config(j).gains.kes(0, 0) == 6.0);
  }
  SUBCASE("ragged rows are rejected") {
    j["gains"]["kes"] = json::array(
        {json::array({1.0, 0.0}), json::array({0.0})});
    expect_rejected(j, "same length");
  }
  SUBCASE("an object without diag is rejected") {
    j["gains"]["kes"] = {{"diagonal", json::array({1.0})}};
    expect_rejected(j, "gains.kes");
  }
  SUBCASE("an empty array is rejected") {
    j["gains"]["kes"] = json::array();
    expect_rejected(j, "gains.kes");
  }
  SUBCASE("strings are not matrices") {
    j["gains"]["kes"] = "identity";
    expect_rejected(j, "gains.kes");
  }
}

TEST_CASE("unknown keys are rejected with their location") {
  SUBCASE("top level") {
    json j = minimal_config();
    j["qstar"] = {0.0};
    expect_rejected(j, "qstar");
  }
  SUBCASE("model") {
    json j = minimal_config();
    j["model"]["gravity"] = 9.81;
    expect_rejected(j, "gravity");
  }
  SUBCASE("gains") {
    json j = minimal_config();
    j["gains"]["kp"] = 1.0;
    expect_rejected(j, "'kp' in 'gains'");
  }
  SUBCASE("region") {
    json j = minimal_config();
    j["region"] = {{"half_widths", {0.5}}, {"width", 1.0}};
    expect_rejected(j, "'width' in 'region'");
  }
  SUBCASE("sim") {
    json j = minimal_config();
    j["sim"] = {{"step", 0.1}};
    expect_rejected(j, "'step' in 'sim'");
  }
  SUBCASE("disturbance") {
    json j = minimal_config();
    j["sim"] = {{"disturbance", {{"kind", "none"}, {"phase", 0.0}}}};
    expect_rejected(j, "'phase' in 'sim.disturbance'");
  }
  SUBCASE("outputs") {
    json j = minimal_config();
    j["outputs"] = {{"plot", "/tmp/p.png"}};
    expect_rejected(j, "'plot' in 'outputs'");
  }
  SUBCASE("x0") {
    json j = minimal_config();
    j["x0"] = {{"q", {0.0}}, {"p", {0.0}}, {"v", {0.0}}};
    expect_rejected(j, "'v' in 'x0'");
  }
}

TEST_CASE("required keys and dimensions are enforced") {
  SUBCASE("model, q_star and gains are mandatory") {
    json j = minimal_config();
    j.erase("gains");
    expect_rejected(j, "gains");
  }
  SUBCASE("gains need both kes and kdi") {
    json j = minimal_config();
    j["gains"].erase("kdi");
    expect_rejected(j, "kdi");
  }
  SUBCASE("model.name is mandatory") {
    json j = minimal_config();
    j["model"].erase("name");
    expect_rejected(j, "model.name");
  }
  SUBCASE("unknown model names are reported") {
    json j = minimal_config();
    j["model"]["name"] = "pendulum";
    expect_rejected(j, "pendulum");
  }
  SUBCASE("the manipulator model takes no parameters") {
    json j = minimal_config();
    j["model"] = {{"name", "planar_manipulator"}, {"mass", 2.0}};
    expect_rejected(j, "no parameters");
  }
  SUBCASE("q_star length must match the model") {
    json j = minimal_config();
    j["q_star"] = {0.0, 0.0};
    expect_rejected(j, "q_star");
  }
  SUBCASE("x0 needs both q and p of length n") {
    json j = minimal_config();
    j["x0"] = {{"q", {0.0}}};
    expect_rejected(j, "x0");
    j["x0"] = {{"q", {0.0}}, {"p", {0.0, 0.0}}};
    expect_rejected(j, "length n");
  }
  SUBCASE("region without half widths") {
    json j = minimal_config();
    j["region"] = {{"center", {0.0}}};
    expect_rejected(j, "half_widths");
  }
  SUBCASE("disturbance vectors live in the full state space") {
    json j = minimal_config();
    j["sim"] = {{"disturbance", {{"kind", "constant"}, {"value", {0.1}}}}};
    expect_rejected(j, "2n");
  }
  SUBCASE("sinusoid needs amplitude and frequency") {
    json j = minimal_config();
    j["sim"] = {{"disturbance",
                 {{"kind", "sinusoid"}, {"amplitude", {0.0, 0.1}}}}};
    expect_rejected(j, "frequency");
  }
  SUBCASE("generator value must match n") {
    json j = minimal_config();
    j["qd_generator"] = {{"kind", "constant"}, {"value", {1.0, 2.0}}};
    expect_rejected(j, "length n");
  }
  SUBCASE("generator matrix must be square of size n") {
    json j = minimal_config();
    j["qd_generator"] = {
        {"kind", "linear"},
        {"matrix", json::array({json::array({1.0, 0.0})})}};
    expect_rejected(j, "n x n");
  }
  SUBCASE("unknown generator kind") {
    json j = minimal_config();
    j["qd_generator"] = {{"kind", "quadratic"}};
    expect_rejected(j, "kind");
  }
}

TEST_CASE("scalar bounds are checked") {
  SUBCASE("theta strictly inside (0,1)") {
    for (const double bad : {0.0, 1.0, -0.2, 1.5}) {
      json j = minimal_config();
      j["theta"] = bad;
      expect_rejected(j, "theta");
    }
    json j = minimal_config();
    j["theta"] = 0.999;
    CHECK(parse_run_config(j).theta == 0.999);
  }
  SUBCASE("sim times must be positive") {
    json j = minimal_config();
    j["sim"] = {{"t_final", -1.0}};
    expect_rejected(j, "positive");
    j["sim"] = {{"dt", 0.0}};
    expect_rejected(j, "positive");
  }
  SUBCASE("unknown integrator") {
    json j = minimal_config();
    j["sim"] = {{"method", "euler"}};
    expect_rejected(j, "method");
  }
  SUBCASE("bad feedforward") {
    json j = minimal_config();
    j["gains"]["feedforward"] = "full";
    expect_rejected(j, "feedforward");
  }
  SUBCASE("outputs must map to strings") {
    json j = minimal_config();
    j["outputs"] = {{"report", 7}};
    expect_rejected(j, "path strings");
  }
}

TEST_CASE("configs load from disk with readable failure modes") {
  const std::string good_path = "/tmp/phtune_cfg_good.json";
  const std::string bad_path = "/tmp/phtune_cfg_bad.json";
  {
    std::ofstream out(good_path);
    out << minimal_config().dump(2);
  }
  {
    std::ofstream out(bad_path);
    out << "{ not json";
  }

  const RunConfig cfg = load_run_config(good_path);
  CHECK(cfg.model_name == "point_mass");

  try {
    load_run_config(bad_path);
    FAIL_CHECK("malformed JSON accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("not valid JSON") != std::string::npos);
  }
  try {
    load_run_config("/tmp/phtune_missing_cfg.json");
    FAIL_CHECK("missing file accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("cannot open") != std::string::npos);
  }
  std::remove(good_path.c_str());
  std::remove(bad_path.c_str());
}
