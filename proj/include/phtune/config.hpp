#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "phtune/canonical.hpp"
#include "phtune/closedloop.hpp"
#include "phtune/model.hpp"
#include "phtune/pipeline.hpp"
#include "phtune/sim.hpp"

namespace phtune {

/// Fully parsed run configuration.  Parsing is strict: unknown keys anywhere
/// raise InputError naming the offending key.
struct RunConfig {
  MechanicalModel model;
  std::string model_name;
  Vec q_star;
  ControllerGains gains;
  GyroGenerator generator;
  std::string generator_kind = "zero";
  Region region;
  double theta = 0.5;
  bool has_x0 = false;
  StateQP x0;
  SimConfig sim;
  int seed = 0;
  std::map<std::string, std::string> outputs;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace phtune
