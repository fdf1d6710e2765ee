#include "rrlab/envs/env_factory.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rrlab/errors.hpp"

namespace rrlab::envs {

using nlohmann::json;

EnvSpec EnvSpec::parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("environment spec is not valid JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  EnvSpec spec;
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ValidationError({"environment spec must be an object with a \"type\" string"});
  }
  spec.type_ = j["type"].get<std::string>();

  if (spec.type_ == "catch") {
    spec.width_ = j.value("width", int64_t{5});
    spec.height_ = j.value("height", int64_t{10});
    spec.solve_threshold_ = j.value("solve_threshold", 0.85);
    if (spec.width_ < 2 || spec.height_ < 2)
      problems.push_back("catch: width and height must be >= 2");
  } else if (spec.type_ == "gridworld") {
    GridSpec g;
    if (!j.contains("grid") || !j["grid"].is_array() || j["grid"].empty()) {
      problems.push_back("gridworld: \"grid\" must be a non-empty array of strings");
    } else {
      for (const auto& row : j["grid"]) {
        if (!row.is_string()) {
          problems.push_back("gridworld: grid rows must be strings");
          break;
        }
        g.grid.push_back(row.get<std::string>());
      }
    }
    if (j.contains("start")) {
      if (!j["start"].is_array() || j["start"].size() != 2) {
        problems.push_back("gridworld: \"start\" must be [row, col]");
      } else {
        g.start_row = j["start"][0].get<int64_t>();
        g.start_col = j["start"][1].get<int64_t>();
      }
    }
    g.step_reward = j.value("step_reward", 0.0);
    g.goal_reward = j.value("goal_reward", 1.0);
    g.max_steps = j.value("max_steps", int64_t{100});
    spec.solve_threshold_ = j.value("solve_threshold", g.goal_reward * 0.95);
    if (problems.empty()) {
      try {
        GridworldEnv probe(g);  // full layout validation
        spec.grid_ = probe.grid_spec();
      } catch (const ValidationError& e) {
        for (const auto& v : e.violations()) problems.push_back("gridworld: " + v);
      }
    }
  } else {
    problems.push_back("unknown environment type \"" + spec.type_ + "\"");
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return spec;
}

EnvSpec EnvSpec::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KeyError(path, "cannot open environment spec file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string EnvSpec::canonical_json() const {
  json j;
  j["type"] = type_;
  if (type_ == "catch") {
    j["width"] = width_;
    j["height"] = height_;
  } else {
    j["grid"] = grid_->grid;
    j["start"] = {grid_->start_row, grid_->start_col};
    j["step_reward"] = grid_->step_reward;
    j["goal_reward"] = grid_->goal_reward;
    j["max_steps"] = grid_->max_steps;
  }
  j["solve_threshold"] = solve_threshold_;
  return j.dump();
}

std::unique_ptr<Environment> EnvSpec::instantiate() const {
  if (type_ == "catch") return make_catch(width_, height_);
  return make_gridworld(*grid_);
}

}  // namespace rrlab::envs
