/* Copyright (c) 2026 The graphdepth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "graphdepth/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace graphdepth {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + where + item.key() + "'");
    }
  }
}

template <class T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <class T>
void take(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void take_path(const json& obj, const char* key, std::optional<std::filesystem::path>& out) {
  if (obj.contains(key)) out = obj.at(key).get<std::string>();
}

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  reject_unknown(j,
                 {"input", "guide", "confidence", "intrinsics", "baseline", "disparity", "graph", "preset", "pyramid",
                  "adam", "eps", "regularizer", "threads", "out", "u_out", "normals_out", "normals_png", "trace",
                  "graph_dump"},
                 "");
  RunConfig c;
  if (j.contains("input")) c.input = j.at("input").get<std::string>();
  if (j.contains("guide")) c.guide = j.at("guide").get<std::string>();
  take_path(j, "confidence", c.confidence);
  if (j.contains("intrinsics")) {
    const json& k = j.at("intrinsics");
    reject_unknown(k, {"fx", "fy", "cx", "cy"}, "intrinsics.");
    CameraIntrinsics cam{k.at("fx").get<double>(), k.at("fy").get<double>(), k.at("cx").get<double>(),
                         k.at("cy").get<double>()};
    cam.validate();
    c.intrinsics = cam;
  }
  take(j, "baseline", c.baseline);
  take(j, "disparity", c.disparity);
  if (j.contains("graph")) {
    const json& g = j.at("graph");
    reject_unknown(g, {"sigma_int", "sigma_spa", "window", "patch", "k"}, "graph.");
    take(g, "sigma_int", c.graph.sigma_int);
    take(g, "sigma_spa", c.graph.sigma_spa);
    take(g, "window", c.graph.window);
    take(g, "patch", c.graph.patch);
    take(g, "k", c.graph.k);
  }
  take(j, "preset", c.preset);
  if (j.contains("pyramid")) {
    const json& p = j.at("pyramid");
    reject_unknown(p, {"scales", "factor", "lambda", "alpha"}, "pyramid.");
    PyramidConfig pyr;
    take(p, "scales", pyr.scales);
    take(p, "factor", pyr.factor);
    pyr.lambda = p.at("lambda").get<std::vector<double>>();
    pyr.alpha = p.at("alpha").get<std::vector<double>>();
    c.pyramid = pyr;
  }
  if (j.contains("adam")) {
    const json& a = j.at("adam");
    reject_unknown(a,
                   {"step", "beta1", "beta2", "adam_eps", "iters_per_scale", "tol", "stall_window", "min_iters",
                    "final_step_ratio"},
                   "adam.");
    take(a, "step", c.adam.step);
    take(a, "beta1", c.adam.beta1);
    take(a, "beta2", c.adam.beta2);
    take(a, "adam_eps", c.adam.adam_eps);
    take(a, "iters_per_scale", c.adam.iters_per_scale);
    take(a, "tol", c.adam.tol);
    take(a, "stall_window", c.adam.stall_window);
    take(a, "min_iters", c.adam.min_iters);
    take(a, "final_step_ratio", c.adam.final_step_ratio);
  }
  take(j, "eps", c.eps);
  if (j.contains("regularizer")) c.regularizer = parse_regularizer(j.at("regularizer").get<std::string>());
  take(j, "threads", c.threads);
  take_path(j, "out", c.out);
  take_path(j, "u_out", c.u_out);
  take_path(j, "normals_out", c.normals_out);
  take_path(j, "normals_png", c.normals_png);
  take_path(j, "trace", c.trace);
  take_path(j, "graph_dump", c.graph_dump);
  return c;
}

}  // namespace

PyramidConfig RunConfig::schedule() const {
  if (preset && pyramid) {
    throw Error(ErrorCode::kInvalidArgument, "set either a preset or explicit lambda/alpha lists, not both");
  }
  if (pyramid) {
    pyramid->validate();
    return *pyramid;
  }
  return graphdepth::preset(preset.value_or(std::string(kDefaultPreset)), regularizer);
}

RunConfig parse_run_config(const std::string& json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad config: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

}  // namespace graphdepth
