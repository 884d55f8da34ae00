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

// graphdepth command-line front end: refine | eval | synth | normals.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "graphdepth/config.hpp"
#include "graphdepth/eval.hpp"
#include "graphdepth/io.hpp"
#include "graphdepth/solver.hpp"
#include "graphdepth/synth.hpp"

namespace gd = graphdepth;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitSolver = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CameraFlags {
  std::optional<double> fx, fy, cx, cy;

  void add(CLI::App* app) {
    app->add_option("--fx", fx, "focal length x (pixels)");
    app->add_option("--fy", fy, "focal length y (pixels); defaults to fx");
    app->add_option("--cx", cx, "principal point x; defaults to the image center");
    app->add_option("--cy", cy, "principal point y; defaults to the image center");
  }
  bool given() const { return fx.has_value(); }
  gd::CameraIntrinsics resolve(int width, int height) const {
    if (!fx && (fy || cx || cy)) throw UsageError("--fy/--cx/--cy need --fx");
    gd::CameraIntrinsics cam{*fx, fy.value_or(*fx), cx.value_or(0.5 * (width - 1)), cy.value_or(0.5 * (height - 1))};
    cam.validate();
    return cam;
  }
};

// Used when a normal map is requested without calibration.
gd::CameraIntrinsics nominal_camera(int width, int height) {
  const double f = std::max(width, height);
  return {f, f, 0.5 * (width - 1), 0.5 * (height - 1)};
}

gd::CameraIntrinsics camera_or_nominal(const std::optional<gd::CameraIntrinsics>& cam, int width, int height) {
  if (cam) return *cam;
  std::cerr << "warning: no intrinsics given; normals use a nominal camera (f = " << std::max(width, height)
            << ", principal point at the image center)\n";
  return nominal_camera(width, height);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in list '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

void write_normals(const gd::NormalMap& normals, const std::optional<fs::path>& pfm,
                   const std::optional<fs::path>& png) {
  if (pfm) {
    gd::Grid<double> a(normals.normals.width(), normals.normals.height());
    gd::Grid<double> b = a;
    gd::Grid<double> c = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool ok = normals.valid[i] != 0;
      a[i] = ok ? normals.normals[i].x : HUGE_VAL;
      b[i] = ok ? normals.normals[i].y : HUGE_VAL;
      c[i] = ok ? normals.normals[i].z : HUGE_VAL;
    }
    gd::write_pfm3(*pfm, a, b, c);
  }
  if (png) gd::write_png(*png, gd::colorize_normals(normals));
}

// ---------------------------------------------------------------- refine

struct RefineFlags {
  std::optional<std::string> config, input, guide, conf, preset, lambda, alpha, regularizer;
  std::optional<std::string> out, u_out, normals_out, normals_png, trace, graph_dump;
  std::optional<int> threads, scales, iters;
  std::optional<double> baseline, eps, step;
  bool disparity = false;
  CameraFlags cam;
};

void add_refine(CLI::App& root, RefineFlags& f) {
  CLI::App* app = root.add_subcommand("refine", "refine an inverse-depth or disparity map");
  app->add_option("--config", f.config, "JSON run config; flags override it");
  app->add_option("--input", f.input, "input map (PFM)");
  app->add_option("--guide", f.guide, "guide image (PNG/PPM/PGM)");
  app->add_option("--conf", f.conf, "confidence (PFM or PGM); all ones when absent");
  app->add_option("--preset", f.preset, "lambda/alpha schedule: middlebury-sgm, middlebury-bm, kitti, eth3d");
  app->add_option("--lambda", f.lambda, "explicit lambda list, coarsest first");
  app->add_option("--alpha", f.alpha, "explicit alpha list, coarsest first");
  app->add_option("--scales", f.scales, "scales for an explicit schedule (default: list length)");
  app->add_option("--regularizer", f.regularizer, "mixed (default) or nltgv");
  app->add_option("--iters", f.iters, "ADAM iterations per scale");
  app->add_option("--step", f.step, "ADAM step");
  app->add_option("--eps", f.eps, "smoothing epsilon");
  app->add_option("--threads", f.threads, "worker threads, 0 = all cores");
  app->add_flag("--disparity", f.disparity, "input is disparity");
  app->add_option("--baseline", f.baseline, "stereo baseline (with --fx, converts disparity to inverse depth)");
  f.cam.add(app);
  app->add_option("--out", f.out, "refined map (PFM, same units as the input)");
  app->add_option("--u-out", f.u_out, "slope map (3-channel PFM: ux, uy, 0)");
  app->add_option("--normals-out", f.normals_out, "unit normals (3-channel PFM)");
  app->add_option("--normals-png", f.normals_png, "colorized normals (PNG)");
  app->add_option("--trace", f.trace, "energy trace (CSV)");
  app->add_option("--graph-dump", f.graph_dump, "full-resolution graph edge list (text)");
}

int run_refine(const RefineFlags& f) {
  gd::RunConfig cfg = f.config ? gd::load_run_config(*f.config) : gd::RunConfig{};
  if (f.input) cfg.input = *f.input;
  if (f.guide) cfg.guide = *f.guide;
  if (f.conf) cfg.confidence = fs::path(*f.conf);
  if (f.regularizer) cfg.regularizer = gd::parse_regularizer(*f.regularizer);
  if (f.preset) {
    cfg.preset = *f.preset;
    if (!f.lambda && !f.alpha) cfg.pyramid.reset();
  }
  if (f.lambda || f.alpha) {
    if (!f.lambda || !f.alpha) throw UsageError("--lambda and --alpha go together");
    gd::PyramidConfig pyr;
    pyr.lambda = parse_list(*f.lambda);
    pyr.alpha = parse_list(*f.alpha);
    pyr.scales = f.scales.value_or(static_cast<int>(pyr.lambda.size()));
    cfg.pyramid = pyr;
    if (!f.preset) cfg.preset.reset();
  }
  if (f.iters) cfg.adam.iters_per_scale = *f.iters;
  if (f.step) cfg.adam.step = *f.step;
  if (f.eps) cfg.eps = *f.eps;
  if (f.threads) cfg.threads = *f.threads;
  if (f.disparity) cfg.disparity = true;
  if (f.baseline) cfg.baseline = *f.baseline;
  for (auto [flag, field] : {std::pair{&f.out, &cfg.out}, {&f.u_out, &cfg.u_out}, {&f.normals_out, &cfg.normals_out},
                             {&f.normals_png, &cfg.normals_png}, {&f.trace, &cfg.trace},
                             {&f.graph_dump, &cfg.graph_dump}}) {
    if (*flag) *field = fs::path(**flag);
  }
  if (cfg.input.empty() || cfg.guide.empty()) throw UsageError("refine needs --input and --guide");
  const gd::PyramidConfig schedule = cfg.schedule();

  const gd::Grid<double> raw = gd::read_pfm_grid(cfg.input);
  if (f.cam.given()) cfg.intrinsics = f.cam.resolve(raw.width(), raw.height());
  if (cfg.baseline && !cfg.disparity) throw UsageError("--baseline only applies with --disparity");

  // Disparity is converted with focal * baseline when both are known and is
  // otherwise used directly, since d is proportional to it.
  double disp_scale = 1.0;
  if (cfg.disparity && cfg.baseline) {
    if (!cfg.intrinsics) throw UsageError("--baseline needs --fx");
    if (!(*cfg.baseline > 0.0)) throw gd::Error(gd::ErrorCode::kNonPositiveCalibration, "baseline must be positive");
    disp_scale = cfg.intrinsics->fx * *cfg.baseline;
  }
  const gd::InverseDepthMap d_bar = cfg.disparity ? gd::disparity_to_inverse_depth(raw, disp_scale, 1.0)
                                                  : gd::InverseDepthMap::from_raw(raw);
  const gd::GuideImage guide = gd::read_image(cfg.guide);
  gd::Grid<double> mask(raw.width(), raw.height(), 1.0);
  if (cfg.confidence) mask = gd::read_confidence(*cfg.confidence);
  if (!mask.same_shape(raw)) throw UsageError("confidence and input differ in size");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!d_bar.valid()[i]) mask[i] = 0.0;
  }

  gd::RefineConfig rc;
  rc.graph = cfg.graph;
  rc.pyramid = schedule;
  rc.adam = cfg.adam;
  rc.eps = cfg.eps;
  rc.regularizer = cfg.regularizer;
  rc.threads = cfg.threads;
  const gd::RefineResult result = gd::refine(d_bar, mask, guide, rc);

  if (cfg.out) {
    if (cfg.disparity) {
      gd::write_pfm_grid(*cfg.out, gd::inverse_depth_to_disparity(result.d, disp_scale, 1.0));
    } else {
      gd::write_inverse_depth(*cfg.out, result.d);
    }
  }
  if (cfg.u_out) {
    gd::Grid<double> ux = result.u.ux;
    gd::Grid<double> uy = result.u.uy;
    for (std::size_t i = 0; i < ux.size(); ++i) {
      ux[i] *= disp_scale;
      uy[i] *= disp_scale;
    }
    gd::write_pfm3(*cfg.u_out, ux, uy, gd::Grid<double>(ux.width(), ux.height(), 0.0));
  }
  if (cfg.normals_out || cfg.normals_png) {
    if (cfg.disparity && !cfg.baseline) {
      std::cerr << "warning: disparity without --baseline; normals assume disparity equals inverse depth\n";
    }
    const gd::CameraIntrinsics cam = camera_or_nominal(cfg.intrinsics, raw.width(), raw.height());
    write_normals(gd::normals_from_slopes(result.d, result.u, cam), cfg.normals_out, cfg.normals_png);
  }
  if (cfg.trace) {
    std::ofstream out(*cfg.trace);
    if (!out) throw gd::Error(gd::ErrorCode::kIo, "cannot write '" + cfg.trace->string() + "'");
    out.precision(17);
    out << "iteration,scale,energy\n";
    for (const gd::ScaleTrace& t : result.traces) {
      for (std::size_t it = 0; it < t.energy.size(); ++it) out << it << ',' << t.scale << ',' << t.energy[it] << '\n';
    }
    if (!out) throw gd::Error(gd::ErrorCode::kIo, "failed writing '" + cfg.trace->string() + "'");
  }
  if (cfg.graph_dump) {
    std::ofstream out(*cfg.graph_dump);
    if (!out) throw gd::Error(gd::ErrorCode::kIo, "cannot write '" + cfg.graph_dump->string() + "'");
    gd::build_graph(guide, cfg.graph, cfg.threads).write_edge_list(out);
    if (!out) throw gd::Error(gd::ErrorCode::kIo, "failed writing '" + cfg.graph_dump->string() + "'");
  }
  std::printf("refined %dx%d, energy %.9g -> %.9g\n", raw.width(), raw.height(), result.naive_energy,
              result.final_energy);
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
  std::string pred, gt;
  std::string bad = "0.5,1,2";
  std::optional<std::string> csv;
  bool depth = false;
};

void add_eval(CLI::App& root, EvalFlags& f) {
  CLI::App* app = root.add_subcommand("eval", "compare a map against ground truth");
  app->add_option("--pred", f.pred, "prediction (PFM)")->required();
  app->add_option("--gt", f.gt, "ground truth (PFM); non-finite or non-positive entries are ignored")->required();
  app->add_option("--bad", f.bad, "comma-separated bad-pixel thresholds");
  app->add_flag("--depth", f.depth, "both maps hold inverse depth; compare depth 1/d instead");
  app->add_option("--csv", f.csv, "print one CSV header + row with this label instead of key=value");
}

int run_eval(const EvalFlags& f) {
  const std::vector<double> thresholds = parse_list(f.bad);
  gd::Grid<double> pred = gd::read_pfm_grid(f.pred);
  gd::Grid<double> gt = gd::read_pfm_grid(f.gt);
  if (!pred.same_shape(gt)) throw UsageError("prediction and ground truth differ in size");
  gd::Mask valid(gt.width(), gt.height(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    valid[i] = std::isfinite(gt[i]) && gt[i] > 0.0;
    if (f.depth) {
      gt[i] = 1.0 / gt[i];
      pred[i] = pred[i] > 0.0 ? 1.0 / pred[i] : HUGE_VAL;
    }
  }
  const gd::MetricReport report = gd::evaluate(pred, gt, valid, thresholds);
  if (f.csv) {
    std::cout << report.csv_header() << '\n' << report.csv_row(*f.csv) << '\n';
  } else {
    std::cout << report.to_key_value();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  std::string scene = "two-planes";
  std::string out_dir;
  int width = 64;
  int height = 64;
  double noise = 0.0;
  double holes = 0.0;
  double outliers = 0.0;
  std::uint64_t seed = 0;
};

void add_synth(CLI::App& root, SynthFlags& f) {
  CLI::App* app = root.add_subcommand("synth", "write a synthetic planar scene");
  app->add_option("--scene", f.scene, "two-planes, single-plane or fronto");
  app->add_option("--width", f.width, "image width");
  app->add_option("--height", f.height, "image height");
  app->add_option("--noise", f.noise, "noise sigma as a fraction of the depth range");
  app->add_option("--holes", f.holes, "fraction of pixels to invalidate");
  app->add_option("--outliers", f.outliers, "fraction of confidently wrong pixels");
  app->add_option("--seed", f.seed, "corruption seed");
  app->add_option("--out-dir", f.out_dir, "output directory")->required();
}

int run_synth(const SynthFlags& f) {
  gd::SceneSpec spec = gd::make_scene(f.scene, f.width, f.height);
  spec.noise = f.noise;
  spec.holes = f.holes;
  spec.outliers = f.outliers;
  spec.seed = f.seed;
  const gd::SyntheticBundle b = gd::generate_synthetic(spec);
  const fs::path dir(f.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw gd::Error(gd::ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());

  gd::write_inverse_depth(dir / "gt.pfm", b.gt);
  write_normals(b.gt_normals, dir / "gt_normals.pfm", std::nullopt);
  gd::RgbImage guide{b.guide.width(), b.guide.height(), 3, {}};
  for (double v : b.guide.values()) guide.pixels.push_back(static_cast<std::uint8_t>(std::lround(255.0 * v)));
  gd::write_png(dir / "guide.png", guide);
  gd::write_inverse_depth(dir / "input.pfm", b.noisy);
  gd::write_pfm_grid(dir / "confidence.pfm", b.confidence);
  std::printf("fx=%.17g fy=%.17g cx=%.17g cy=%.17g\n", spec.cam.fx, spec.cam.fy, spec.cam.cx, spec.cam.cy);
  return kExitOk;
}

// ---------------------------------------------------------------- normals

struct NormalsFlags {
  std::string input;
  std::optional<std::string> u, out, png;
  double sigma = 0.2;
  CameraFlags cam;
};

void add_normals(CLI::App& root, NormalsFlags& f) {
  CLI::App* app = root.add_subcommand("normals", "turn an inverse-depth map (and optional slope map) into normals");
  app->add_option("--input", f.input, "inverse depth (PFM)")->required();
  app->add_option("--u", f.u, "slope map from refine --u-out; without it the slopes come from a 5x5 "
                              "Gaussian-derivative filter");
  app->add_option("--sigma", f.sigma, "derivative filter sigma (pixels)");
  f.cam.add(app);
  app->add_option("--out", f.out, "unit normals (3-channel PFM)");
  app->add_option("--png", f.png, "colorized normals (PNG)");
}

int run_normals(const NormalsFlags& f) {
  if (!f.out && !f.png) throw UsageError("normals needs --out and/or --png");
  const gd::InverseDepthMap d = gd::read_inverse_depth(f.input);
  const std::optional<gd::CameraIntrinsics> given =
      f.cam.given() ? std::optional(f.cam.resolve(d.width(), d.height())) : std::nullopt;
  const gd::CameraIntrinsics cam = camera_or_nominal(given, d.width(), d.height());
  gd::NormalMap normals;
  if (f.u) {
    const gd::PfmImage u = gd::read_pfm(*f.u);
    if (u.channels != 3) throw gd::Error(gd::ErrorCode::kUnsupportedChannelCount, "slope map must have 3 channels");
    gd::NormalParamMap slopes;
    slopes.ux = u.channel(0);
    slopes.uy = u.channel(1);
    normals = gd::normals_from_slopes(d, slopes, cam);
  } else {
    normals = gd::normals_from_depth_gradient(d, cam, f.sigma);
  }
  write_normals(normals, f.out ? std::optional(fs::path(*f.out)) : std::nullopt,
                f.png ? std::optional(fs::path(*f.png)) : std::nullopt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphdepth: piecewise-planar refinement of inverse-depth maps"};
  app.require_subcommand(1);
  RefineFlags refine;
  EvalFlags eval;
  SynthFlags synth;
  NormalsFlags normals;
  add_refine(app, refine);
  add_eval(app, eval);
  add_synth(app, synth);
  add_normals(app, normals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("refine")) return run_refine(refine);
    if (app.got_subcommand("eval")) return run_eval(eval);
    if (app.got_subcommand("synth")) return run_synth(synth);
    return run_normals(normals);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.is_io()) return kExitIo;
    if (e.code() == gd::ErrorCode::kNonFiniteEnergy || e.code() == gd::ErrorCode::kEmptyConfidence) {
      return kExitSolver;
    }
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}
