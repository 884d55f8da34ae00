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

#include "graphdepth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace graphdepth {

namespace {

constexpr double kDegenerateTolerance = 1e-15;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kNonPositiveCalibration, "focal lengths must be positive");
  }
}

ScenePlane::ScenePlane(const Vec3& point, const Vec3& normal) : point_(point) {
  if (!(point.z > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "plane anchor must lie in front of the camera (Z0 > 0)");
  }
  const double len = norm(normal);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorCode::kInvalidArgument, "plane normal must be a finite non-zero vector");
  }
  normal_ = {normal.x / len, normal.y / len, normal.z / len};
  rho_ = dot(normal_, point_);
  if (std::abs(rho_) < kDegenerateTolerance) {
    throw Error(ErrorCode::kZeroRho, "plane passes through the camera center");
  }
  if (rho_ > 0.0) {
    normal_ = {-normal_.x, -normal_.y, -normal_.z};
    rho_ = -rho_;
  }
}

InverseDepthMap::InverseDepthMap(Grid<double> values, Mask valid)
    : values_(std::move(values)), valid_(std::move(valid)) {
  if (!values_.same_shape(valid_)) {
    throw Error(ErrorCode::kInvalidArgument, "inverse depth values and validity differ in shape");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid_[i] && !(std::isfinite(values_[i]) && values_[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "valid inverse depth entries must be finite and positive");
    }
  }
}

InverseDepthMap InverseDepthMap::from_raw(Grid<double> values) {
  Mask valid(values.width(), values.height(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    valid[i] = std::isfinite(values[i]) && values[i] > 0.0 ? 1 : 0;
  }
  return InverseDepthMap(std::move(values), std::move(valid));
}

std::size_t InverseDepthMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.values().begin(), valid_.values().end(), std::uint8_t{1}));
}

double plane_inverse_depth(const ImagePlaneParam& param, double x, double y) {
  return param.d0 + param.u.x * (x - param.anchor.x) + param.u.y * (y - param.anchor.y);
}

double scene_plane_inverse_depth(const ScenePlane& plane, const CameraIntrinsics& cam, double x, double y) {
  const Vec3& n = plane.normal();
  const double bracket = n.x * (x - cam.cx) / cam.fx + n.y * (y - cam.cy) / cam.fy + n.z;
  if (std::abs(bracket) < kDegenerateTolerance) {
    throw Error(ErrorCode::kDegeneratePlaneRay, "viewing ray is parallel to the plane");
  }
  return bracket / plane.rho();
}

Vec2 u_from_normal(const ScenePlane& plane, const CameraIntrinsics& cam) {
  const double rho = plane.rho();
  if (std::abs(rho) < kDegenerateTolerance) {
    throw Error(ErrorCode::kZeroRho, "plane passes through the camera center");
  }
  return {plane.normal().x / (rho * cam.fx), plane.normal().y / (rho * cam.fy)};
}

ImagePlaneParam image_plane_param(const ScenePlane& plane, const CameraIntrinsics& cam) {
  return {cam.project(plane.point()), 1.0 / plane.point().z, u_from_normal(plane, cam)};
}

double rho_at(const Vec3& normal, double d0, const Vec2& anchor, const CameraIntrinsics& cam) {
  return (normal.x * (anchor.x - cam.cx) / cam.fx + normal.y * (anchor.y - cam.cy) / cam.fy + normal.z) / d0;
}

Vec3 normal_from_u(const Vec2& u, double d0, const Vec2& anchor, const CameraIntrinsics& cam) {
  if (!(d0 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "normal recovery needs a positive inverse depth");
  }
  const double ux = u.x;
  const double uy = u.y;
  const double z0 = 1.0 / d0;
  const double px = anchor.x - cam.cx;
  const double py = anchor.y - cam.cy;

  // Coefficients of the two linear constraints
  //   alpha a + beta b + gamma c = 0,   delta a + epsilon b + phi c = 0,
  // with beta = ux fx py z0 and delta = uy fy px z0 (only needed in expanded form).
  const double alpha = ux * cam.fy * px * z0 - cam.fy;
  const double gamma = ux * cam.fx * cam.fy * z0;
  const double epsilon = uy * cam.fx * py * z0 - cam.fx;
  const double phi = uy * cam.fx * cam.fy * z0;

  if (ux != 0.0 && uy != 0.0) {
    // b = kappa a with kappa = (uy fy) / (ux fx). The products beta*kappa and
    // gamma*kappa are expanded so that ux cancels; kappa itself overflows when
    // ux is tiny relative to uy.
    const double beta_kappa = uy * cam.fy * py * z0;
    const double gamma_kappa = uy * cam.fy * cam.fy * z0;
    const double lead = alpha + beta_kappa;
    const double scale = std::sqrt(lead * lead + gamma * gamma + gamma_kappa * gamma_kappa);
    // sign(gamma) == sign(ux), so -sign(ux)|gamma| == -gamma.
    const double a = -gamma / scale;
    const double b = -gamma_kappa / scale;
    const double c = lead / scale;
    return {a, b, c};
  }
  if (ux != 0.0) {
    const double a = -std::abs(gamma) / std::sqrt(alpha * alpha + gamma * gamma) * sign(ux);
    return {a, 0.0, -(alpha * a) / gamma};
  }
  if (uy != 0.0) {
    const double b = -std::abs(phi) / std::sqrt(epsilon * epsilon + phi * phi) * sign(uy);
    return {0.0, b, -(epsilon * b) / phi};
  }
  return {0.0, 0.0, -1.0};
}

NormalMap normals_from_slopes(const InverseDepthMap& d, const NormalParamMap& u, const CameraIntrinsics& cam) {
  cam.validate();
  if (!d.values().same_shape(u.ux) || !d.values().same_shape(u.uy)) {
    throw Error(ErrorCode::kInvalidArgument, "depth and slope maps differ in shape");
  }
  NormalMap out{Grid<Vec3>(d.width(), d.height()), Mask(d.width(), d.height(), 0)};
  for (int y = 0; y < d.height(); ++y) {
    for (int x = 0; x < d.width(); ++x) {
      const double ux = u.ux(x, y);
      const double uy = u.uy(x, y);
      if (!d.is_valid(x, y) || !std::isfinite(ux) || !std::isfinite(uy)) {
        continue;
      }
      out.normals(x, y) = normal_from_u({ux, uy}, d(x, y), {double(x), double(y)}, cam);
      out.valid(x, y) = 1;
    }
  }
  return out;
}

DerivativeKernel gaussian_derivative_kernel(double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "derivative kernel sigma must be positive");
  }
  DerivativeKernel k{};
  double ramp_response = 0.0;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      // G'(dx) G(dy) up to a constant; the normalization below fixes the scale.
      const double tap = dx * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k.taps[dy + 2][dx + 2] = tap;
      ramp_response += tap * dx;
    }
  }
  for (auto& row : k.taps) {
    for (double& tap : row) tap /= ramp_response;
  }
  return k;
}

NormalMap normals_from_depth_gradient(const InverseDepthMap& d, const CameraIntrinsics& cam, double sigma) {
  cam.validate();
  const DerivativeKernel k = gaussian_derivative_kernel(sigma);
  const int w = d.width();
  const int h = d.height();
  NormalMap out{Grid<Vec3>(w, h), Mask(w, h, 0)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx = 0.0;
      double gy = 0.0;
      bool ok = true;
      for (int dy = -2; dy <= 2 && ok; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -2; dx <= 2; ++dx) {
          const int sx = std::clamp(x + dx, 0, w - 1);
          if (!d.is_valid(sx, sy)) {
            ok = false;
            break;
          }
          const double v = d(sx, sy);
          gx += k.taps[dy + 2][dx + 2] * v;
          gy += k.taps[dx + 2][dy + 2] * v;
        }
      }
      if (!ok) continue;
      out.normals(x, y) = normal_from_u({gx, gy}, d(x, y), {double(x), double(y)}, cam);
      out.valid(x, y) = 1;
    }
  }
  return out;
}

InverseDepthMap disparity_to_inverse_depth(const Grid<double>& disparity, double focal, double baseline) {
  if (!(focal > 0.0) || !(baseline > 0.0)) {
    throw Error(ErrorCode::kNonPositiveCalibration, "focal length and baseline must be positive");
  }
  const double scale = focal * baseline;
  Grid<double> values(disparity.width(), disparity.height(), 0.0);
  Mask valid(disparity.width(), disparity.height(), 0);
  for (std::size_t i = 0; i < disparity.size(); ++i) {
    const double disp = disparity[i];
    if (std::isfinite(disp) && disp > 0.0) {
      values[i] = disp / scale;
      valid[i] = values[i] > 0.0 ? 1 : 0;
    }
  }
  return InverseDepthMap(std::move(values), std::move(valid));
}

Grid<double> inverse_depth_to_disparity(const InverseDepthMap& d, double focal, double baseline) {
  if (!(focal > 0.0) || !(baseline > 0.0)) {
    throw Error(ErrorCode::kNonPositiveCalibration, "focal length and baseline must be positive");
  }
  const double scale = focal * baseline;
  Grid<double> out(d.width(), d.height(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.valid()[i]) out[i] = d.values()[i] * scale;
  }
  return out;
}

}  // namespace graphdepth
