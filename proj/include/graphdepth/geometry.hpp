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

#pragma once

#include <cmath>
#include <cstdint>

#include "graphdepth/grid.hpp"

namespace graphdepth {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Angle between two vectors in radians, accurate for nearly parallel inputs.
inline double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(norm(cross(a, b)), dot(a, b)); }

/// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Throws kNonPositiveCalibration unless both focal lengths are positive.
  void validate() const;
  Vec2 project(const Vec3& point) const { return {point.x / point.z * fx + cx, point.y / point.z * fy + cy}; }
};

/// A scene plane given by a point P0 and unit normal n0, in camera coordinates.
/// The normal is always oriented toward the camera, so rho = <n0, P0> < 0.
class ScenePlane {
 public:
  /// Normalizes `normal` and flips it if it faces away from the camera.
  /// Throws kInvalidArgument for a zero normal or Z0 <= 0, kZeroRho when the
  /// plane passes through the camera center.
  ScenePlane(const Vec3& point, const Vec3& normal);

  const Vec3& point() const noexcept { return point_; }
  const Vec3& normal() const noexcept { return normal_; }
  double rho() const noexcept { return rho_; }

 private:
  Vec3 point_;
  Vec3 normal_;
  double rho_ = 0.0;
};

/// Inverse-depth plane anchored at (x0, y0): d(x, y) = d0 + <u, (x - x0, y - y0)>.
struct ImagePlaneParam {
  Vec2 anchor;
  double d0 = 1.0;
  Vec2 u;
};

/// H x W inverse depth with per-pixel validity. Valid entries are finite and > 0.
class InverseDepthMap {
 public:
  InverseDepthMap() = default;
  /// Throws kInvalidArgument on shape mismatch or a valid entry that is
  /// non-finite or non-positive.
  InverseDepthMap(Grid<double> values, Mask valid);

  /// Marks non-finite and non-positive entries invalid instead of rejecting them.
  static InverseDepthMap from_raw(Grid<double> values);

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }
  std::size_t size() const noexcept { return values_.size(); }
  const Grid<double>& values() const noexcept { return values_; }
  const Mask& valid() const noexcept { return valid_; }
  double operator()(int x, int y) const noexcept { return values_(x, y); }
  bool is_valid(int x, int y) const noexcept { return valid_(x, y) != 0; }
  std::size_t valid_count() const noexcept;

 private:
  Grid<double> values_;
  Mask valid_;
};

/// Per-pixel inverse-depth slopes (ux, uy), in units of d per pixel.
struct NormalParamMap {
  Grid<double> ux;
  Grid<double> uy;

  NormalParamMap() = default;
  NormalParamMap(int width, int height) : ux(width, height, 0.0), uy(width, height, 0.0) {}
  int width() const noexcept { return ux.width(); }
  int height() const noexcept { return ux.height(); }
};

struct NormalMap {
  Grid<Vec3> normals;
  Mask valid;
};

double plane_inverse_depth(const ImagePlaneParam& param, double x, double y);

/// 1/Z of the plane along the ray through pixel (x, y). Throws
/// kDegeneratePlaneRay when the ray is parallel to the plane.
double scene_plane_inverse_depth(const ScenePlane& plane, const CameraIntrinsics& cam, double x, double y);

/// Image-space slope of the plane's inverse depth. Throws kZeroRho when the
/// plane contains the camera center.
Vec2 u_from_normal(const ScenePlane& plane, const CameraIntrinsics& cam);

/// Image-plane parameterization of `plane`, anchored at the projection of P0.
ImagePlaneParam image_plane_param(const ScenePlane& plane, const CameraIntrinsics& cam);

/// Recovers the camera-facing unit normal from the slope u at pixel `anchor`
/// with inverse depth d0 > 0. Dispatches on exact zeros of the slope
/// components; the result always satisfies rho < 0.
Vec3 normal_from_u(const Vec2& u, double d0, const Vec2& anchor, const CameraIntrinsics& cam);

/// rho of the plane through pixel `anchor` at inverse depth d0 with normal n.
double rho_at(const Vec3& normal, double d0, const Vec2& anchor, const CameraIntrinsics& cam);

/// Per-pixel normals from the slope map, anchored at each pixel.
NormalMap normals_from_slopes(const InverseDepthMap& d, const NormalParamMap& u, const CameraIntrinsics& cam);

/// Normals from a 5x5 Gaussian-derivative estimate of grad d (replicate
/// padding). A pixel is invalid when any pixel of its 5x5 support is invalid.
NormalMap normals_from_depth_gradient(const InverseDepthMap& d, const CameraIntrinsics& cam, double sigma);

/// 5x5 derivative taps for d/dx, indexed [dy + 2][dx + 2]. The d/dy kernel is
/// its transpose. Normalized so that a unit ramp maps to exactly 1.
struct DerivativeKernel {
  double taps[5][5];
};
DerivativeKernel gaussian_derivative_kernel(double sigma);

/// d = disp / (focal * baseline). Non-positive and non-finite disparities are invalid.
InverseDepthMap disparity_to_inverse_depth(const Grid<double>& disparity, double focal, double baseline);

/// Inverse of disparity_to_inverse_depth on valid pixels; invalid pixels become +inf.
Grid<double> inverse_depth_to_disparity(const InverseDepthMap& d, double focal, double baseline);

}  // namespace graphdepth
