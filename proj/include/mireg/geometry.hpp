// MIT License
//
// Copyright (c) 2026 The mireg authors.
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in all
// copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

#pragma once

#include <Eigen/Core>
#include <numbers>
#include <optional>
#include <vector>

namespace mireg {

using Point3 = Eigen::Vector3d;

struct PointCloud {
    std::vector<Point3> points;
    // Per-point intensity, same length as points when present. Loaded but not
    // used by the registration math.
    std::optional<std::vector<float>> intensity;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// Throws InvalidArgument if any coordinate is non-finite or the intensity
// length does not match.
void validate(const PointCloud &cloud);

// 6-DOF pose. Rotations in radians, applied as R = Rz(rz) * Ry(ry) * Rx(rx)
// about the sensor origin.
struct EulerPose {
    double tx = 0.0, ty = 0.0, tz = 0.0;
    double rx = 0.0, ry = 0.0, rz = 0.0;

    using Vector6 = Eigen::Matrix<double, 6, 1>;
    Vector6 as_vector() const;
    static EulerPose from_vector(const Vector6 &v);

    bool is_finite() const;
    // Copy with angles wrapped to (-pi, pi]; used for reporting only.
    EulerPose normalized() const;
};

// Homogeneous 4x4 rigid transform. The rotation block is orthonormal with
// det +1 and the last row is exactly [0 0 0 1].
class RigidTransform {
public:
    RigidTransform() : m_(Eigen::Matrix4d::Identity()) {}

    // Validates the matrix; throws InvalidArgument if it is not rigid within
    // the given tolerance.
    explicit RigidTransform(const Eigen::Matrix4d &m, double tolerance = 1e-9);

    static RigidTransform identity() { return {}; }
    static RigidTransform from_translation(const Eigen::Vector3d &t);
    // Builds from R and t, without checking R.
    static RigidTransform from_parts_unchecked(const Eigen::Matrix3d &r, const Eigen::Vector3d &t);

    const Eigen::Matrix4d &matrix() const { return m_; }
    Eigen::Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
    Eigen::Vector3d translation() const { return m_.topRightCorner<3, 1>(); }

    Point3 operator*(const Point3 &p) const { return rotation() * p + translation(); }

private:
    Eigen::Matrix4d m_;
};

// max(|R^T R - I|_inf, |det R - 1|).
double rotation_residual(const Eigen::Matrix3d &r);

RigidTransform euler_to_transform(const EulerPose &pose);
EulerPose transform_to_euler(const RigidTransform &transform);

RigidTransform compose(const RigidTransform &lhs, const RigidTransform &rhs);
RigidTransform inverse(const RigidTransform &transform);
inline RigidTransform operator*(const RigidTransform &lhs, const RigidTransform &rhs) {
    return compose(lhs, rhs);
}

PointCloud apply_transform(const PointCloud &cloud, const RigidTransform &transform);

constexpr double kGimbalGuard = 1e-6;

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

}  // namespace mireg
