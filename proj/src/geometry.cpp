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

#include "mireg/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

#include "mireg/errors.hpp"

namespace mireg {

void validate(const PointCloud &cloud) {
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (!cloud.points[i].allFinite()) {
            throw InvalidArgument("point " + std::to_string(i) + " has a non-finite coordinate");
        }
    }
    if (cloud.intensity && cloud.intensity->size() != cloud.points.size()) {
        throw InvalidArgument("intensity length " + std::to_string(cloud.intensity->size()) +
                              " does not match point count " + std::to_string(cloud.points.size()));
    }
}

EulerPose::Vector6 EulerPose::as_vector() const {
    Vector6 v;
    v << tx, ty, tz, rx, ry, rz;
    return v;
}

EulerPose EulerPose::from_vector(const Vector6 &v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

bool EulerPose::is_finite() const { return as_vector().allFinite(); }

EulerPose EulerPose::normalized() const {
    EulerPose out = *this;
    out.rx = wrap_angle(rx);
    out.ry = wrap_angle(ry);
    out.rz = wrap_angle(rz);
    return out;
}

double wrap_angle(double rad) {
    double wrapped = std::remainder(rad, 2.0 * std::numbers::pi);
    if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
    return wrapped;
}

double rotation_residual(const Eigen::Matrix3d &r) {
    const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return std::max(ortho, std::abs(r.determinant() - 1.0));
}

RigidTransform::RigidTransform(const Eigen::Matrix4d &m, double tolerance) : m_(m) {
    if (!m.allFinite()) throw InvalidArgument("transform has non-finite entries");
    if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
        throw InvalidArgument("transform last row must be [0 0 0 1]");
    }
    if (rotation_residual(m.topLeftCorner<3, 3>()) > tolerance) {
        throw InvalidArgument("transform rotation block is not orthonormal");
    }
}

RigidTransform RigidTransform::from_translation(const Eigen::Vector3d &t) {
    return from_parts_unchecked(Eigen::Matrix3d::Identity(), t);
}

RigidTransform RigidTransform::from_parts_unchecked(const Eigen::Matrix3d &r,
                                                    const Eigen::Vector3d &t) {
    RigidTransform out;
    out.m_.topLeftCorner<3, 3>() = r;
    out.m_.topRightCorner<3, 1>() = t;
    return out;
}

RigidTransform euler_to_transform(const EulerPose &pose) {
    if (!pose.is_finite()) throw InvalidArgument("pose has a non-finite component");
    const Eigen::Matrix3d r = (Eigen::AngleAxisd(pose.rz, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(pose.ry, Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(pose.rx, Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
    return RigidTransform::from_parts_unchecked(r, {pose.tx, pose.ty, pose.tz});
}

EulerPose transform_to_euler(const RigidTransform &transform) {
    const Eigen::Matrix3d r = transform.rotation();
    const double pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
    if (std::abs(pitch) >= std::numbers::pi / 2.0 - kGimbalGuard) {
        throw DegenerateOrientation("pitch " + std::to_string(pitch) +
                                    " rad is within the gimbal-lock guard");
    }
    const Eigen::Vector3d t = transform.translation();
    return {t.x(), t.y(), t.z(), std::atan2(r(2, 1), r(2, 2)), pitch, std::atan2(r(1, 0), r(0, 0))};
}

RigidTransform compose(const RigidTransform &lhs, const RigidTransform &rhs) {
    const Eigen::Matrix3d r = lhs.rotation() * rhs.rotation();
    return RigidTransform::from_parts_unchecked(r, lhs.rotation() * rhs.translation() +
                                                       lhs.translation());
}

RigidTransform inverse(const RigidTransform &transform) {
    const Eigen::Matrix3d rt = transform.rotation().transpose();
    return RigidTransform::from_parts_unchecked(rt, -rt * transform.translation());
}

PointCloud apply_transform(const PointCloud &cloud, const RigidTransform &transform) {
    validate(cloud);
    PointCloud out;
    out.intensity = cloud.intensity;
    out.points.reserve(cloud.points.size());
    const Eigen::Matrix3d r = transform.rotation();
    const Eigen::Vector3d t = transform.translation();
    for (const auto &p : cloud.points) out.points.emplace_back(r * p + t);
    return out;
}

}  // namespace mireg
