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

#include <string>
#include <vector>

#include "mireg/geometry.hpp"
#include "mireg/mi.hpp"
#include "mireg/optim.hpp"
#include "mireg/voxel.hpp"

namespace mireg {

struct AlignmentConfig {
    GridSpec grid;  // 1 m voxels anchored at scan A's origin
    FeatureKind feature = FeatureKind::VarZ;
    BinningSpec binning = BinningSpec::defaults(FeatureKind::VarZ);
    SimplexConfig simplex;
    bool phi_enabled = true;
    Execution execution = Execution::Parallel;

    // Defaults with the binning matched to the feature.
    static AlignmentConfig for_feature(FeatureKind kind);
    void validate() const;
    ObjectiveOptions objective_options() const { return {phi_enabled, execution}; }
};

struct AlignmentReport {
    RigidTransform estimated;
    EulerPose estimated_pose;
    EulerPose initial_pose;
    double initial_mi = 0.0;
    double final_mi = 0.0;
    std::vector<double> mi_trace;  // best-so-far MI per iteration
    std::vector<IterationTrace> optimizer_trace;
    int iterations = 0;
    int evaluations = 0;
    double wall_time = 0.0;  // seconds
    Termination termination = Termination::MaxIterations;

    bool converged() const { return termination != Termination::MaxIterations; }
};

// Scan A's features are computed once; every evaluation moves scan B only.
class MIObjective {
public:
    MIObjective(const PointCloud &scan_a, const PointCloud &scan_b, const AlignmentConfig &cfg);

    // kWorstObjective when the pose leaves no overlap.
    double operator()(const EulerPose &pose) const;
    // Throws EmptyOverlap when the pose leaves no overlap.
    Evaluation evaluate(const EulerPose &pose) const;

    const FeatureMap &features_a() const { return features_a_; }

private:
    const PointCloud &scan_b_;
    AlignmentConfig cfg_;
    FeatureMap features_a_;
};

// Estimates T such that T * scan_b lines up with scan_a, starting from
// initial. Throws NoOverlap if no evaluated pose overlapped, ConfigError for
// an invalid config.
AlignmentReport align(const PointCloud &scan_a, const PointCloud &scan_b, const RigidTransform &initial,
                      const AlignmentConfig &cfg);

// One objective evaluation with the entropy breakdown. Throws EmptyOverlap.
MIResult mi_at(const PointCloud &scan_a, const PointCloud &scan_b, const EulerPose &pose,
               const AlignmentConfig &cfg);

enum class PoseAxis { Tx, Ty, Tz, Rx, Ry, Rz };

PoseAxis parse_pose_axis(const std::string &name);
std::string to_string(PoseAxis axis);
EulerPose with_axis(EulerPose pose, PoseAxis axis, double value);

struct SweepSample {
    double value = 0.0;  // meters or radians
    double mi = kWorstObjective;
};

// MI along one axis over `steps` uniformly spaced values in [lo, hi], the
// other components held at base. A single step samples lo.
std::vector<SweepSample> sweep(const PointCloud &scan_a, const PointCloud &scan_b, const EulerPose &base,
                               PoseAxis axis, double lo, double hi, int steps, const AlignmentConfig &cfg);

// JSON with every report field (angles in radians) and the estimate as a
// KITTI-style 12-float pose line.
std::string report_to_json(const AlignmentReport &report, const AlignmentConfig &cfg);

}  // namespace mireg
