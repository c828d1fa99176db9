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

#include "mireg/align.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>

#include "mireg/errors.hpp"
#include "mireg/scan_io.hpp"

namespace mireg {

AlignmentConfig AlignmentConfig::for_feature(FeatureKind kind) {
    AlignmentConfig cfg;
    cfg.feature = kind;
    cfg.binning = BinningSpec::defaults(kind);
    return cfg;
}

void AlignmentConfig::validate() const {
    grid.validate();
    binning.validate();
    simplex.validate();
    if (binning.kind != feature) throw ConfigError("binning spec feature kind does not match the alignment feature");
}

MIObjective::MIObjective(const PointCloud &scan_a, const PointCloud &scan_b, const AlignmentConfig &cfg)
    : scan_b_(scan_b), cfg_(cfg) {
    cfg_.validate();
    validate(scan_a);
    validate(scan_b);
    if (scan_a.empty() || scan_b.empty()) throw InvalidArgument("registration inputs must be non-empty");
    features_a_ = build_feature_map(scan_a, cfg_.grid, cfg_.feature, cfg_.execution);
}

double MIObjective::operator()(const EulerPose &pose) const {
    return mi_objective(features_a_, scan_b_, pose, cfg_.grid, cfg_.binning, cfg_.objective_options());
}

Evaluation MIObjective::evaluate(const EulerPose &pose) const {
    return evaluate_pose(features_a_, scan_b_, pose, cfg_.grid, cfg_.binning, cfg_.objective_options());
}

AlignmentReport align(const PointCloud &scan_a, const PointCloud &scan_b, const RigidTransform &initial,
                      const AlignmentConfig &cfg) {
    const auto start = std::chrono::steady_clock::now();
    const MIObjective objective(scan_a, scan_b, cfg);

    AlignmentReport report;
    report.initial_pose = transform_to_euler(initial);
    const auto f = [&](const Vector6 &x) { return objective(EulerPose::from_vector(x)); };
    const OptimResult result = nelder_mead_maximize(f, report.initial_pose.as_vector(), cfg.simplex);
    if (!std::isfinite(result.best_value)) {
        throw NoOverlap("scans do not overlap at the initial pose or at any pose probed by the optimizer");
    }

    report.estimated_pose = EulerPose::from_vector(result.best);
    report.estimated = euler_to_transform(report.estimated_pose);
    report.initial_mi = objective(report.initial_pose);
    report.final_mi = result.best_value;
    report.optimizer_trace = result.trace;
    report.mi_trace.reserve(result.trace.size());
    for (const auto &t : result.trace) report.mi_trace.push_back(t.best);
    report.iterations = result.iterations;
    report.evaluations = result.evaluations;
    report.termination = result.reason;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

MIResult mi_at(const PointCloud &scan_a, const PointCloud &scan_b, const EulerPose &pose,
               const AlignmentConfig &cfg) {
    return MIObjective(scan_a, scan_b, cfg).evaluate(pose).mi;
}

PoseAxis parse_pose_axis(const std::string &name) {
    if (name == "tx") return PoseAxis::Tx;
    if (name == "ty") return PoseAxis::Ty;
    if (name == "tz") return PoseAxis::Tz;
    if (name == "rx") return PoseAxis::Rx;
    if (name == "ry") return PoseAxis::Ry;
    if (name == "rz") return PoseAxis::Rz;
    throw InvalidArgument("unknown axis '" + name + "' (expected tx, ty, tz, rx, ry or rz)");
}

std::string to_string(PoseAxis axis) {
    static constexpr const char *names[] = {"tx", "ty", "tz", "rx", "ry", "rz"};
    return names[static_cast<int>(axis)];
}

EulerPose with_axis(EulerPose pose, PoseAxis axis, double value) {
    Vector6 v = pose.as_vector();
    v[static_cast<int>(axis)] = value;
    return EulerPose::from_vector(v);
}

std::vector<SweepSample> sweep(const PointCloud &scan_a, const PointCloud &scan_b, const EulerPose &base,
                               PoseAxis axis, double lo, double hi, int steps, const AlignmentConfig &cfg) {
    if (steps < 1) throw InvalidArgument("sweep needs at least one step");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw InvalidArgument("invalid sweep range");
    const MIObjective objective(scan_a, scan_b, cfg);
    std::vector<SweepSample> samples;
    samples.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double value = steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1);
        samples.push_back({value, objective(with_axis(base, axis, value))});
    }
    return samples;
}

namespace {

nlohmann::json pose_json(const EulerPose &pose) {
    return {{"tx", pose.tx}, {"ty", pose.ty}, {"tz", pose.tz}, {"rx", pose.rx}, {"ry", pose.ry}, {"rz", pose.rz}};
}

}  // namespace

std::string report_to_json(const AlignmentReport &report, const AlignmentConfig &cfg) {
    nlohmann::json matrix = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 4; ++c) row.push_back(report.estimated.matrix()(r, c));
        matrix.push_back(row);
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const double v : report.mi_trace) trace.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());

    const auto &steps = cfg.simplex.initial_steps;
    nlohmann::json out = {
        {"estimated_matrix", matrix},
        {"estimated_kitti", to_kitti_pose_line(report.estimated)},
        {"estimated_pose", pose_json(report.estimated_pose.normalized())},
        {"initial_pose", pose_json(report.initial_pose.normalized())},
        {"initial_mi", std::isfinite(report.initial_mi) ? nlohmann::json(report.initial_mi) : nlohmann::json()},
        {"final_mi", report.final_mi},
        {"mi_trace", trace},
        {"iterations", report.iterations},
        {"evaluations", report.evaluations},
        {"wall_time_s", report.wall_time},
        {"termination", to_string(report.termination)},
        {"converged", report.converged()},
        {"config",
         {{"feature", to_string(cfg.feature)},
          {"resolution_m", cfg.grid.resolution},
          {"bins", cfg.binning.bins},
          {"upper_clamp", cfg.binning.upper_clamp},
          {"phi", cfg.phi_enabled},
          {"simplex_steps", {steps[0], steps[1], steps[2], steps[3], steps[4], steps[5]}},
          {"max_iterations", cfg.simplex.max_iterations},
          {"f_tol", cfg.simplex.f_tol},
          {"x_tol", cfg.simplex.x_tol},
          {"restarts", cfg.simplex.restarts}}},
    };
    return out.dump(2);
}

}  // namespace mireg
