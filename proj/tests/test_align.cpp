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

#include <doctest.h>

#include <json.hpp>

#include "mireg/align.hpp"
#include "mireg/bench.hpp"
#include "mireg/errors.hpp"

using namespace mireg;

namespace {

const SceneSpec &scene() {
    static const SceneSpec spec{};
    return spec;
}

const ScanPair &pair_10deg() {
    static const ScanPair pair = synth_pair(scene(), {4, 2, 0, 0, 0, deg2rad(10)});
    return pair;
}

void check_close(const RigidTransform &est, const RigidTransform &truth, double t_tol, double r_tol_deg) {
    CHECK(translation_error(est, truth) < t_tol);
    CHECK(rotation_error(est, truth).euler_l2_deg < r_tol_deg);
}

}  // namespace

TEST_CASE("self alignment stays at identity") {
    const PointCloud a = synth_scene(scene());
    const AlignmentConfig cfg;
    const AlignmentReport r = align(a, a, RigidTransform::identity(), cfg);
    check_close(r.estimated, RigidTransform::identity(), 0.05, 0.5);
    const MIResult at = mi_at(a, a, {}, cfg);
    CHECK(at.mi == doctest::Approx(at.h_x).epsilon(1e-12));
    CHECK(at.h_x == doctest::Approx(at.h_y).epsilon(1e-12));
}

TEST_CASE("recovers a 4 m / 10 degree offset from identity") {
    const ScanPair &p = pair_10deg();
    const AlignmentConfig cfg;
    const AlignmentReport r = align(p.scan_a, p.scan_b, RigidTransform::identity(), cfg);
    check_close(r.estimated, p.truth, 0.5, 2.0);
    CHECK(r.final_mi >= r.initial_mi - 1e-12);

    SUBCASE("report consistency") {
        CHECK((r.estimated.matrix() - euler_to_transform(r.estimated_pose).matrix()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(r.final_mi == *std::max_element(r.mi_trace.begin(), r.mi_trace.end()));
        CHECK(std::abs(mi_at(p.scan_a, p.scan_b, r.estimated_pose, cfg).mi - r.final_mi) < 1e-12);
        const auto json = nlohmann::json::parse(report_to_json(r, cfg));
        CHECK(json.at("final_mi").get<double>() == r.final_mi);
        CHECK(json.at("estimated_matrix").size() == 4);
        CHECK(json.at("config").at("feature") == "varz");
    }
}

TEST_CASE("stable at the optimum and deterministic") {
    const ScanPair &p = pair_10deg();
    const AlignmentConfig cfg;
    const AlignmentReport r = align(p.scan_a, p.scan_b, p.truth, cfg);
    check_close(r.estimated, p.truth, 0.25, 1.0);
    CHECK(r.final_mi >= r.initial_mi - 1e-12);
    for (std::size_t i = 1; i < r.mi_trace.size(); ++i) CHECK(r.mi_trace[i] >= r.mi_trace[i - 1]);

    const AlignmentReport again = align(p.scan_a, p.scan_b, p.truth, cfg);
    CHECK(again.estimated_pose.as_vector() == r.estimated_pose.as_vector());
    CHECK(again.final_mi == r.final_mi);
    CHECK(again.evaluations == r.evaluations);
}

TEST_CASE("sweeps peak at the truth") {
    const ScanPair &p = pair_10deg();
    const EulerPose truth = transform_to_euler(p.truth);
    const AlignmentConfig cfg;
    const auto yaw = sweep(p.scan_a, p.scan_b, truth, PoseAxis::Rz, deg2rad(-20), deg2rad(20), 81, cfg);
    const auto best_yaw = std::max_element(yaw.begin(), yaw.end(), [](auto &a, auto &b) { return a.mi < b.mi; });
    CHECK(std::abs(rad2deg(best_yaw->value - truth.rz)) <= 0.5 + 1e-9);

    const PointCloud a = synth_scene(scene());
    const auto tx = sweep(a, a, {}, PoseAxis::Tx, -10, 10, 81, cfg);
    const auto best_tx = std::max_element(tx.begin(), tx.end(), [](auto &a, auto &b) { return a.mi < b.mi; });
    CHECK(std::abs(best_tx->value) <= 0.25 + 1e-9);
    for (const auto &s : tx) CHECK(s.mi <= best_tx->mi);

    CHECK(sweep(a, a, {}, PoseAxis::Ty, 0, 0, 1, cfg).size() == 1);
    CHECK_THROWS_AS(sweep(a, a, {}, PoseAxis::Ty, 1, 0, 3, cfg), InvalidArgument);
}

TEST_CASE("errors") {
    const PointCloud a = synth_scene(scene());
    PointCloud far = a;
    for (auto &pt : far.points) pt.x() += 5000.0;
    CHECK_THROWS_AS(align(a, far, RigidTransform::identity(), AlignmentConfig{}), NoOverlap);
    CHECK_THROWS_AS(mi_at(a, far, {}, AlignmentConfig{}), EmptyOverlap);
    CHECK_THROWS_AS(align(a, PointCloud{}, RigidTransform::identity(), AlignmentConfig{}), InvalidArgument);

    AlignmentConfig mismatch;
    mismatch.feature = FeatureKind::Count;
    CHECK_THROWS_AS(align(a, a, RigidTransform::identity(), mismatch), ConfigError);
    AlignmentConfig bad_grid;
    bad_grid.grid.resolution = -1.0;
    CHECK_THROWS_AS(align(a, a, RigidTransform::identity(), bad_grid), ConfigError);
    CHECK(parse_pose_axis("ry") == PoseAxis::Ry);
    CHECK_THROWS_AS(parse_pose_axis("yaw"), InvalidArgument);
}
