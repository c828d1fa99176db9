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

#include <algorithm>
#include <random>
#include <sstream>

#include "mireg/errors.hpp"
#include "mireg/voxel.hpp"

using namespace mireg;

namespace {

PointCloud cloud_of(std::initializer_list<Point3> pts) {
    PointCloud c;
    c.points = pts;
    return c;
}

PointCloud random_cloud(std::mt19937_64 &rng, std::size_t n, double extent) {
    std::uniform_real_distribution<double> u(-extent, extent);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(u(rng), u(rng), u(rng) * 0.2);
    return c;
}

VoxelBox box(int lo, int hi) { return {{lo, lo, lo}, {hi, hi, hi}, false}; }

}  // namespace

TEST_CASE("key packing preserves order and round trips") {
    std::mt19937_64 rng(3);
    const std::int32_t lim = static_cast<std::int32_t>(kVoxelIndexLimit);
    std::uniform_int_distribution<std::int32_t> u(-lim, lim - 1);
    std::vector<VoxelKey> keys{{-lim, -lim, -lim}, {lim - 1, lim - 1, lim - 1}, {0, 0, 0}, {-1, 0, 0}};
    for (int i = 0; i < 2000; ++i) keys.push_back({u(rng), u(rng), u(rng)});
    for (const auto &k : keys) CHECK(unpack(pack(k)) == k);
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) CHECK((keys[i] < keys[i + 1]) == (pack(keys[i]) < pack(keys[i + 1])));
}

TEST_CASE("voxelize examples") {
    const GridSpec grid;
    const VoxelMap m = voxelize(cloud_of({{0.1, 0.1, 0.1}, {0.9, 0.9, 0.9}}), grid);
    REQUIRE(m.voxel_count() == 1);
    CHECK(unpack(m.keys[0]) == VoxelKey{0, 0, 0});
    CHECK(m.points_in(0).size() == 2);

    CHECK(voxel_key({-0.5, 0, 0}, grid) == VoxelKey{-1, 0, 0});
    CHECK(voxel_key({-1.0, 2.0, -0.0}, grid) == VoxelKey{-1, 2, 0});

    GridSpec shifted{Point3(0.5, 0, 0), 0.25};
    CHECK(voxel_key({0.74, 0.3, -0.01}, shifted) == VoxelKey{0, 1, -1});

    CHECK_THROWS_AS(voxelize(PointCloud{}, grid), InvalidArgument);
    try {
        voxelize(cloud_of({{0, 0, 0}, {0, 0, 0}, {5e6, 0, 0}}), grid);
        FAIL("expected out-of-bounds");
    } catch (const OutOfBounds &e) {
        CHECK(std::string(e.what()).find("point 2") != std::string::npos);
    }
    CHECK_THROWS_AS(GridSpec({Point3::Zero(), 0.0}).validate(), ConfigError);
}

TEST_CASE("every point lands in exactly one voxel") {
    std::mt19937_64 rng(11);
    const PointCloud c = random_cloud(rng, 1000, 6.0);
    const VoxelMap m = voxelize(c, GridSpec{});
    CHECK(m.offsets.back() == c.size());
    std::vector<std::uint32_t> all = m.point_indices;
    std::sort(all.begin(), all.end());
    for (std::uint32_t i = 0; i < all.size(); ++i) REQUIRE(all[i] == i);
    CHECK(std::is_sorted(m.keys.begin(), m.keys.end()));
    CHECK(std::adjacent_find(m.keys.begin(), m.keys.end()) == m.keys.end());
    for (std::size_t v = 0; v < m.voxel_count(); ++v) {
        for (const auto i : m.points_in(v)) CHECK(pack(voxel_key(c.points[i], GridSpec{})) == m.keys[v]);
        CHECK(m.bounds.contains(unpack(m.keys[v])));
    }
}

TEST_CASE("feature examples") {
    const FeatureMap varz = build_feature_map(cloud_of({{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}}), GridSpec{}, FeatureKind::VarZ);
    CHECK(varz.values.at(0) == 0.0);

    // z = {1, 3} in one 4 m voxel: mean 2, population variance 1
    const FeatureMap two = build_feature_map(cloud_of({{0.5, 0.5, 1.0}, {0.5, 0.5, 3.0}}), GridSpec{Point3::Zero(), 4.0},
                                             FeatureKind::VarZ);
    REQUIRE(two.size() == 1);
    CHECK(two.values[0] == doctest::Approx(1.0).epsilon(1e-15));

    const FeatureMap single = build_feature_map(cloud_of({{0.2, 0.2, 0.7}}), GridSpec{}, FeatureKind::VarZ);
    CHECK(single.values.at(0) == 0.0);

    PointCloud seven;
    for (int i = 0; i < 7; ++i) seven.points.emplace_back(0.1 * i, 0.5, 0.5);
    const FeatureMap count = build_feature_map(seven, GridSpec{}, FeatureKind::Count);
    REQUIRE(count.size() == 1);
    CHECK(count.values[0] == 7.0);
    CHECK(count.find({0, 0, 0}) == 7.0);
    CHECK_FALSE(count.find({1, 0, 0}));
}

TEST_CASE("feature map invariants") {
    std::mt19937_64 rng(21);
    const PointCloud c = random_cloud(rng, 5000, 10.0);
    const FeatureMap counts = build_feature_map(c, GridSpec{}, FeatureKind::Count);
    double total = 0.0;
    for (const double v : counts.values) total += v;
    CHECK(total == static_cast<double>(c.size()));

    const FeatureMap varz = build_feature_map(c, GridSpec{}, FeatureKind::VarZ);
    REQUIRE(varz.keys == counts.keys);
    for (std::size_t i = 0; i < varz.size(); ++i) {
        CHECK(varz.values[i] >= 0.0);
        CHECK(std::isfinite(varz.values[i]));
        if (counts.values[i] == 1.0) CHECK(varz.values[i] == 0.0);
    }
    VoxelBox tight;
    for (const auto k : varz.keys) tight.extend(unpack(k));
    CHECK(tight == varz.bounds);
}

TEST_CASE("grid-multiple translation permutes keys and keeps features") {
    std::mt19937_64 rng(8);
    const PointCloud c = random_cloud(rng, 3000, 8.0);
    const double res = 0.5;
    PointCloud moved = c;
    const Eigen::Vector3d shift(3 * res, -5 * res, 2 * res);
    for (auto &p : moved.points) p += shift;
    for (const auto kind : {FeatureKind::VarZ, FeatureKind::Count}) {
        const FeatureMap a = build_feature_map(c, GridSpec{Point3::Zero(), res}, kind);
        const FeatureMap b = build_feature_map(moved, GridSpec{Point3::Zero(), res}, kind);
        REQUIRE(a.size() == b.size());
        std::vector<double> va = a.values, vb = b.values;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const VoxelKey ka = unpack(a.keys[i]);
            CHECK(unpack(b.keys[i]) == VoxelKey{ka.ix + 3, ka.iy - 5, ka.iz + 2});
        }
        std::sort(va.begin(), va.end());
        std::sort(vb.begin(), vb.end());
        for (std::size_t i = 0; i < va.size(); ++i) CHECK(va[i] == doctest::Approx(vb[i]).epsilon(1e-9));
    }
}

TEST_CASE("overlap examples") {
    const OverlapRegion o = compute_overlap(box(0, 10), box(5, 15));
    CHECK(o == box(5, 10));
    CHECK(overlap_voxel_count(o) == 216);
    CHECK(compute_overlap(box(0, 2), box(5, 7)).empty);
    CHECK(overlap_voxel_count(compute_overlap(box(0, 2), box(5, 7))) == 0);
    CHECK(compute_overlap(box(3, 9), box(3, 9)) == box(3, 9));
    CHECK(overlap_voxel_count(box(0, 0)) == 1);
    CHECK(compute_overlap(VoxelBox::empty_box(), box(0, 3)).empty);

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> u(-10, 10);
    for (int i = 0; i < 200; ++i) {
        VoxelBox a, b;
        for (int k = 0; k < 2; ++k) {
            a.extend({u(rng), u(rng), u(rng)});
            b.extend({u(rng), u(rng), u(rng)});
        }
        CHECK(compute_overlap(a, b) == compute_overlap(b, a));
    }
}

TEST_CASE("serial and parallel voxelization agree") {
    std::mt19937_64 rng(12);
    const PointCloud c = random_cloud(rng, 60000, 30.0);
    const VoxelMap s = voxelize(c, GridSpec{}, Execution::Serial);
    const VoxelMap p = voxelize(c, GridSpec{}, Execution::Parallel);
    CHECK(s.keys == p.keys);
    CHECK(s.offsets == p.offsets);
    CHECK(s.point_indices == p.point_indices);
    CHECK(s.bounds == p.bounds);
}

TEST_CASE("feature csv") {
    const FeatureMap m = build_feature_map(cloud_of({{-0.5, 0.5, 0.5}, {1.5, 0.5, 0.5}}), GridSpec{}, FeatureKind::Count);
    std::ostringstream out;
    write_feature_csv(out, m);
    CHECK(out.str() == "ix,iy,iz,feature\n-1,0,0,1\n1,0,0,1\n");
    CHECK(parse_feature_kind("n") == FeatureKind::Count);
    CHECK_THROWS_AS(parse_feature_kind("mean"), InvalidArgument);
}
