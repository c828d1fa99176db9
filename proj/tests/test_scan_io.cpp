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

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "mireg/errors.hpp"
#include "mireg/scan_io.hpp"

namespace fs = std::filesystem;
using namespace mireg;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mireg_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string &name) const { return path / name; }
};

void write_bytes(const fs::path &p, const std::vector<char> &bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path &p, const std::string &text) { std::ofstream(p) << text; }

std::vector<char> encode_le(const std::vector<float> &values) {
    static_assert(std::endian::native == std::endian::little);
    std::vector<char> bytes(values.size() * 4);
    std::memcpy(bytes.data(), values.data(), bytes.size());
    return bytes;
}

PointCloud random_cloud(std::mt19937_64 &rng, std::size_t n, bool intensity) {
    std::uniform_real_distribution<float> u(-80.0f, 80.0f), i01(0.0f, 1.0f);
    PointCloud c;
    if (intensity) c.intensity.emplace();
    for (std::size_t k = 0; k < n; ++k) {
        c.points.emplace_back(u(rng), u(rng), u(rng));
        if (intensity) c.intensity->push_back(i01(rng));
    }
    return c;
}

RigidTransform random_transform(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> t(-100, 100), a(-3, 3), p(-1.2, 1.2);
    return euler_to_transform({t(rng), t(rng), t(rng), a(rng), p(rng), a(rng)});
}

}  // namespace

TEST_CASE("kitti bin examples") {
    TempDir dir;
    write_bytes(dir / "two.bin", encode_le({1, 2, 3, 0.5f, 4, 5, 6, 0.1f}));
    const PointCloud c = load_kitti_bin(dir / "two.bin");
    REQUIRE(c.size() == 2);
    CHECK(c.points[0] == Point3(1, 2, 3));
    CHECK(c.points[1] == Point3(4, 5, 6));
    REQUIRE(c.intensity);
    CHECK((*c.intensity)[0] == 0.5f);
    CHECK((*c.intensity)[1] == 0.1f);

    write_bytes(dir / "empty.bin", {});
    CHECK(load_kitti_bin(dir / "empty.bin").empty());

    write_bytes(dir / "bad.bin", std::vector<char>(17, 0));
    try {
        load_kitti_bin(dir / "bad.bin");
        FAIL("expected a format error");
    } catch (const FormatError &e) {
        CHECK(std::string(e.what()).find("16") != std::string::npos);
    }

    CHECK_THROWS_AS(load_kitti_bin(dir / "missing.bin"), IoError);
}

TEST_CASE("xyz text examples") {
    TempDir dir;
    write_text(dir / "a.xyz", "0 0 0\n1 1 1\n");
    CHECK(load_xyz_text(dir / "a.xyz").size() == 2);

    write_text(dir / "c.xyz", "# header\n\n1 2 3 0.5\n4 5 6 0.25 # trailing\n");
    const PointCloud c = load_xyz_text(dir / "c.xyz");
    REQUIRE(c.size() == 2);
    CHECK(c.points[1] == Point3(4, 5, 6));
    REQUIRE(c.intensity);
    CHECK((*c.intensity)[1] == 0.25f);

    write_text(dir / "bad.xyz", "a b c\n");
    try {
        load_xyz_text(dir / "bad.xyz");
        FAIL("expected a format error");
    } catch (const FormatError &e) {
        CHECK(std::string(e.what()).find(":1") != std::string::npos);
    }
    write_text(dir / "mixed.xyz", "1 2 3\n1 2 3 4\n");
    CHECK_THROWS_AS(load_xyz_text(dir / "mixed.xyz"), FormatError);
}

TEST_CASE("ply header handling") {
    TempDir dir;
    write_text(dir / "a.ply",
               "ply\nformat ascii 1.0\ncomment hi\nelement vertex 2\nproperty float x\nproperty float y\n"
               "property float z\nproperty uchar red\nelement face 0\nproperty list uchar int vertex_indices\n"
               "end_header\n1 2 3 255\n4 5 6 0\n");
    const PointCloud c = load_ply_ascii(dir / "a.ply");
    REQUIRE(c.size() == 2);
    CHECK(c.points[1] == Point3(4, 5, 6));
    CHECK_FALSE(c.intensity);

    write_text(dir / "bin.ply", "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n");
    CHECK_THROWS_AS(load_ply_ascii(dir / "bin.ply"), FormatError);
    write_text(dir / "short.ply",
               "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
               "end_header\n1 2 3\n");
    CHECK_THROWS_AS(load_ply_ascii(dir / "short.ply"), FormatError);
}

TEST_CASE("cloud round trips are float32 exact") {
    TempDir dir;
    std::mt19937_64 rng(5);
    for (const bool with_i : {false, true}) {
        const PointCloud c = random_cloud(rng, 300, with_i);
        for (const char *name : {"r.bin", "r.xyz", "r.ply"}) {
            const fs::path p = dir / name;
            save_cloud(p, c, format_from_extension(p));
            const PointCloud back = load_cloud(p);
            REQUIRE(back.size() == c.size());
            CHECK(back.points == c.points);
            if (with_i || std::string(name) == "r.bin") {
                REQUIRE(back.intensity);
                if (with_i) CHECK(*back.intensity == *c.intensity);
            }
        }
    }
}

TEST_CASE("kitti bin round trip is bit exact") {
    TempDir dir;
    std::vector<float> raw{1.1f, -2.2f, 3.3f, 0.7f, 1e-30f, -0.0f, 7e20f, 0.0f};
    write_bytes(dir / "in.bin", encode_le(raw));
    save_kitti_bin(dir / "out.bin", load_kitti_bin(dir / "in.bin"));
    std::ifstream a(dir / "in.bin", std::ios::binary), b(dir / "out.bin", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("kitti pose examples") {
    TempDir dir;
    write_text(dir / "id.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n");
    const PoseTrack id = load_kitti_poses(dir / "id.txt");
    REQUIRE(id.size() == 1);
    CHECK(id[0].matrix() == Eigen::Matrix4d::Identity());

    write_text(dir / "eleven.txt", "1 0 0 0 0 1 0 0 0 0 1\n");
    try {
        load_kitti_poses(dir / "eleven.txt");
        FAIL("expected a format error");
    } catch (const FormatError &e) {
        CHECK(std::string(e.what()).find(":1") != std::string::npos);
    }

    write_text(dir / "skew.txt", "1 0.1 0 0 0 1 0 0 0 0 1 0\n");
    CHECK_THROWS_AS(load_kitti_poses(dir / "skew.txt"), FormatError);

    write_text(dir / "nearly.txt", "1 1e-8 0 0 0 1 0 0 0 0 1 0\n");
    const RigidTransform fixed = load_kitti_poses(dir / "nearly.txt").at(0);
    CHECK(rotation_residual(fixed.rotation()) < 1e-12);

    const PoseTrack five{RigidTransform::from_translation({5, 0, 0})};
    save_kitti_poses(dir / "five.txt", five);
    const PoseTrack back = load_kitti_poses(dir / "five.txt");
    CHECK(back.at(0).matrix() == five[0].matrix());
}

TEST_CASE("relative ground truth on 100 seeded tracks") {
    TempDir dir;
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        PoseTrack track;
        for (int k = 0; k < 6; ++k) track.push_back(random_transform(rng));
        save_kitti_poses(dir / "t.txt", track);
        const PoseTrack back = load_kitti_poses(dir / "t.txt");
        REQUIRE(back.size() == track.size());
        for (std::size_t k = 0; k < track.size(); ++k) {
            CHECK((back[k].matrix() - track[k].matrix()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((relative_ground_truth(back, k, k).matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
                  1e-9);
        }
        const auto rel = [&](std::size_t i, std::size_t j) { return relative_ground_truth(track, i, j); };
        CHECK(((rel(0, 3) * rel(3, 5)).matrix() - rel(0, 5).matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
    const PoseTrack simple{RigidTransform::identity(), RigidTransform::from_translation({3, 0, 0})};
    CHECK(relative_ground_truth(simple, 0, 1).translation().isApprox(Eigen::Vector3d(3, 0, 0)));
    CHECK_THROWS_AS(relative_ground_truth(simple, 0, 2), InvalidArgument);
}
