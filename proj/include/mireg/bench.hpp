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

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mireg/align.hpp"
#include "mireg/geometry.hpp"
#include "mireg/scan_io.hpp"

namespace mireg {

// Ground plane at z = 0 plus axis-aligned boxes, sampled uniformly by area.
struct SceneSpec {
    std::uint64_t seed = 1;
    double extent = 80.0;  // side of the square ground patch, meters
    std::size_t n_points = 50000;
    int n_structures = 20;
    double noise_sigma = 0.02;  // meters, perpendicular to the surface

    void validate() const;
};

// Deterministic for a fixed spec. Noise is Gaussian truncated at 4 sigma.
PointCloud synth_scene(const SceneSpec &spec);
// Same structures as synth_scene(spec), points drawn with another seed.
PointCloud synth_scene(const SceneSpec &spec, std::uint64_t sampling_seed);

struct ScanPair {
    PointCloud scan_a;
    PointCloud scan_b;
    RigidTransform truth;  // maps scan B into scan A's frame
};

struct BenchmarkCase {
    PointCloud scan_a;
    PointCloud scan_b;
    RigidTransform truth;
    std::string label;
};

struct PairSpec {
    double crop_radius = 30.0;    // meters, horizontal
    double sensor_height = 1.73;  // sensor origin above the ground plane
    bool independent_sampling = false;
};

// Scan A: scene points within crop_radius of the origin, in a sensor frame
// sensor_height above the ground. Scan B: points within crop_radius of the
// truth translation, in B's sensor frame. With independent_sampling, B comes
// from a second sampling of the same scene.
ScanPair synth_pair(const SceneSpec &spec, const EulerPose &truth, const PairSpec &pair = {});

// n_scenes pairs with scene seeds base.seed, base.seed + 1, ... and seeded
// ground-vehicle truths: tx, ty uniform in [-5, 5] m, yaw in [-15, 15] deg,
// tz = roll = pitch = 0.
std::vector<BenchmarkCase> synthetic_cases(const SceneSpec &base, int n_scenes, const PairSpec &pair = {},
                                           std::uint64_t truth_seed = 11);

// Planar (tx, ty) offset of length exactly dt in a random direction, a yaw
// offset of +-dtheta_deg, and Gaussian leakage into tz / roll / pitch with
// standard deviation 5% of dt and dtheta respectively.
EulerPose perturb_pose(const EulerPose &truth, double dt, double dtheta_deg, std::uint64_t seed);

double translation_error(const RigidTransform &est, const RigidTransform &truth);

struct RotationError {
    double euler_l2_deg = 0.0;  // |euler(inverse(truth) * est)|_2
    double geodesic_deg = 0.0;
    bool degenerate = false;  // Euler extraction failed; euler_l2_deg holds the geodesic angle
};

RotationError rotation_error(const RigidTransform &est, const RigidTransform &truth);

struct PerturbationSpec {
    std::vector<double> translation_magnitudes;  // meters
    std::vector<double> rotation_magnitudes;     // degrees
    int trials_per_magnitude = 1;
    std::uint64_t seed = 7;
    // Yaw offset that accompanies each translation class, degrees.
    double yaw_with_translation_deg = 0.0;
    // Planar offset that accompanies each rotation class, meters.
    double translation_with_rotation_m = 0.0;

    void validate() const;
};

struct TrialRecord {
    std::string magnitude;  // "<m>m" for translation classes, "<deg>deg" for rotation classes
    int trial = 0;
    double init_terr_m = 0.0;
    double final_terr_m = 0.0;
    double init_rerr_deg = 0.0;
    double final_rerr_deg = 0.0;
    double geodesic_rerr_deg = 0.0;
    int iterations = 0;
    double wall_s = 0.0;
    bool converged = false;
};

std::string magnitude_label(double value, const std::string &unit);

// Runs every magnitude x trial; trial t uses case t % cases.size(). Failed
// trials become non-converged rows with the initial error as final error.
// Records come back ordered by (class, trial) whatever the worker count.
std::vector<TrialRecord> run_benchmark(const std::vector<BenchmarkCase> &cases, const PerturbationSpec &pert,
                                       const AlignmentConfig &cfg, unsigned jobs = 1);

struct ColumnSummary {
    double mean = 0.0, median = 0.0, q25 = 0.0, q75 = 0.0;
};

struct MagnitudeSummary {
    std::string magnitude;
    std::size_t trials = 0;
    std::map<std::string, ColumnSummary> columns;  // keyed by error column name
};

// Quantiles interpolate linearly between order statistics.
double quantile(std::vector<double> values, double q);
std::vector<MagnitudeSummary> summarize(const std::vector<TrialRecord> &records);

extern const char *const kTrialCsvHeader;
void write_trials_csv(std::ostream &out, const std::vector<TrialRecord> &records);
std::vector<TrialRecord> read_trials_csv(std::istream &in);
void write_summary_csv(std::ostream &out, const std::vector<MagnitudeSummary> &summary);

struct RuntimeInvariance {
    std::map<std::string, double> mean_wall_s;
    double ratio = 1.0;  // max / min of the class means
};

// Throws InvalidArgument with fewer than three magnitude classes.
RuntimeInvariance runtime_invariance_check(const std::vector<TrialRecord> &records);

// Scan pairs i < j from a KITTI-style sequence directory (NNNNNN.bin) whose
// sensor positions are between min_dist and max_dist apart.
std::vector<BenchmarkCase> kitti_cases(const std::filesystem::path &scan_dir, const PoseTrack &track,
                                       std::size_t max_pairs, double min_dist = 1.0, double max_dist = 10.0);

}  // namespace mireg
