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

#include "mireg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "mireg/errors.hpp"

namespace mireg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double truncated_normal(std::mt19937_64 &rng, double sigma) {
    if (sigma <= 0.0) return 0.0;
    std::normal_distribution<double> normal(0.0, sigma);
    while (true) {
        const double v = normal(rng);
        if (std::abs(v) <= 4.0 * sigma) return v;
    }
}

struct Box {
    double cx, cy, half_w, half_d, height;
};

// An axis-aligned rectangle to sample: `axis` is the normal direction,
// the other two coordinates span [lo, hi].
struct Patch {
    int axis;
    double offset;
    Eigen::Vector3d lo, hi;
    double area;
};

std::vector<Patch> scene_patches(const SceneSpec &spec) {
    std::mt19937_64 rng(splitmix64(spec.seed));
    std::uniform_real_distribution<double> pos(-0.45 * spec.extent, 0.45 * spec.extent);
    std::uniform_real_distribution<double> half(1.0, 4.0);
    std::uniform_real_distribution<double> height(1.5, 6.0);

    const double e = spec.extent / 2.0;
    std::vector<Patch> patches;
    patches.push_back({2, 0.0, {-e, -e, 0.0}, {e, e, 0.0}, spec.extent * spec.extent});
    for (int s = 0; s < spec.n_structures; ++s) {
        Box b{pos(rng), pos(rng), half(rng), half(rng), height(rng)};
        const double x0 = b.cx - b.half_w, x1 = b.cx + b.half_w;
        const double y0 = b.cy - b.half_d, y1 = b.cy + b.half_d;
        const double wall_x = 2.0 * b.half_d * b.height;  // walls facing +-x
        const double wall_y = 2.0 * b.half_w * b.height;
        patches.push_back({0, x0, {x0, y0, 0.0}, {x0, y1, b.height}, wall_x});
        patches.push_back({0, x1, {x1, y0, 0.0}, {x1, y1, b.height}, wall_x});
        patches.push_back({1, y0, {x0, y0, 0.0}, {x1, y0, b.height}, wall_y});
        patches.push_back({1, y1, {x0, y1, 0.0}, {x1, y1, b.height}, wall_y});
        patches.push_back({2, b.height, {x0, y0, b.height}, {x1, y1, b.height}, 4.0 * b.half_w * b.half_d});
    }
    return patches;
}

}  // namespace

void SceneSpec::validate() const {
    if (!(extent > 0.0)) throw ConfigError("scene extent must be positive");
    if (n_points == 0) throw ConfigError("scene needs at least one point");
    if (n_structures < 0) throw ConfigError("structure count must be non-negative");
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
}

PointCloud synth_scene(const SceneSpec &spec) { return synth_scene(spec, spec.seed); }

PointCloud synth_scene(const SceneSpec &spec, std::uint64_t sampling_seed) {
    spec.validate();
    const std::vector<Patch> patches = scene_patches(spec);
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto &p : patches) cumulative.push_back(total += p.area);

    std::mt19937_64 rng(splitmix64(sampling_seed ^ 0x5CE9E5A3D1B7ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointCloud cloud;
    cloud.points.reserve(spec.n_points);
    for (std::size_t i = 0; i < spec.n_points; ++i) {
        const double pick = unit(rng) * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        const auto &patch = patches[std::min<std::size_t>(it - cumulative.begin(), patches.size() - 1)];
        Eigen::Vector3d p;
        for (int k = 0; k < 3; ++k) p[k] = patch.lo[k] + unit(rng) * (patch.hi[k] - patch.lo[k]);
        p[patch.axis] = patch.offset + truncated_normal(rng, spec.noise_sigma);
        cloud.points.push_back(p);
    }
    return cloud;
}

ScanPair synth_pair(const SceneSpec &spec, const EulerPose &truth, const PairSpec &pair_spec) {
    if (!(pair_spec.crop_radius > 0.0)) throw InvalidArgument("crop radius must be positive");
    if (!std::isfinite(pair_spec.sensor_height)) throw InvalidArgument("sensor height must be finite");
    const PointCloud scene_a = synth_scene(spec);
    const PointCloud scene_b =
        pair_spec.independent_sampling ? synth_scene(spec, splitmix64(spec.seed + 1)) : scene_a;
    const RigidTransform t = euler_to_transform(truth);
    const RigidTransform t_inv = inverse(t);
    const Eigen::Vector2d center_b(truth.tx, truth.ty);
    const Eigen::Vector3d lift(0.0, 0.0, pair_spec.sensor_height);

    ScanPair pair;
    pair.truth = t;
    for (const auto &p : scene_a.points) {
        if (p.head<2>().norm() <= pair_spec.crop_radius) pair.scan_a.points.push_back(p - lift);
    }
    for (const auto &p : scene_b.points) {
        if ((p.head<2>() - center_b).norm() <= pair_spec.crop_radius) {
            pair.scan_b.points.push_back(t_inv * (p - lift));
        }
    }
    return pair;
}

std::vector<BenchmarkCase> synthetic_cases(const SceneSpec &base, int n_scenes, const PairSpec &pair_spec,
                                           std::uint64_t truth_seed) {
    std::vector<BenchmarkCase> cases;
    for (int s = 0; s < n_scenes; ++s) {
        SceneSpec spec = base;
        spec.seed = base.seed + static_cast<std::uint64_t>(s);
        std::mt19937_64 rng(splitmix64(truth_seed ^ splitmix64(spec.seed)));
        std::uniform_real_distribution<double> offset(-5.0, 5.0);
        std::uniform_real_distribution<double> yaw(-15.0, 15.0);
        EulerPose truth;
        truth.tx = offset(rng);
        truth.ty = offset(rng);
        truth.rz = deg2rad(yaw(rng));
        ScanPair pair = synth_pair(spec, truth, pair_spec);
        cases.push_back({std::move(pair.scan_a), std::move(pair.scan_b), pair.truth,
                         "scene" + std::to_string(spec.seed)});
    }
    return cases;
}

EulerPose perturb_pose(const EulerPose &truth, double dt, double dtheta_deg, std::uint64_t seed) {
    if (!(dt >= 0.0) || !(dtheta_deg >= 0.0)) throw InvalidArgument("perturbation magnitudes must be non-negative");
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> direction(0.0, 2.0 * std::numbers::pi);
    std::bernoulli_distribution sign(0.5);
    const double heading = direction(rng);
    const double yaw_sign = sign(rng) ? 1.0 : -1.0;
    const double dtheta = deg2rad(dtheta_deg);
    const auto gauss = [&](double sigma) {
        if (sigma <= 0.0) return 0.0;
        return std::normal_distribution<double>(0.0, sigma)(rng);
    };

    EulerPose out = truth;
    out.tx += dt * std::cos(heading);
    out.ty += dt * std::sin(heading);
    out.rz += yaw_sign * dtheta;
    out.tz += gauss(0.05 * dt);
    out.rx += gauss(0.05 * dtheta);
    out.ry += gauss(0.05 * dtheta);
    return out;
}

double translation_error(const RigidTransform &est, const RigidTransform &truth) {
    return (est.translation() - truth.translation()).norm();
}

RotationError rotation_error(const RigidTransform &est, const RigidTransform &truth) {
    const RigidTransform rel = inverse(truth) * est;
    RotationError out;
    const double c = std::clamp((rel.rotation().trace() - 1.0) / 2.0, -1.0, 1.0);
    out.geodesic_deg = rad2deg(std::acos(c));
    try {
        const EulerPose e = transform_to_euler(rel);
        out.euler_l2_deg = rad2deg(std::sqrt(e.rx * e.rx + e.ry * e.ry + e.rz * e.rz));
    } catch (const DegenerateOrientation &) {
        out.degenerate = true;
        out.euler_l2_deg = out.geodesic_deg;
    }
    return out;
}

void PerturbationSpec::validate() const {
    for (const double m : translation_magnitudes) {
        if (!(m > 0.0)) throw ConfigError("translation magnitudes must be positive");
    }
    for (const double m : rotation_magnitudes) {
        if (!(m > 0.0)) throw ConfigError("rotation magnitudes must be positive");
    }
    if (trials_per_magnitude < 1) throw ConfigError("trials per magnitude must be at least 1");
    if (!(yaw_with_translation_deg >= 0.0) || !(translation_with_rotation_m >= 0.0)) {
        throw ConfigError("companion perturbations must be non-negative");
    }
}

std::string magnitude_label(double value, const std::string &unit) {
    std::ostringstream out;
    out << value << unit;
    return out.str();
}

std::vector<TrialRecord> run_benchmark(const std::vector<BenchmarkCase> &cases, const PerturbationSpec &pert,
                                       const AlignmentConfig &cfg, unsigned jobs) {
    pert.validate();
    cfg.validate();
    struct Task {
        std::string label;
        int trial;
        double dt, dtheta;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    std::uint64_t class_index = 0;
    const auto add_class = [&](const std::string &label, double dt, double dtheta) {
        for (int t = 0; t < pert.trials_per_magnitude; ++t) {
            const std::uint64_t seed = splitmix64(pert.seed ^ splitmix64(class_index * 1000003ULL + t));
            tasks.push_back({label, t, dt, dtheta, seed});
        }
        ++class_index;
    };
    for (const double m : pert.translation_magnitudes) add_class(magnitude_label(m, "m"), m, pert.yaw_with_translation_deg);
    for (const double m : pert.rotation_magnitudes) add_class(magnitude_label(m, "deg"), pert.translation_with_rotation_m, m);
    if (!tasks.empty() && cases.empty()) throw InvalidArgument("benchmark needs at least one scan pair");

    std::vector<TrialRecord> records(tasks.size());
    const auto run_task = [&](std::size_t k) {
        const Task &task = tasks[k];
        const BenchmarkCase &c = cases[static_cast<std::size_t>(task.trial) % cases.size()];
        TrialRecord rec;
        rec.magnitude = task.label;
        rec.trial = task.trial;
        const EulerPose truth_pose = transform_to_euler(c.truth);
        const RigidTransform initial = euler_to_transform(perturb_pose(truth_pose, task.dt, task.dtheta, task.seed));
        rec.init_terr_m = translation_error(initial, c.truth);
        rec.init_rerr_deg = rotation_error(initial, c.truth).euler_l2_deg;
        try {
            const AlignmentReport report = align(c.scan_a, c.scan_b, initial, cfg);
            const RotationError rerr = rotation_error(report.estimated, c.truth);
            rec.final_terr_m = translation_error(report.estimated, c.truth);
            rec.final_rerr_deg = rerr.euler_l2_deg;
            rec.geodesic_rerr_deg = rerr.geodesic_deg;
            rec.iterations = report.iterations;
            rec.wall_s = report.wall_time;
            rec.converged = report.converged();
        } catch (const std::exception &) {
            rec.final_terr_m = rec.init_terr_m;
            rec.final_rerr_deg = rec.init_rerr_deg;
            rec.geodesic_rerr_deg = rotation_error(initial, c.truth).geodesic_deg;
            rec.converged = false;
        }
        records[k] = rec;
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
    if (workers <= 1) {
        for (std::size_t k = 0; k < tasks.size(); ++k) run_task(k);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < tasks.size(); k = next++) run_task(k);
        });
    }
    pool.clear();
    return records;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

const std::vector<std::pair<std::string, double TrialRecord::*>> &error_columns() {
    static const std::vector<std::pair<std::string, double TrialRecord::*>> columns = {
        {"init_terr_m", &TrialRecord::init_terr_m},
        {"final_terr_m", &TrialRecord::final_terr_m},
        {"init_rerr_deg", &TrialRecord::init_rerr_deg},
        {"final_rerr_deg", &TrialRecord::final_rerr_deg},
        {"geodesic_rerr_deg", &TrialRecord::geodesic_rerr_deg},
    };
    return columns;
}

std::ostream &full_precision(std::ostream &out) {
    return out << std::setprecision(std::numeric_limits<double>::max_digits10);
}

}  // namespace

std::vector<MagnitudeSummary> summarize(const std::vector<TrialRecord> &records) {
    std::vector<MagnitudeSummary> out;
    std::vector<std::string> order;
    for (const auto &r : records) {
        if (std::find(order.begin(), order.end(), r.magnitude) == order.end()) order.push_back(r.magnitude);
    }
    for (const auto &label : order) {
        MagnitudeSummary s;
        s.magnitude = label;
        for (const auto &[name, member] : error_columns()) {
            std::vector<double> values;
            for (const auto &r : records) {
                if (r.magnitude == label) values.push_back(r.*member);
            }
            double sum = 0.0;
            for (const double v : values) sum += v;
            s.trials = values.size();
            s.columns[name] = {sum / static_cast<double>(values.size()), quantile(values, 0.5), quantile(values, 0.25),
                               quantile(values, 0.75)};
        }
        out.push_back(std::move(s));
    }
    return out;
}

const char *const kTrialCsvHeader =
    "magnitude,trial,init_terr_m,final_terr_m,init_rerr_deg,final_rerr_deg,geodesic_rerr_deg,iters,wall_s,converged";

void write_trials_csv(std::ostream &out, const std::vector<TrialRecord> &records) {
    out << kTrialCsvHeader << '\n';
    full_precision(out);
    for (const auto &r : records) {
        out << r.magnitude << ',' << r.trial << ',' << r.init_terr_m << ',' << r.final_terr_m << ','
            << r.init_rerr_deg << ',' << r.final_rerr_deg << ',' << r.geodesic_rerr_deg << ',' << r.iterations << ','
            << r.wall_s << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

std::vector<TrialRecord> read_trials_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrialCsvHeader) throw FormatError("trial CSV header mismatch");
    std::vector<TrialRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 10) throw FormatError("trial CSV line " + std::to_string(line_no) + " has wrong field count");
        try {
            records.push_back({f[0], std::stoi(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                               std::stod(f[5]), std::stod(f[6]), std::stoi(f[7]), std::stod(f[8]), f[9] == "1"});
        } catch (const std::logic_error &) {
            throw FormatError("trial CSV line " + std::to_string(line_no) + " is malformed");
        }
    }
    return records;
}

void write_summary_csv(std::ostream &out, const std::vector<MagnitudeSummary> &summary) {
    out << "magnitude,trials";
    for (const auto &[name, member] : error_columns()) {
        out << ',' << name << "_mean," << name << "_median," << name << "_q25," << name << "_q75";
    }
    out << '\n';
    full_precision(out);
    for (const auto &s : summary) {
        out << s.magnitude << ',' << s.trials;
        for (const auto &[name, member] : error_columns()) {
            const auto &c = s.columns.at(name);
            out << ',' << c.mean << ',' << c.median << ',' << c.q25 << ',' << c.q75;
        }
        out << '\n';
    }
}

RuntimeInvariance runtime_invariance_check(const std::vector<TrialRecord> &records) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto &r : records) {
        auto &[sum, n] = acc[r.magnitude];
        sum += r.wall_s;
        ++n;
    }
    if (acc.size() < 3) {
        throw InvalidArgument("runtime invariance needs at least three magnitude classes, got " +
                              std::to_string(acc.size()));
    }
    RuntimeInvariance out;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto &[label, v] : acc) {
        const double mean = v.first / static_cast<double>(v.second);
        out.mean_wall_s[label] = mean;
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
    }
    out.ratio = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    return out;
}

std::vector<BenchmarkCase> kitti_cases(const std::filesystem::path &scan_dir, const PoseTrack &track,
                                       std::size_t max_pairs, double min_dist, double max_dist) {
    std::vector<BenchmarkCase> cases;
    if (track.size() < 2 || max_pairs == 0) return cases;
    const std::size_t stride = std::max<std::size_t>(1, track.size() / max_pairs);
    for (std::size_t i = 0; i + 1 < track.size() && cases.size() < max_pairs; i += stride) {
        for (std::size_t j = i + 1; j < track.size(); ++j) {
            const double d = (track[j].translation() - track[i].translation()).norm();
            if (d > max_dist) break;
            if (d < min_dist) continue;
            char name_i[32], name_j[32];
            std::snprintf(name_i, sizeof name_i, "%06zu.bin", i);
            std::snprintf(name_j, sizeof name_j, "%06zu.bin", j);
            const auto path_i = scan_dir / name_i, path_j = scan_dir / name_j;
            if (!std::filesystem::exists(path_i) || !std::filesystem::exists(path_j)) break;
            cases.push_back({load_kitti_bin(path_i), load_kitti_bin(path_j), relative_ground_truth(track, i, j),
                             std::to_string(i) + "-" + std::to_string(j)});
            break;
        }
    }
    return cases;
}

}  // namespace mireg
