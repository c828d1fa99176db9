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

// mireg: mutual-information scan alignment from the command line.
//
// Exit codes: 0 success, 1 input/format/config error, 2 no overlap or the
// optimizer hit its iteration cap.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "mireg/align.hpp"
#include "mireg/bench.hpp"
#include "mireg/errors.hpp"
#include "mireg/scan_io.hpp"

namespace fs = std::filesystem;
using namespace mireg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNoOverlap = 2;

struct CloudArgs {
    std::string scan_a, scan_b, format;
};

struct ConfigArgs {
    std::string feature = "varz";
    double resolution = 1.0;
    int bins = 32;
    double clamp = 0.0;  // 0: feature default
    std::vector<double> simplex;
    std::string phi = "on";
    int max_iterations = 300;
    int restarts = 2;
    double f_tol = 1e-5;
    double x_tol = 1e-3;
    std::string execution = "parallel";
};

void add_config_options(CLI::App &cmd, ConfigArgs &cfg) {
    cmd.add_option("--feature", cfg.feature, "Voxel feature: varz (z variance) or count")
        ->check(CLI::IsMember({"varz", "count"}));
    cmd.add_option("--resolution", cfg.resolution, "Voxel edge length in meters")->check(CLI::PositiveNumber);
    cmd.add_option("--bins", cfg.bins, "Occupied-feature histogram bins");
    cmd.add_option("--clamp", cfg.clamp,
                   "Feature value mapped to the top bin (default 2.0 m^2 for varz, 64 for count)");
    cmd.add_option("--simplex", cfg.simplex,
                   "Initial simplex steps: sx sy sz (m) s_roll s_pitch s_yaw (rad)")
        ->expected(6);
    cmd.add_option("--phi", cfg.phi, "Include no-feature voxels in the histogram")
        ->check(CLI::IsMember({"on", "off"}));
    cmd.add_option("--max-iter", cfg.max_iterations, "Nelder-Mead iterations per restart stage");
    cmd.add_option("--restarts", cfg.restarts, "Simplex restarts from the best vertex with halved steps");
    cmd.add_option("--f-tol", cfg.f_tol, "Objective-spread tolerance (nats)");
    cmd.add_option("--x-tol", cfg.x_tol, "Vertex-spread tolerance");
    cmd.add_option("--execution", cfg.execution, "serial or parallel evaluation")
        ->check(CLI::IsMember({"serial", "parallel"}));
}

AlignmentConfig make_config(const ConfigArgs &args) {
    AlignmentConfig cfg = AlignmentConfig::for_feature(parse_feature_kind(args.feature));
    cfg.grid.resolution = args.resolution;
    cfg.binning.bins = args.bins;
    if (args.clamp > 0.0) cfg.binning.upper_clamp = args.clamp;
    if (!args.simplex.empty()) {
        for (int i = 0; i < 6; ++i) cfg.simplex.initial_steps[i] = args.simplex[static_cast<std::size_t>(i)];
    }
    cfg.phi_enabled = args.phi == "on";
    cfg.simplex.max_iterations = args.max_iterations;
    cfg.simplex.restarts = args.restarts;
    cfg.simplex.f_tol = args.f_tol;
    cfg.simplex.x_tol = args.x_tol;
    cfg.execution = parse_execution(args.execution);
    cfg.validate();
    return cfg;
}

void add_cloud_args(CLI::App &cmd, CloudArgs &clouds) {
    cmd.add_option("scan_a", clouds.scan_a, "Reference scan A (.bin, .xyz/.txt, .ply)")->required();
    cmd.add_option("scan_b", clouds.scan_b, "Query scan B, moved onto A")->required();
    cmd.add_option("--format", clouds.format, "Override extension-based format detection (bin, xyz, ply)");
}

PointCloud read_cloud(const std::string &path, const std::string &format) {
    if (!fs::exists(path)) throw IoError("input file '" + path + "' does not exist");
    PointCloud cloud = format.empty() ? load_cloud(path) : load_cloud(path, parse_cloud_format(format));
    if (cloud.empty()) throw FormatError("input file '" + path + "' contains no points");
    return cloud;
}

// "tx ty tz rx ry rz" with rotations in degrees, or a file whose first line
// is a 12-float KITTI pose.
EulerPose parse_pose_arg(const std::string &text) {
    std::istringstream in(text);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (in.eof() && v.size() == 6) {
        return {v[0], v[1], v[2], deg2rad(v[3]), deg2rad(v[4]), deg2rad(v[5])};
    }
    if (fs::exists(text)) {
        const PoseTrack track = load_kitti_poses(text);
        if (track.empty()) throw FormatError("pose file '" + text + "' is empty");
        return transform_to_euler(track.front());
    }
    throw InvalidArgument("--init expects \"tx ty tz rx ry rz\" (meters, degrees) or a pose file, got '" + text +
                          "'");
}

std::string format_pose(const EulerPose &pose) {
    const EulerPose p = pose.normalized();
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << "tx=" << p.tx << " ty=" << p.ty << " tz=" << p.tz
        << " rx=" << rad2deg(p.rx) << "deg ry=" << rad2deg(p.ry) << "deg rz=" << rad2deg(p.rz) << "deg";
    return out.str();
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

bool is_rotation(PoseAxis axis) { return axis == PoseAxis::Rx || axis == PoseAxis::Ry || axis == PoseAxis::Rz; }

std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw InvalidArgument("bad list entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Mutual-information registration of 3D scans over voxelized features.\n"
                 "Poses are 'tx ty tz rx ry rz' with translations in meters and rotations in degrees;\n"
                 "R = Rz(rz) * Ry(ry) * Rx(rx) about the sensor origin. JSON reports use radians."};
    app.require_subcommand(1);

    // align
    CloudArgs align_clouds;
    ConfigArgs align_cfg;
    std::string align_init = "0 0 0 0 0 0", align_out, align_trace;
    auto *align_cmd = app.add_subcommand("align", "Estimate the transform mapping scan B onto scan A");
    add_cloud_args(*align_cmd, align_clouds);
    add_config_options(*align_cmd, align_cfg);
    align_cmd->add_option("--init", align_init, "Initial pose 'tx ty tz rx ry rz' (deg) or KITTI pose file");
    align_cmd->add_option("--out", align_out, "Write the alignment report as JSON");
    align_cmd->add_option("--trace", align_trace, "Write the per-iteration trace as CSV");

    // sweep
    CloudArgs sweep_clouds;
    ConfigArgs sweep_cfg;
    std::string sweep_init = "0 0 0 0 0 0", sweep_axis = "rz", sweep_out;
    std::vector<double> sweep_range{-20.0, 20.0};
    int sweep_steps = 81;
    auto *sweep_cmd = app.add_subcommand("sweep", "MI along one pose axis, others held at --init");
    add_cloud_args(*sweep_cmd, sweep_clouds);
    add_config_options(*sweep_cmd, sweep_cfg);
    sweep_cmd->add_option("--init", sweep_init, "Base pose 'tx ty tz rx ry rz' (deg) or KITTI pose file");
    sweep_cmd->add_option("--axis", sweep_axis, "tx, ty, tz, rx, ry or rz")
        ->check(CLI::IsMember({"tx", "ty", "tz", "rx", "ry", "rz"}));
    sweep_cmd->add_option("--range", sweep_range, "Swept values LO HI (meters or degrees)")->expected(2);
    sweep_cmd->add_option("--steps", sweep_steps, "Number of samples")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep_out, "CSV output (default stdout)");

    // histogram
    CloudArgs hist_clouds;
    ConfigArgs hist_cfg;
    std::string hist_init = "0 0 0 0 0 0", hist_out;
    auto *hist_cmd = app.add_subcommand("histogram", "Dump the joint feature histogram at a pose");
    add_cloud_args(*hist_cmd, hist_clouds);
    add_config_options(*hist_cmd, hist_cfg);
    hist_cmd->add_option("--init", hist_init, "Pose 'tx ty tz rx ry rz' (deg) or KITTI pose file");
    hist_cmd->add_option("--out", hist_out, "CSV output (default stdout)");

    // synth
    SceneSpec scene;
    std::string synth_out, synth_out_b, synth_truth;
    PairSpec pair_spec;
    auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene or scan pair");
    synth_cmd->add_option("--seed", scene.seed, "Scene seed");
    synth_cmd->add_option("--points", scene.n_points, "Points in the full scene");
    synth_cmd->add_option("--structures", scene.n_structures, "Boxes on the ground plane");
    synth_cmd->add_option("--extent", scene.extent, "Side of the square scene in meters");
    synth_cmd->add_option("--noise", scene.noise_sigma, "Perpendicular noise sigma in meters");
    synth_cmd->add_option("--out", synth_out, "Output cloud (.xyz, .ply or .bin); scan A when --out-b is set")
        ->required();
    synth_cmd->add_option("--out-b", synth_out_b, "Also write scan B of a cropped scan pair");
    synth_cmd->add_option("--truth", synth_truth, "True pose of B in A's frame 'tx ty tz rx ry rz' (deg)");
    synth_cmd->add_option("--radius", pair_spec.crop_radius, "Scan crop radius in meters");
    synth_cmd->add_option("--height", pair_spec.sensor_height, "Sensor height above ground in meters");

    // benchmark
    SceneSpec bench_scene;
    int bench_scenes = 3;
    ConfigArgs bench_cfg;
    std::string tmags = "1,3,5,7,9", rmags, dataset, poses, bench_out = ".";
    int trials = 3;
    std::size_t pairs = 10;
    std::uint64_t bench_seed = 7;
    double yaw_with_t = 0.0, t_with_r = 0.0;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto *bench_cmd = app.add_subcommand("benchmark", "Error-versus-initial-error batch runs");
    add_config_options(*bench_cmd, bench_cfg);
    bench_cmd->add_option("--seed", bench_scene.seed, "First synthetic scene seed");
    bench_cmd->add_option("--scenes", bench_scenes, "Number of synthetic scenes");
    bench_cmd->add_option("--points", bench_scene.n_points, "Points per synthetic scene");
    bench_cmd->add_option("--structures", bench_scene.n_structures, "Boxes per synthetic scene");
    bench_cmd->add_option("--dataset", dataset, "KITTI sequence directory with NNNNNN.bin scans");
    bench_cmd->add_option("--poses", poses, "KITTI pose file for --dataset");
    bench_cmd->add_option("--pairs", pairs, "Scan pairs drawn from the dataset");
    bench_cmd->add_option("--tmags", tmags, "Comma-separated initial translation errors (m)");
    bench_cmd->add_option("--rmags", rmags, "Comma-separated initial yaw errors (deg)");
    bench_cmd->add_option("--yaw-with-t", yaw_with_t, "Yaw error (deg) added to every translation trial");
    bench_cmd->add_option("--t-with-r", t_with_r, "Planar error (m) added to every rotation trial");
    bench_cmd->add_option("--trials", trials, "Trials per magnitude")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--perturb-seed", bench_seed, "Perturbation seed");
    bench_cmd->add_option("--jobs", jobs, "Worker threads");
    bench_cmd->add_option("--out", bench_out, "Output directory for trials.csv and summary.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*align_cmd) {
            const AlignmentConfig cfg = make_config(align_cfg);
            const PointCloud a = read_cloud(align_clouds.scan_a, align_clouds.format);
            const PointCloud b = read_cloud(align_clouds.scan_b, align_clouds.format);
            const EulerPose init = parse_pose_arg(align_init);
            const AlignmentReport report = align(a, b, euler_to_transform(init), cfg);
            if (!align_out.empty()) open_out(align_out) << report_to_json(report, cfg) << '\n';
            if (!align_trace.empty()) {
                auto out = open_out(align_trace);
                write_trace_csv(out, report.optimizer_trace);
            }
            std::cout << "pose " << format_pose(report.estimated_pose) << '\n'
                      << "mi " << std::setprecision(8) << report.final_mi << '\n'
                      << "iterations " << report.iterations << " termination " << to_string(report.termination)
                      << '\n';
            return report.converged() ? kExitOk : kExitNoOverlap;
        }

        if (*sweep_cmd) {
            const AlignmentConfig cfg = make_config(sweep_cfg);
            const PointCloud a = read_cloud(sweep_clouds.scan_a, sweep_clouds.format);
            const PointCloud b = read_cloud(sweep_clouds.scan_b, sweep_clouds.format);
            const PoseAxis axis = parse_pose_axis(sweep_axis);
            const double scale = is_rotation(axis) ? deg2rad(1.0) : 1.0;
            const auto samples = sweep(a, b, parse_pose_arg(sweep_init), axis, sweep_range[0] * scale,
                                       sweep_range[1] * scale, sweep_steps, cfg);
            std::ofstream file;
            if (!sweep_out.empty()) file = open_out(sweep_out);
            std::ostream &out = sweep_out.empty() ? std::cout : file;
            out << to_string(axis) << (is_rotation(axis) ? "_deg" : "_m") << ",mi\n"
                << std::setprecision(std::numeric_limits<double>::max_digits10);
            for (const auto &s : samples) out << s.value / scale << ',' << s.mi << '\n';
            return kExitOk;
        }

        if (*hist_cmd) {
            const AlignmentConfig cfg = make_config(hist_cfg);
            const PointCloud a = read_cloud(hist_clouds.scan_a, hist_clouds.format);
            const PointCloud b = read_cloud(hist_clouds.scan_b, hist_clouds.format);
            const Evaluation eval = MIObjective(a, b, cfg).evaluate(parse_pose_arg(hist_init));
            std::ofstream file;
            if (!hist_out.empty()) file = open_out(hist_out);
            std::ostream &out = hist_out.empty() ? std::cout : file;
            write_histogram_csv(out, eval.histogram, cfg.binning, cfg.phi_enabled);
            std::cerr << "mi " << eval.mi.mi << " h_x " << eval.mi.h_x << " h_y " << eval.mi.h_y << " h_xy "
                      << eval.mi.h_xy << " occupied_correlation " << occupied_bin_correlation(eval.histogram)
                      << '\n';
            return kExitOk;
        }

        if (*synth_cmd) {
            if (synth_out_b.empty()) {
                save_cloud(synth_out, synth_scene(scene), format_from_extension(synth_out));
                return kExitOk;
            }
            const EulerPose truth = synth_truth.empty() ? EulerPose{} : parse_pose_arg(synth_truth);
            const ScanPair pair = synth_pair(scene, truth, pair_spec);
            save_cloud(synth_out, pair.scan_a, format_from_extension(synth_out));
            save_cloud(synth_out_b, pair.scan_b, format_from_extension(synth_out_b));
            std::cout << "truth " << to_kitti_pose_line(pair.truth) << '\n';
            return kExitOk;
        }

        if (*bench_cmd) {
            const AlignmentConfig cfg = make_config(bench_cfg);
            PerturbationSpec pert;
            pert.translation_magnitudes = parse_list(tmags);
            pert.rotation_magnitudes = parse_list(rmags);
            pert.trials_per_magnitude = trials;
            pert.seed = bench_seed;
            pert.yaw_with_translation_deg = yaw_with_t;
            pert.translation_with_rotation_m = t_with_r;

            std::vector<BenchmarkCase> cases;
            if (!dataset.empty()) {
                if (poses.empty()) throw InvalidArgument("--dataset needs --poses");
                cases = kitti_cases(dataset, load_kitti_poses(poses), pairs);
                if (cases.empty()) throw FormatError("no scan pairs 1-10 m apart found in '" + dataset + "'");
            } else {
                cases = synthetic_cases(bench_scene, bench_scenes);
            }
            const auto records = run_benchmark(cases, pert, cfg, jobs);
            fs::create_directories(bench_out);
            auto trials_file = open_out((fs::path(bench_out) / "trials.csv").string());
            write_trials_csv(trials_file, records);
            auto summary_file = open_out((fs::path(bench_out) / "summary.csv").string());
            write_summary_csv(summary_file, summarize(records));
            std::cout << records.size() << " trials written to " << bench_out << '\n';
            if (const auto classes = summarize(records); classes.size() >= 3) {
                const RuntimeInvariance inv = runtime_invariance_check(records);
                std::cout << "runtime max/min ratio across classes " << inv.ratio << '\n';
            }
            return kExitOk;
        }
    } catch (const NoOverlap &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoOverlap;
    } catch (const EmptyOverlap &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoOverlap;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
