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

// Python bindings: clouds cross the boundary as (N, 3) float64 arrays.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mireg/align.hpp"
#include "mireg/bench.hpp"
#include "mireg/errors.hpp"
#include "mireg/scan_io.hpp"

namespace py = pybind11;
using namespace mireg;

namespace {

using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

PointCloud to_cloud(const Eigen::Ref<const RowPoints> &pts) {
    PointCloud c;
    c.points.reserve(static_cast<std::size_t>(pts.rows()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) c.points.emplace_back(pts(i, 0), pts(i, 1), pts(i, 2));
    return c;
}

RowPoints to_array(const PointCloud &c) {
    RowPoints out(static_cast<Eigen::Index>(c.size()), 3);
    for (std::size_t i = 0; i < c.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = c.points[i].transpose();
    return out;
}

EulerPose to_pose(const std::array<double, 6> &v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
std::array<double, 6> from_pose(const EulerPose &p) { return {p.tx, p.ty, p.tz, p.rx, p.ry, p.rz}; }

}  // namespace

PYBIND11_MODULE(_mireg, m) {
    m.doc() = "Mutual-information registration of 3D scans over voxelized features";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<EmptyOverlap>(m, "EmptyOverlap", PyExc_RuntimeError);
    py::register_exception<NoOverlap>(m, "NoOverlap", PyExc_RuntimeError);

    py::enum_<FeatureKind>(m, "FeatureKind").value("VarZ", FeatureKind::VarZ).value("Count", FeatureKind::Count);

    py::class_<AlignmentConfig>(m, "AlignmentConfig")
        .def(py::init([](FeatureKind feature, double resolution, int bins, std::optional<double> upper_clamp,
                         bool phi, int restarts, int max_iterations) {
                 AlignmentConfig cfg = AlignmentConfig::for_feature(feature);
                 cfg.grid.resolution = resolution;
                 cfg.binning.bins = bins;
                 if (upper_clamp) cfg.binning.upper_clamp = *upper_clamp;
                 cfg.phi_enabled = phi;
                 cfg.simplex.restarts = restarts;
                 cfg.simplex.max_iterations = max_iterations;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("feature") = FeatureKind::VarZ, py::arg("resolution") = 1.0, py::arg("bins") = 32,
             py::arg("upper_clamp") = py::none(), py::arg("phi") = true, py::arg("restarts") = 2,
             py::arg("max_iterations") = 300)
        .def_property_readonly("feature", [](const AlignmentConfig &c) { return c.feature; })
        .def_property_readonly("resolution", [](const AlignmentConfig &c) { return c.grid.resolution; })
        .def_property_readonly("bins", [](const AlignmentConfig &c) { return c.binning.bins; })
        .def_property_readonly("upper_clamp", [](const AlignmentConfig &c) { return c.binning.upper_clamp; })
        .def_property_readonly("phi", [](const AlignmentConfig &c) { return c.phi_enabled; });

    py::class_<AlignmentReport>(m, "AlignmentReport")
        .def_property_readonly("matrix", [](const AlignmentReport &r) { return r.estimated.matrix(); })
        .def_property_readonly("pose", [](const AlignmentReport &r) { return from_pose(r.estimated_pose); })
        .def_readonly("initial_mi", &AlignmentReport::initial_mi)
        .def_readonly("final_mi", &AlignmentReport::final_mi)
        .def_readonly("mi_trace", &AlignmentReport::mi_trace)
        .def_readonly("iterations", &AlignmentReport::iterations)
        .def_readonly("evaluations", &AlignmentReport::evaluations)
        .def_readonly("wall_time", &AlignmentReport::wall_time)
        .def_property_readonly("termination", [](const AlignmentReport &r) { return to_string(r.termination); })
        .def_property_readonly("converged", &AlignmentReport::converged);

    m.def("pose_to_matrix", [](const std::array<double, 6> &p) { return euler_to_transform(to_pose(p)).matrix(); },
          py::arg("pose"), "4x4 matrix of (tx, ty, tz, rx, ry, rz), radians, R = Rz Ry Rx");
    m.def("matrix_to_pose", [](const Eigen::Matrix4d &t) { return from_pose(transform_to_euler(RigidTransform(t))); },
          py::arg("matrix"));

    m.def("load_cloud", [](const std::filesystem::path &p) { return to_array(load_cloud(p)); }, py::arg("path"));
    m.def(
        "save_cloud",
        [](const std::filesystem::path &p, const Eigen::Ref<const RowPoints> &pts) {
            save_cloud(p, to_cloud(pts), format_from_extension(p));
        },
        py::arg("path"), py::arg("points"));

    m.def(
        "synth_scene",
        [](std::uint64_t seed, std::size_t n_points, int n_structures, double extent, double noise) {
            return to_array(synth_scene({seed, extent, n_points, n_structures, noise}));
        },
        py::arg("seed") = 1, py::arg("n_points") = 50000, py::arg("n_structures") = 20, py::arg("extent") = 80.0,
        py::arg("noise") = 0.02);
    m.def(
        "synth_pair",
        [](const std::array<double, 6> &truth, std::uint64_t seed, std::size_t n_points) {
            SceneSpec spec;
            spec.seed = seed;
            spec.n_points = n_points;
            const ScanPair pair = synth_pair(spec, to_pose(truth));
            return py::make_tuple(to_array(pair.scan_a), to_array(pair.scan_b), pair.truth.matrix());
        },
        py::arg("truth"), py::arg("seed") = 1, py::arg("n_points") = 50000,
        "Returns (scan_a, scan_b, truth) where truth maps B into A's frame");

    m.def(
        "mutual_information",
        [](const Eigen::Ref<const RowPoints> &a, const Eigen::Ref<const RowPoints> &b, const std::array<double, 6> &pose,
           const AlignmentConfig &cfg) {
            const MIResult r = mi_at(to_cloud(a), to_cloud(b), to_pose(pose), cfg);
            return py::dict(py::arg("mi") = r.mi, py::arg("h_x") = r.h_x, py::arg("h_y") = r.h_y,
                            py::arg("h_xy") = r.h_xy);
        },
        py::arg("scan_a"), py::arg("scan_b"), py::arg("pose") = std::array<double, 6>{},
        py::arg("config") = AlignmentConfig{});

    m.def(
        "align",
        [](const Eigen::Ref<const RowPoints> &a, const Eigen::Ref<const RowPoints> &b, const Eigen::Matrix4d &init,
           const AlignmentConfig &cfg) {
            const PointCloud ca = to_cloud(a), cb = to_cloud(b);
            py::gil_scoped_release release;
            return align(ca, cb, RigidTransform(init), cfg);
        },
        py::arg("scan_a"), py::arg("scan_b"), py::arg("initial") = Eigen::Matrix4d::Identity(),
        py::arg("config") = AlignmentConfig{}, "Estimate the transform mapping scan_b onto scan_a");

    m.def(
        "sweep",
        [](const Eigen::Ref<const RowPoints> &a, const Eigen::Ref<const RowPoints> &b, const std::string &axis,
           double lo, double hi, int steps, const std::array<double, 6> &base, const AlignmentConfig &cfg) {
            const auto samples = sweep(to_cloud(a), to_cloud(b), to_pose(base), parse_pose_axis(axis), lo, hi, steps, cfg);
            std::vector<double> values, mi;
            for (const auto &s : samples) {
                values.push_back(s.value);
                mi.push_back(s.mi);
            }
            return py::make_tuple(values, mi);
        },
        py::arg("scan_a"), py::arg("scan_b"), py::arg("axis"), py::arg("lo"), py::arg("hi"), py::arg("steps"),
        py::arg("base") = std::array<double, 6>{}, py::arg("config") = AlignmentConfig{},
        "Returns (values, mi); rotation axes in radians, -inf where the scans do not overlap");
}
