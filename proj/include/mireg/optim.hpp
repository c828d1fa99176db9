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

#include <Eigen/Core>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace mireg {

using Vector6 = Eigen::Matrix<double, 6, 1>;

struct SimplexConfig {
    // Per-coordinate offsets of the initial vertices from the start point:
    // tx, ty, tz in meters, then roll, pitch, yaw in radians. Wheeled
    // platforms move mostly in x, y and yaw, hence the anisotropy.
    Vector6 initial_steps = (Vector6() << 8.0, 8.0, 1.0, 0.1, 0.1, 0.8).finished();
    int max_iterations = 300;
    double f_tol = 1e-5;
    double x_tol = 1e-3;
    // Each restart re-seeds the simplex at the best vertex with halved steps.
    int restarts = 2;

    void validate() const;
};

enum class Termination { ConvergedF, ConvergedX, MaxIterations };

std::string to_string(Termination reason);

struct IterationTrace {
    int iteration = 0;
    double best = 0.0;
    double spread = 0.0;  // max distance of a vertex from the best vertex
};

struct OptimResult {
    Vector6 best = Vector6::Zero();
    double best_value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    Termination reason = Termination::MaxIterations;
    // Best-so-far value after simplex initialization and after every
    // iteration; non-decreasing.
    std::vector<IterationTrace> trace;
};

using Objective6 = std::function<double(const Vector6 &)>;

// Nelder-Mead maximization (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5) run on -f. The initial simplex is x0 plus x0 + s_i e_i. Stops
// when the objective spread over the simplex drops below f_tol, when every
// vertex lies within x_tol of the best one, or after max_iterations. Returns
// the best point ever evaluated. f may return -inf for infeasible points.
OptimResult nelder_mead_maximize(const Objective6 &f, const Vector6 &x0, const SimplexConfig &cfg);

// "iteration,best_mi,simplex_spread" rows.
void write_trace_csv(std::ostream &out, const std::vector<IterationTrace> &trace);

}  // namespace mireg
