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

#include "mireg/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "mireg/errors.hpp"

namespace mireg {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr int kVertices = 7;

// Minimizes cost = -f. Tracks the best point ever evaluated.
class Simplex {
public:
    Simplex(const Objective6 &f, OptimResult &result) : f_(f), result_(result) {}

    double cost(const Vector6 &x) {
        double value = f_(x);
        if (std::isnan(value)) value = -std::numeric_limits<double>::infinity();
        ++result_.evaluations;
        if (result_.evaluations == 1 || value > result_.best_value) {
            result_.best_value = value;
            result_.best = x;
        }
        return -value;
    }

    void init(const Vector6 &x0, const Vector6 &steps) {
        vertices_[0] = x0;
        costs_[0] = cost(x0);
        for (int i = 0; i < 6; ++i) {
            vertices_[i + 1] = x0;
            vertices_[i + 1][i] += steps[i];
            costs_[i + 1] = cost(vertices_[i + 1]);
        }
        order();
    }

    // Sorts ascending by cost; ties keep the earlier vertex first.
    void order() {
        std::array<int, kVertices> idx;
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return costs_[a] < costs_[b]; });
        std::array<Vector6, kVertices> v;
        std::array<double, kVertices> c;
        for (int k = 0; k < kVertices; ++k) {
            v[k] = vertices_[idx[k]];
            c[k] = costs_[idx[k]];
        }
        vertices_ = v;
        costs_ = c;
    }

    double cost_spread() const {
        const double spread = costs_.back() - costs_.front();
        return std::isnan(spread) ? std::numeric_limits<double>::infinity() : spread;
    }

    double vertex_spread() const {
        double spread = 0.0;
        for (int k = 1; k < kVertices; ++k) spread = std::max(spread, (vertices_[k] - vertices_[0]).norm());
        return spread;
    }

    void step() {
        constexpr int worst = kVertices - 1;
        Vector6 centroid = Vector6::Zero();
        for (int k = 0; k < worst; ++k) centroid += vertices_[k];
        centroid /= static_cast<double>(worst);

        const Vector6 reflected = centroid + kReflect * (centroid - vertices_[worst]);
        const double c_reflected = cost(reflected);

        if (c_reflected < costs_[0]) {
            const Vector6 expanded = centroid + kExpand * (reflected - centroid);
            const double c_expanded = cost(expanded);
            if (c_expanded < c_reflected) {
                replace_worst(expanded, c_expanded);
            } else {
                replace_worst(reflected, c_reflected);
            }
        } else if (c_reflected < costs_[worst - 1]) {
            replace_worst(reflected, c_reflected);
        } else if (c_reflected < costs_[worst]) {
            const Vector6 outside = centroid + kContract * (reflected - centroid);
            const double c_outside = cost(outside);
            if (c_outside <= c_reflected) {
                replace_worst(outside, c_outside);
            } else {
                shrink();
            }
        } else {
            const Vector6 inside = centroid + kContract * (vertices_[worst] - centroid);
            const double c_inside = cost(inside);
            if (c_inside < costs_[worst]) {
                replace_worst(inside, c_inside);
            } else {
                shrink();
            }
        }
        order();
    }

private:
    void replace_worst(const Vector6 &x, double c) {
        vertices_.back() = x;
        costs_.back() = c;
    }

    void shrink() {
        for (int k = 1; k < kVertices; ++k) {
            vertices_[k] = vertices_[0] + kShrink * (vertices_[k] - vertices_[0]);
            costs_[k] = cost(vertices_[k]);
        }
    }

    const Objective6 &f_;
    OptimResult &result_;
    std::array<Vector6, kVertices> vertices_;
    std::array<double, kVertices> costs_{};
};

}  // namespace

void SimplexConfig::validate() const {
    if (!initial_steps.allFinite() || (initial_steps.array() <= 0.0).any()) {
        throw ConfigError("initial simplex steps must be positive and finite");
    }
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
    if (!(f_tol > 0.0) || !(x_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (restarts < 0) throw ConfigError("restarts must be non-negative");
}

std::string to_string(Termination reason) {
    switch (reason) {
        case Termination::ConvergedF: return "converged_f";
        case Termination::ConvergedX: return "converged_x";
        case Termination::MaxIterations: return "max_iter";
    }
    return "unknown";
}

OptimResult nelder_mead_maximize(const Objective6 &f, const Vector6 &x0, const SimplexConfig &cfg) {
    if (!x0.allFinite()) throw InvalidArgument("start point has a non-finite coordinate");
    cfg.validate();

    OptimResult result;
    Simplex simplex(f, result);
    Vector6 steps = cfg.initial_steps;
    Vector6 start = x0;
    for (int stage = 0; stage <= cfg.restarts; ++stage) {
        simplex.init(start, steps);
        if (stage == 0) result.trace.push_back({0, result.best_value, simplex.vertex_spread()});
        int local = 0;
        while (true) {
            if (simplex.cost_spread() < cfg.f_tol) {
                result.reason = Termination::ConvergedF;
                break;
            }
            if (simplex.vertex_spread() < cfg.x_tol) {
                result.reason = Termination::ConvergedX;
                break;
            }
            if (local >= cfg.max_iterations) {
                result.reason = Termination::MaxIterations;
                break;
            }
            simplex.step();
            ++local;
            ++result.iterations;
            result.trace.push_back({result.iterations, result.best_value, simplex.vertex_spread()});
        }
        start = result.best;
        steps *= 0.5;
    }
    return result;
}

void write_trace_csv(std::ostream &out, const std::vector<IterationTrace> &trace) {
    out << "iteration,best_mi,simplex_spread\n";
    for (const auto &t : trace) out << t.iteration << ',' << t.best << ',' << t.spread << '\n';
}

}  // namespace mireg
