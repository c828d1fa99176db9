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

// Independent reference computations used by the unit and acceptance tests.

#include <cmath>
#include <random>

#include "mireg/mi.hpp"
#include "mireg/voxel.hpp"

namespace mireg::oracle {

// Enumerates every voxel of the region and bins both maps by lookup.
inline JointHistogram brute_force_histogram(const FeatureMap &a, const FeatureMap &b, const OverlapRegion &region,
                                            const BinningSpec &spec) {
    JointHistogram h(spec.bins);
    for (std::int32_t x = region.lo.ix; x <= region.hi.ix; ++x)
        for (std::int32_t y = region.lo.iy; y <= region.hi.iy; ++y)
            for (std::int32_t z = region.lo.iz; z <= region.hi.iz; ++z) {
                const VoxelKey k{x, y, z};
                h.add(bin_feature(a.find(k), spec), bin_feature(b.find(k), spec));
            }
    return h;
}

// Sum of p_xy ln(p_xy / (p_x p_y)) over nonzero cells.
inline double direct_mi(const JointHistogram &h) {
    const auto rows = h.row_sums();
    const auto cols = h.col_sums();
    const double n = static_cast<double>(h.total());
    double mi = 0.0;
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = 0; j < h.dim(); ++j) {
            const double c = static_cast<double>(h.at(i, j));
            if (c == 0.0) continue;
            mi += c / n * std::log(c * n / (static_cast<double>(rows[i]) * static_cast<double>(cols[j])));
        }
    return mi;
}

inline JointHistogram random_histogram(std::mt19937_64 &rng, int bins, double density = 0.5) {
    JointHistogram h(bins);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::uint64_t> count(1, 500);
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = 0; j < h.dim(); ++j)
            if (u(rng) < density) h.add(i, j, count(rng));
    if (h.total() == 0) h.add(0, 0, 1);
    return h;
}

// Cloud whose points sit in 1 to max_voxels random voxels of [lo, hi)^3 on a
// unit grid, each voxel holding 1-6 points at random heights.
inline PointCloud random_voxel_cloud(std::mt19937_64 &rng, int max_voxels, int lo, int hi) {
    std::uniform_int_distribution<int> idx(lo, hi - 1), nvox(1, max_voxels), npts(1, 6);
    std::uniform_real_distribution<double> frac(0.0, 0.999);
    PointCloud cloud;
    const int voxels = nvox(rng);
    for (int v = 0; v < voxels; ++v) {
        const int x = idx(rng), y = idx(rng), z = idx(rng);
        const int n = npts(rng);
        for (int k = 0; k < n; ++k) cloud.points.emplace_back(x + frac(rng), y + frac(rng), z + frac(rng));
    }
    return cloud;
}

}  // namespace mireg::oracle
