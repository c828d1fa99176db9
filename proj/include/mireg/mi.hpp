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
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mireg/geometry.hpp"
#include "mireg/parallel.hpp"
#include "mireg/voxel.hpp"

namespace mireg {

// Linear binning of occupied-voxel features into `bins` bins (indices
// 1..bins). Bin 0 is reserved for phi. Values at or above upper_clamp land in
// the last bin.
struct BinningSpec {
    FeatureKind kind = FeatureKind::VarZ;
    int bins = 32;
    double upper_clamp = 2.0;

    // 32 bins; clamp 2.0 m^2 for VarZ, 64 points for Count.
    static BinningSpec defaults(FeatureKind kind);
    void validate() const;
};

std::size_t bin_feature(std::optional<double> value, const BinningSpec &spec);

// (bins+1) x (bins+1) counts, row = scan A bin, column = scan B bin.
class JointHistogram {
public:
    explicit JointHistogram(int bins = 2);

    int bins() const { return bins_; }
    std::size_t dim() const { return static_cast<std::size_t>(bins_) + 1; }
    std::uint64_t total() const { return total_; }

    std::uint64_t at(std::size_t row, std::size_t col) const { return counts_[row * dim() + col]; }
    void add(std::size_t row, std::size_t col, std::uint64_t count = 1);

    std::span<const std::uint64_t> cells() const { return counts_; }
    std::vector<std::uint64_t> row_sums() const;
    std::vector<std::uint64_t> col_sums() const;

    JointHistogram transposed() const;
    // Copy with the phi row and column zeroed (occupied-occupied pairs only).
    JointHistogram occupied_only() const;

    // Row-major counts, dim()^2 entries.
    static JointHistogram from_counts(int bins, std::span<const std::uint64_t> counts);

    bool operator==(const JointHistogram &) const = default;

private:
    int bins_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// Every voxel in `region` contributes one count at (bin(A), bin(B)). The
// (phi, phi) cell is filled analytically from overlap_voxel_count, so the
// empty part of the region is never enumerated. Throws EmptyOverlap for an
// empty region.
JointHistogram build_joint_histogram(const FeatureMap &a, const FeatureMap &b,
                                     const OverlapRegion &region, const BinningSpec &spec,
                                     Execution exec = Execution::Parallel);

// Shannon entropy in nats, -sum p ln p with 0 ln 0 = 0. The terms are summed
// in ascending count order, so the result depends only on the multiset of
// counts. Throws InvalidArgument when the total is zero.
double entropy(std::span<const std::uint64_t> counts, Execution exec = Execution::Serial);

struct MIResult {
    double mi = 0.0;
    double h_x = 0.0;
    double h_y = 0.0;
    double h_xy = 0.0;
};

MIResult mutual_information(const JointHistogram &hist, Execution exec = Execution::Serial);

// Count-weighted Pearson correlation between the A bin and the B bin over the
// occupied-occupied cells. 0 when either side has no spread.
double occupied_bin_correlation(const JointHistogram &hist);

// First line "# feature=<kind> bins=<B> upper_clamp=<c> phi=<on|off>", then
// one comma-separated row of counts per A bin. With include_phi false the
// phi row and column are omitted.
void write_histogram_csv(std::ostream &out, const JointHistogram &hist, const BinningSpec &spec,
                         bool include_phi = true);
JointHistogram read_histogram_csv(std::istream &in);

// Returned by the objective for poses with no usable overlap.
constexpr double kWorstObjective = -std::numeric_limits<double>::infinity();

struct ObjectiveOptions {
    bool phi_enabled = true;
    Execution execution = Execution::Parallel;
};

struct Evaluation {
    MIResult mi;
    JointHistogram histogram;
    OverlapRegion region;
};

// Transforms scan B by the pose, re-voxelizes it on the shared grid, builds
// its features, the overlap with scan A's features and the joint histogram.
// Throws EmptyOverlap when nothing overlaps (or, with phi disabled, when no
// voxel is occupied in both scans).
Evaluation evaluate_pose(const FeatureMap &features_a, const PointCloud &cloud_b,
                         const EulerPose &pose, const GridSpec &grid, const BinningSpec &spec,
                         const ObjectiveOptions &options = {});

// MI at the pose, or kWorstObjective if there is no overlap.
double mi_objective(const FeatureMap &features_a, const PointCloud &cloud_b, const EulerPose &pose,
                    const GridSpec &grid, const BinningSpec &spec, const ObjectiveOptions &options = {});

}  // namespace mireg
