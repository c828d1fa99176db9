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

#include "mireg/mi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "mireg/errors.hpp"

namespace mireg {

namespace {

constexpr std::size_t kJoinChunk = 2048;
constexpr std::size_t kEntropyChunk = 256;

}  // namespace

BinningSpec BinningSpec::defaults(FeatureKind kind) {
    return kind == FeatureKind::VarZ ? BinningSpec{kind, 32, 2.0} : BinningSpec{kind, 32, 64.0};
}

void BinningSpec::validate() const {
    if (bins < 2) throw ConfigError("bin count must be at least 2");
    if (!(upper_clamp > 0.0) || !std::isfinite(upper_clamp)) {
        throw ConfigError("upper clamp must be positive and finite");
    }
}

std::size_t bin_feature(std::optional<double> value, const BinningSpec &spec) {
    if (!value) return 0;
    const double v = *value;
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("feature value must be finite and non-negative");
    if (v >= spec.upper_clamp) return static_cast<std::size_t>(spec.bins);
    const auto scaled = static_cast<std::size_t>(std::floor(v / spec.upper_clamp * spec.bins));
    return 1 + std::min(static_cast<std::size_t>(spec.bins - 1), scaled);
}

JointHistogram::JointHistogram(int bins) : bins_(bins) {
    if (bins < 1) throw InvalidArgument("histogram needs at least one occupied bin");
    counts_.assign(dim() * dim(), 0);
}

void JointHistogram::add(std::size_t row, std::size_t col, std::uint64_t count) {
    if (row >= dim() || col >= dim()) throw InvalidArgument("histogram cell out of range");
    counts_[row * dim() + col] += count;
    total_ += count;
}

std::vector<std::uint64_t> JointHistogram::row_sums() const {
    std::vector<std::uint64_t> sums(dim(), 0);
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) sums[r] += at(r, c);
    }
    return sums;
}

std::vector<std::uint64_t> JointHistogram::col_sums() const {
    std::vector<std::uint64_t> sums(dim(), 0);
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) sums[c] += at(r, c);
    }
    return sums;
}

JointHistogram JointHistogram::transposed() const {
    JointHistogram out(bins_);
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) out.counts_[c * dim() + r] = at(r, c);
    }
    out.total_ = total_;
    return out;
}

JointHistogram JointHistogram::occupied_only() const {
    JointHistogram out(bins_);
    for (std::size_t r = 1; r < dim(); ++r) {
        for (std::size_t c = 1; c < dim(); ++c) {
            if (const auto v = at(r, c)) out.add(r, c, v);
        }
    }
    return out;
}

JointHistogram JointHistogram::from_counts(int bins, std::span<const std::uint64_t> counts) {
    JointHistogram out(bins);
    if (counts.size() != out.counts_.size()) throw InvalidArgument("count matrix has the wrong size");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.counts_[i] = counts[i];
        out.total_ += counts[i];
    }
    return out;
}

JointHistogram build_joint_histogram(const FeatureMap &a, const FeatureMap &b,
                                     const OverlapRegion &region, const BinningSpec &spec,
                                     Execution exec) {
    spec.validate();
    if (a.kind != spec.kind || b.kind != spec.kind) {
        throw InvalidArgument("feature maps and binning spec disagree on the feature kind");
    }
    if (region.empty) throw EmptyOverlap("overlap region is empty");

    const std::size_t dim = static_cast<std::size_t>(spec.bins) + 1;
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    // The serial reference joins everything in one pass.
    const std::size_t chunk_len = exec == Execution::Serial ? std::max<std::size_t>(na, 1) : kJoinChunk;
    const std::size_t chunks = std::max<std::size_t>(1, chunk_count(na, chunk_len));
    std::vector<std::vector<std::uint64_t>> partial(chunks);

    // Map: each chunk of A's sorted keys, plus the slice of B's sorted keys
    // that falls between the chunk's first key and the next chunk's first
    // key, is merge-joined into a private histogram.
    const auto join = [&](std::size_t c) {
        const std::size_t a0 = std::min(na, c * chunk_len);
        const std::size_t a1 = std::min(na, a0 + chunk_len);
        const auto b_begin = b.keys.begin();
        const std::size_t b0 =
            c == 0 ? 0 : static_cast<std::size_t>(std::lower_bound(b_begin, b.keys.end(), a.keys[a0]) - b_begin);
        const std::size_t b1 =
            c + 1 == chunks ? nb
                            : static_cast<std::size_t>(std::lower_bound(b_begin, b.keys.end(), a.keys[a1]) - b_begin);
        auto &cells = partial[c];
        cells.assign(dim * dim, 0);
        std::size_t i = a0, j = b0;
        while (i < a1 || j < b1) {
            std::uint64_t key;
            std::optional<double> fa, fb;
            if (j >= b1 || (i < a1 && a.keys[i] < b.keys[j])) {
                key = a.keys[i];
                fa = a.values[i++];
            } else if (i >= a1 || b.keys[j] < a.keys[i]) {
                key = b.keys[j];
                fb = b.values[j++];
            } else {
                key = a.keys[i];
                fa = a.values[i++];
                fb = b.values[j++];
            }
            if (!region.contains(unpack(key))) continue;
            ++cells[bin_feature(fa, spec) * dim + bin_feature(fb, spec)];
        }
    };
    for_each_chunk(chunks, 1, exec, [&](std::size_t c, std::size_t, std::size_t) { join(c); });

    // Reduce in chunk order.
    std::vector<std::uint64_t> counts(dim * dim, 0);
    std::uint64_t occupied = 0;
    for (const auto &cells : partial) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            counts[k] += cells[k];
            occupied += cells[k];
        }
    }
    const std::uint64_t region_voxels = overlap_voxel_count(region);
    counts[0] += region_voxels - occupied;
    return JointHistogram::from_counts(spec.bins, counts);
}

double entropy(std::span<const std::uint64_t> counts, Execution exec) {
    std::vector<std::uint64_t> nonzero;
    nonzero.reserve(counts.size());
    std::uint64_t total = 0;
    for (const auto c : counts) {
        if (c == 0) continue;
        nonzero.push_back(c);
        total += c;
    }
    if (total == 0) throw InvalidArgument("entropy of a distribution with zero total");
    std::sort(nonzero.begin(), nonzero.end());

    const auto denom = static_cast<double>(total);
    const auto term = [&](std::uint64_t c) {
        const double p = static_cast<double>(c) / denom;
        return -p * std::log(p);
    };
    if (exec == Execution::Serial) {
        double h = 0.0;
        for (const auto c : nonzero) h += term(c);
        return h;
    }
    std::vector<double> partial(chunk_count(nonzero.size(), kEntropyChunk), 0.0);
    for_each_chunk(nonzero.size(), kEntropyChunk, exec, [&](std::size_t c, std::size_t begin, std::size_t end) {
        double h = 0.0;
        for (std::size_t k = begin; k < end; ++k) h += term(nonzero[k]);
        partial[c] = h;
    });
    double h = 0.0;
    for (const double p : partial) h += p;
    return h;
}

MIResult mutual_information(const JointHistogram &hist, Execution exec) {
    if (hist.total() == 0) throw InvalidArgument("mutual information of an empty histogram");
    MIResult out;
    out.h_x = entropy(hist.row_sums(), exec);
    out.h_y = entropy(hist.col_sums(), exec);
    out.h_xy = entropy(hist.cells(), exec);
    out.mi = out.h_x + out.h_y - out.h_xy;
    if (out.mi < 0.0 && out.mi > -1e-12) out.mi = 0.0;
    return out;
}

double occupied_bin_correlation(const JointHistogram &hist) {
    double n = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t r = 1; r < hist.dim(); ++r) {
        for (std::size_t c = 1; c < hist.dim(); ++c) {
            const double w = static_cast<double>(hist.at(r, c));
            n += w;
            sx += w * static_cast<double>(r);
            sy += w * static_cast<double>(c);
        }
    }
    if (n == 0.0) return 0.0;
    const double mx = sx / n, my = sy / n;
    double vxx = 0.0, vyy = 0.0, vxy = 0.0;
    for (std::size_t r = 1; r < hist.dim(); ++r) {
        for (std::size_t c = 1; c < hist.dim(); ++c) {
            const double w = static_cast<double>(hist.at(r, c));
            const double dx = static_cast<double>(r) - mx, dy = static_cast<double>(c) - my;
            vxx += w * dx * dx;
            vyy += w * dy * dy;
            vxy += w * dx * dy;
        }
    }
    if (vxx <= 0.0 || vyy <= 0.0) return 0.0;
    return vxy / std::sqrt(vxx * vyy);
}

void write_histogram_csv(std::ostream &out, const JointHistogram &hist, const BinningSpec &spec,
                         bool include_phi) {
    out << "# feature=" << to_string(spec.kind) << " bins=" << spec.bins << " upper_clamp=" << spec.upper_clamp
        << " phi=" << (include_phi ? "on" : "off") << '\n';
    const std::size_t first = include_phi ? 0 : 1;
    for (std::size_t r = first; r < hist.dim(); ++r) {
        for (std::size_t c = first; c < hist.dim(); ++c) out << (c > first ? "," : "") << hist.at(r, c);
        out << '\n';
    }
}

JointHistogram read_histogram_csv(std::istream &in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# ", 0) != 0) {
        throw FormatError("histogram CSV lacks its '# feature=...' header");
    }
    int bins = 0;
    bool phi = true;
    std::istringstream hs(header.substr(2));
    std::string token;
    while (hs >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        if (key == "bins") bins = std::stoi(value);
        if (key == "phi") phi = value == "on";
    }
    if (bins < 1) throw FormatError("histogram CSV header has no valid bins field");
    const std::size_t dim = static_cast<std::size_t>(bins) + 1;
    const std::size_t first = phi ? 0 : 1;
    std::vector<std::uint64_t> counts(dim * dim, 0);
    std::string line;
    for (std::size_t r = first; r < dim; ++r) {
        if (!std::getline(in, line)) throw FormatError("histogram CSV ended early");
        std::istringstream ls(line);
        for (std::size_t c = first; c < dim; ++c) {
            std::string cell;
            if (!std::getline(ls, cell, ',')) throw FormatError("histogram CSV row too short");
            counts[r * dim + c] = std::stoull(cell);
        }
    }
    return JointHistogram::from_counts(bins, counts);
}

Evaluation evaluate_pose(const FeatureMap &features_a, const PointCloud &cloud_b, const EulerPose &pose,
                         const GridSpec &grid, const BinningSpec &spec, const ObjectiveOptions &options) {
    const RigidTransform transform = euler_to_transform(pose);
    PointCloud moved;
    moved.points.reserve(cloud_b.size());
    const Eigen::Matrix3d r = transform.rotation();
    const Eigen::Vector3d t = transform.translation();
    for (const auto &p : cloud_b.points) moved.points.emplace_back(r * p + t);

    const FeatureMap features_b = build_feature_map(moved, grid, spec.kind, options.execution);
    const OverlapRegion region = compute_overlap(features_a.bounds, features_b.bounds);
    if (region.empty) throw EmptyOverlap("scans do not overlap at this pose");
    JointHistogram hist = build_joint_histogram(features_a, features_b, region, spec, options.execution);
    if (!options.phi_enabled) {
        hist = hist.occupied_only();
        if (hist.total() == 0) throw EmptyOverlap("no voxel is occupied in both scans at this pose");
    }
    const MIResult mi = mutual_information(hist, options.execution);
    return {mi, std::move(hist), region};
}

double mi_objective(const FeatureMap &features_a, const PointCloud &cloud_b, const EulerPose &pose,
                    const GridSpec &grid, const BinningSpec &spec, const ObjectiveOptions &options) {
    try {
        return evaluate_pose(features_a, cloud_b, pose, grid, spec, options).mi.mi;
    } catch (const EmptyOverlap &) {
        return kWorstObjective;
    } catch (const OutOfBounds &) {
        return kWorstObjective;
    }
}

}  // namespace mireg
