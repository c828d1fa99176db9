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

#include "mireg/scan_io.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mireg/errors.hpp"

namespace mireg {

namespace {

std::string describe(const std::filesystem::path &path) { return "'" + path.string() + "'"; }

std::ifstream open_input(const std::filesystem::path &path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open " + describe(path) + " for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path &path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError("cannot open " + describe(path) + " for writing");
    return out;
}

FormatError line_error(const std::filesystem::path &path, std::size_t line, const std::string &what) {
    return FormatError(path.string() + ":" + std::to_string(line) + ": " + what);
}

float read_le_float(const unsigned char *bytes) {
    std::uint32_t bits = 0;
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(&bits, bytes, sizeof bits);
    } else {
        bits = std::uint32_t{bytes[0]} | std::uint32_t{bytes[1]} << 8 | std::uint32_t{bytes[2]} << 16 |
               std::uint32_t{bytes[3]} << 24;
    }
    return std::bit_cast<float>(bits);
}

void write_le_float(float value, unsigned char *bytes) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    for (int k = 0; k < 4; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

bool parse_double(std::string_view text, double &value) {
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc{} && ptr == end && std::isfinite(value);
}

std::string strip_comment(const std::string &line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::ostream &full_precision(std::ostream &out) {
    return out << std::setprecision(std::numeric_limits<double>::max_digits10);
}

}  // namespace

PointCloud load_kitti_bin(const std::filesystem::path &path) {
    auto in = open_input(path, std::ios::binary);
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), {}};
    constexpr std::size_t kRecord = 16;
    if (bytes.size() % kRecord != 0) {
        const std::size_t offset = bytes.size() - bytes.size() % kRecord;
        throw FormatError(path.string() + ": trailing partial record at byte offset " +
                          std::to_string(offset) + " (file size " + std::to_string(bytes.size()) +
                          " is not a multiple of 16)");
    }
    const std::size_t n = bytes.size() / kRecord;
    PointCloud cloud;
    cloud.points.reserve(n);
    std::vector<float> intensity;
    intensity.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char *rec = bytes.data() + i * kRecord;
        cloud.points.emplace_back(read_le_float(rec), read_le_float(rec + 4), read_le_float(rec + 8));
        intensity.push_back(read_le_float(rec + 12));
    }
    cloud.intensity = std::move(intensity);
    return cloud;
}

void save_kitti_bin(const std::filesystem::path &path, const PointCloud &cloud) {
    validate(cloud);
    std::vector<unsigned char> bytes(cloud.size() * 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        unsigned char *rec = bytes.data() + i * 16;
        const auto &p = cloud.points[i];
        write_le_float(static_cast<float>(p.x()), rec);
        write_le_float(static_cast<float>(p.y()), rec + 4);
        write_le_float(static_cast<float>(p.z()), rec + 8);
        write_le_float(cloud.intensity ? (*cloud.intensity)[i] : 0.0f, rec + 12);
    }
    auto out = open_output(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + describe(path));
}

PointCloud load_xyz_text(const std::filesystem::path &path) {
    auto in = open_input(path);
    PointCloud cloud;
    std::vector<float> intensity;
    bool has_intensity = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = strip_comment(line);
        const auto fields = split_ws(body);
        if (fields.empty()) continue;
        if (fields.size() != 3 && fields.size() != 4) {
            throw line_error(path, line_no, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
        }
        double v[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (!parse_double(fields[k], v[k])) {
                throw line_error(path, line_no, "cannot parse '" + std::string(fields[k]) + "' as a number");
            }
        }
        if (cloud.points.empty()) {
            has_intensity = fields.size() == 4;
        } else if (has_intensity != (fields.size() == 4)) {
            throw line_error(path, line_no, "inconsistent column count");
        }
        cloud.points.emplace_back(v[0], v[1], v[2]);
        if (has_intensity) intensity.push_back(static_cast<float>(v[3]));
    }
    if (has_intensity) cloud.intensity = std::move(intensity);
    return cloud;
}

void save_xyz_text(const std::filesystem::path &path, const PointCloud &cloud) {
    validate(cloud);
    auto out = open_output(path);
    full_precision(out);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto &p = cloud.points[i];
        out << p.x() << ' ' << p.y() << ' ' << p.z();
        if (cloud.intensity) out << ' ' << (*cloud.intensity)[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + describe(path));
}

PointCloud load_ply_ascii(const std::filesystem::path &path) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line() || line != "ply") throw line_error(path, 1, "missing 'ply' magic");

    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> properties;
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (true) {
        if (!next_line()) throw line_error(path, line_no, "header ended without 'end_header'");
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields[0] == "end_header") break;
        if (fields[0] == "comment" || fields[0] == "obj_info") continue;
        if (fields[0] == "format") {
            if (fields.size() != 3 || fields[1] != "ascii" || fields[2] != "1.0") {
                throw line_error(path, line_no, "only 'format ascii 1.0' is supported");
            }
            ascii = true;
        } else if (fields[0] == "element") {
            std::size_t count = 0;
            if (fields.size() != 3 ||
                std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), count).ec != std::errc{}) {
                throw line_error(path, line_no, "malformed element line");
            }
            elements.push_back({std::string(fields[1]), count, {}});
        } else if (fields[0] == "property") {
            if (elements.empty()) throw line_error(path, line_no, "property before any element");
            if (fields.size() == 5 && fields[1] == "list") {
                elements.back().properties.emplace_back(fields[4]);
            } else if (fields.size() == 3) {
                elements.back().properties.emplace_back(fields[2]);
            } else {
                throw line_error(path, line_no, "malformed property line");
            }
        } else {
            throw line_error(path, line_no, "unknown header keyword '" + std::string(fields[0]) + "'");
        }
    }
    if (!ascii) throw line_error(path, line_no, "missing format line");

    PointCloud cloud;
    for (const auto &element : elements) {
        if (element.name != "vertex") {
            // Skip records of elements we do not use (faces, edges, ...).
            for (std::size_t r = 0; r < element.count; ++r) {
                if (!next_line()) throw line_error(path, line_no, "unexpected end of file");
            }
            continue;
        }
        const auto index_of = [&](const std::string &name) -> std::ptrdiff_t {
            const auto it = std::find(element.properties.begin(), element.properties.end(), name);
            return it == element.properties.end() ? -1 : it - element.properties.begin();
        };
        const std::ptrdiff_t ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
        const std::ptrdiff_t ii = index_of("intensity");
        if (ix < 0 || iy < 0 || iz < 0) throw line_error(path, line_no, "vertex element lacks x/y/z");
        std::vector<float> intensity;
        cloud.points.reserve(element.count);
        for (std::size_t r = 0; r < element.count; ++r) {
            if (!next_line()) throw line_error(path, line_no + 1, "unexpected end of file in vertex data");
            const auto fields = split_ws(line);
            if (fields.size() != element.properties.size()) {
                throw line_error(path, line_no, "expected " + std::to_string(element.properties.size()) +
                                                    " vertex fields, got " + std::to_string(fields.size()));
            }
            double v[4] = {0.0, 0.0, 0.0, 0.0};
            const std::ptrdiff_t wanted[4] = {ix, iy, iz, ii};
            for (int k = 0; k < 4; ++k) {
                if (wanted[k] < 0) continue;
                if (!parse_double(fields[static_cast<std::size_t>(wanted[k])], v[k])) {
                    throw line_error(path, line_no, "cannot parse vertex field");
                }
            }
            cloud.points.emplace_back(v[0], v[1], v[2]);
            if (ii >= 0) intensity.push_back(static_cast<float>(v[3]));
        }
        if (ii >= 0) cloud.intensity = std::move(intensity);
    }
    return cloud;
}

void save_ply_ascii(const std::filesystem::path &path, const PointCloud &cloud) {
    validate(cloud);
    auto out = open_output(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty float x\nproperty float y\nproperty float z\n";
    if (cloud.intensity) out << "property float intensity\n";
    out << "end_header\n";
    full_precision(out);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto &p = cloud.points[i];
        out << p.x() << ' ' << p.y() << ' ' << p.z();
        if (cloud.intensity) out << ' ' << (*cloud.intensity)[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + describe(path));
}

CloudFormat format_from_extension(const std::filesystem::path &path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".bin") return CloudFormat::KittiBin;
    if (ext == ".xyz" || ext == ".txt") return CloudFormat::XyzText;
    if (ext == ".ply") return CloudFormat::PlyAscii;
    throw FormatError("cannot infer point cloud format from extension of " + describe(path));
}

CloudFormat parse_cloud_format(const std::string &name) {
    if (name == "bin" || name == "kitti") return CloudFormat::KittiBin;
    if (name == "xyz" || name == "txt") return CloudFormat::XyzText;
    if (name == "ply") return CloudFormat::PlyAscii;
    throw FormatError("unknown point cloud format '" + name + "'");
}

PointCloud load_cloud(const std::filesystem::path &path) { return load_cloud(path, format_from_extension(path)); }

PointCloud load_cloud(const std::filesystem::path &path, CloudFormat format) {
    switch (format) {
        case CloudFormat::KittiBin: return load_kitti_bin(path);
        case CloudFormat::XyzText: return load_xyz_text(path);
        case CloudFormat::PlyAscii: return load_ply_ascii(path);
    }
    throw FormatError("unsupported format");
}

void save_cloud(const std::filesystem::path &path, const PointCloud &cloud, CloudFormat format) {
    switch (format) {
        case CloudFormat::KittiBin: return save_kitti_bin(path, cloud);
        case CloudFormat::XyzText: return save_xyz_text(path, cloud);
        case CloudFormat::PlyAscii: return save_ply_ascii(path, cloud);
    }
}

PoseTrack load_kitti_poses(const std::filesystem::path &path) {
    auto in = open_input(path);
    PoseTrack track;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 12) {
            throw line_error(path, line_no, "expected 12 fields, got " + std::to_string(fields.size()));
        }
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        for (int k = 0; k < 12; ++k) {
            if (!parse_double(fields[static_cast<std::size_t>(k)], m(k / 4, k % 4))) {
                throw line_error(path, line_no, "field " + std::to_string(k + 1) + " is not a finite number");
            }
        }
        const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
        if (rotation_residual(r) > 1e-6) {
            throw line_error(path, line_no, "rotation block is not orthonormal");
        }
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
        m.topLeftCorner<3, 3>() = svd.matrixU() * svd.matrixV().transpose();
        track.emplace_back(m);
    }
    return track;
}

std::string to_kitti_pose_line(const RigidTransform &transform) {
    std::ostringstream out;
    full_precision(out);
    const auto &m = transform.matrix();
    for (int k = 0; k < 12; ++k) out << (k ? " " : "") << m(k / 4, k % 4);
    return out.str();
}

void save_kitti_poses(const std::filesystem::path &path, const PoseTrack &track) {
    auto out = open_output(path);
    for (const auto &pose : track) out << to_kitti_pose_line(pose) << '\n';
    if (!out) throw IoError("write failed for " + describe(path));
}

RigidTransform relative_ground_truth(const PoseTrack &track, std::size_t i, std::size_t j) {
    if (i >= track.size() || j >= track.size()) {
        throw InvalidArgument("pose index out of range (track has " + std::to_string(track.size()) +
                              " poses, asked for " + std::to_string(i) + " and " + std::to_string(j) + ")");
    }
    return inverse(track[i]) * track[j];
}

}  // namespace mireg
