#pragma once

// Dataset layout: one JSON line
//   {"format":"lno-dataset","version":1,"equation","parameter","d","d_u","dims",
//    "dx","dt","frame_count","trajectory_count","seed"}
// then trajectory_count * frame_count frames of little-endian float32, each frame
// channel-major then row-major, trajectories one after another.

#include <cstdint>
#include <string>
#include <vector>

#include "lno/io.hpp"
#include "lno/trajectory.hpp"

namespace lno {

inline constexpr const char* kDatasetFormat = "lno-dataset";
inline constexpr int kDatasetVersion = 1;

struct DatasetInfo {
    std::string equation;
    double parameter = 0.0;
    std::size_t d = 1;
    std::size_t d_u = 1;
    std::vector<std::size_t> dims;
    double dx = 0.0;
    double dt = 0.0;
    std::size_t frame_count = 0; ///< frames per trajectory
    std::size_t trajectory_count = 0;
    std::uint64_t seed = 0;

    std::size_t frame_values() const {
        std::size_t n = d_u;
        for (auto v : dims) n *= v;
        return n;
    }
};

struct Dataset {
    DatasetInfo info;
    std::vector<Trajectory> trajectories;
};

inline io::json dataset_header(const DatasetInfo& i) {
    return {{"format", kDatasetFormat},
            {"version", kDatasetVersion},
            {"equation", i.equation},
            {"parameter", i.parameter},
            {"d", i.d},
            {"d_u", i.d_u},
            {"dims", i.dims},
            {"dx", i.dx},
            {"dt", i.dt},
            {"frame_count", i.frame_count},
            {"trajectory_count", i.trajectory_count},
            {"seed", i.seed}};
}

/// Fills the info from the trajectories (equation, shape, counts); seed is the caller's.
inline DatasetInfo describe(const std::vector<Trajectory>& trajs, std::uint64_t seed) {
    if (trajs.empty()) throw ShapeError("dataset needs at least one trajectory");
    const Trajectory& t0 = trajs.front();
    t0.validate();
    DatasetInfo info;
    info.equation = t0.equation;
    info.parameter = t0.parameter;
    info.d = t0[0].rank();
    info.d_u = t0[0].channels();
    info.dims = t0[0].dims();
    info.dx = t0[0].dx();
    info.dt = t0.dt;
    info.frame_count = t0.size();
    info.trajectory_count = trajs.size();
    info.seed = seed;
    for (std::size_t k = 1; k < trajs.size(); ++k) {
        trajs[k].validate();
        if (trajs[k].size() != t0.size() || !trajs[k][0].same_shape(t0[0]))
            throw ShapeError("dataset trajectory " + std::to_string(k) + " differs in length or shape");
    }
    return info;
}

inline void save_dataset(const Dataset& ds, std::ostream& out) {
    io::write_header(out, dataset_header(ds.info));
    std::vector<float> buf;
    for (const Trajectory& t : ds.trajectories)
        for (const GridField& f : t.frames) {
            if (f.size() != ds.info.frame_values())
                throw ShapeError("dataset frame has " + std::to_string(f.size()) + " values, header implies " +
                                 std::to_string(ds.info.frame_values()));
            buf.assign(f.values().begin(), f.values().end());
            io::write_values(out, buf.data(), buf.size());
        }
    if (!out) throw FormatError("dataset: write failed");
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
    auto out = io::open_out(path);
    save_dataset(ds, out);
}

inline DatasetInfo parse_dataset_header(const io::json& h) {
    const std::string what = "dataset";
    if (io::field<std::string>(h, "format", what) != kDatasetFormat)
        throw FormatError(what + ": header field 'format' is not '" + kDatasetFormat + "'");
    const int version = io::field<int>(h, "version", what);
    if (version != kDatasetVersion)
        throw FormatError(what + ": header field 'version' is " + std::to_string(version) +
                          ", this build reads version " + std::to_string(kDatasetVersion));
    DatasetInfo i;
    i.equation = io::field<std::string>(h, "equation", what);
    i.parameter = io::field<double>(h, "parameter", what);
    i.d = io::field<std::size_t>(h, "d", what);
    i.d_u = io::field<std::size_t>(h, "d_u", what);
    i.dims = io::field<std::vector<std::size_t>>(h, "dims", what);
    i.dx = io::field<double>(h, "dx", what);
    i.dt = io::field<double>(h, "dt", what);
    i.frame_count = io::field<std::size_t>(h, "frame_count", what);
    i.trajectory_count = io::field<std::size_t>(h, "trajectory_count", what);
    i.seed = io::field<std::uint64_t>(h, "seed", what);
    if (i.d != 1 && i.d != 2) throw FormatError(what + ": header field 'd' must be 1 or 2");
    if (i.dims.size() != i.d) throw FormatError(what + ": header field 'dims' must have d entries");
    for (auto v : i.dims)
        if (v == 0) throw FormatError(what + ": header field 'dims' has a zero extent");
    if (i.d_u == 0) throw FormatError(what + ": header field 'd_u' must be positive");
    if (!(i.dx > 0.0)) throw FormatError(what + ": header field 'dx' must be positive");
    if (!(i.dt > 0.0)) throw FormatError(what + ": header field 'dt' must be positive");
    if (i.frame_count == 0) throw FormatError(what + ": header field 'frame_count' must be positive");
    if (i.trajectory_count == 0) throw FormatError(what + ": header field 'trajectory_count' must be positive");
    return i;
}

inline Dataset load_dataset(std::istream& in) {
    Dataset ds;
    ds.info = parse_dataset_header(io::read_header(in, "dataset"));
    const DatasetInfo& i = ds.info;
    std::vector<float> buf(i.frame_values());
    ds.trajectories.resize(i.trajectory_count);
    for (Trajectory& t : ds.trajectories) {
        t.dt = i.dt;
        t.equation = i.equation;
        t.parameter = i.parameter;
        t.frames.reserve(i.frame_count);
        for (std::size_t k = 0; k < i.frame_count; ++k) {
            io::read_values(in, buf.data(), buf.size(), "dataset");
            t.frames.emplace_back(i.d_u, i.dims, i.dx, std::vector<double>(buf.begin(), buf.end()));
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("dataset: trailing bytes after the frames");
    return ds;
}

inline Dataset load_dataset(const std::string& path) {
    auto in = io::open_in(path);
    return load_dataset(in);
}

inline DatasetInfo read_dataset_info(const std::string& path) {
    auto in = io::open_in(path);
    return parse_dataset_header(io::read_header(in, "dataset"));
}

} // namespace lno
