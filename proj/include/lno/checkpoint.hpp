#pragma once

// Checkpoint layout: one JSON line
//   {"format":"lno-checkpoint","version":1,"config":{...},
//    "sections":[{"name","shape","offset","count"}...],"total_weights":n}
// then `n` little-endian float64 values. Offsets are bytes from the first byte
// after the header newline.

#include <sstream>
#include <string>

#include "lno/io.hpp"
#include "lno/model.hpp"

namespace lno {

inline constexpr const char* kCheckpointFormat = "lno-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline io::json config_to_json(const LnoConfig& c) {
    return {{"d", c.d},           {"d_u", c.d_u},     {"width", c.width},
            {"proj_hidden", c.proj_hidden},           {"n_blocks", c.n_blocks},
            {"window", c.window}, {"modes", c.modes}, {"repetitions", c.repetitions},
            {"half_width", c.half_width},             {"dx", c.dx},
            {"dt", c.dt}};
}

inline LnoConfig config_from_json(const io::json& j, const std::string& what = "config") {
    if (!j.is_object()) throw FormatError(what + " must be a JSON object");
    LnoConfig c;
    auto opt = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = io::field<std::decay_t<decltype(dst)>>(j, key, what);
    };
    opt("d", c.d);
    opt("d_u", c.d_u);
    opt("width", c.width);
    opt("proj_hidden", c.proj_hidden);
    opt("n_blocks", c.n_blocks);
    opt("window", c.window);
    opt("modes", c.modes);
    opt("repetitions", c.repetitions);
    opt("half_width", c.half_width);
    opt("dx", c.dx);
    opt("dt", c.dt);
    if (auto v = c.violations(); !v.empty()) throw FormatError(what + ": " + v.front());
    return c;
}

inline io::json checkpoint_header(const LnoModel& model) {
    io::json sections = io::json::array();
    std::size_t offset = 0;
    for (const WeightTensor* w : model.parameters()) {
        sections.push_back({{"name", w->name}, {"shape", w->shape}, {"offset", offset}, {"count", w->count()}});
        offset += w->count() * sizeof(double);
    }
    return {{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"byte_order", "little"},
            {"dtype", "float64"},
            {"config", config_to_json(model.config())},
            {"sections", sections},
            {"total_weights", model.weight_count()}};
}

inline void save_checkpoint(const LnoModel& model, std::ostream& out) {
    io::write_header(out, checkpoint_header(model));
    for (const WeightTensor* w : model.parameters()) io::write_values(out, w->values.data(), w->count());
    if (!out) throw FormatError("checkpoint: write failed");
}

inline void save_checkpoint(const LnoModel& model, const std::string& path) {
    auto out = io::open_out(path);
    save_checkpoint(model, out);
}

inline LnoModel load_checkpoint(std::istream& in) {
    const std::string what = "checkpoint";
    const io::json h = io::read_header(in, what);
    if (io::field<std::string>(h, "format", what) != kCheckpointFormat)
        throw FormatError(what + ": header field 'format' is not '" + kCheckpointFormat + "'");
    const int version = io::field<int>(h, "version", what);
    if (version != kCheckpointVersion)
        throw FormatError(what + ": header field 'version' is " + std::to_string(version) +
                          ", this build reads version " + std::to_string(kCheckpointVersion));
    if (h.contains("byte_order") && io::field<std::string>(h, "byte_order", what) != "little")
        throw FormatError(what + ": header field 'byte_order' must be 'little'");
    if (!h.contains("config")) throw FormatError(what + ": header field 'config' is missing");
    const LnoConfig config = config_from_json(h.at("config"), what + " config");
    const auto total = io::field<std::size_t>(h, "total_weights", what);
    if (total != count_weights(config))
        throw FormatError(what + ": header field 'total_weights' is " + std::to_string(total) +
                          " but the config implies " + std::to_string(count_weights(config)));

    LnoModel model = LnoModel::build(config, 0);
    const auto params = model.parameters();
    if (!h.contains("sections") || !h.at("sections").is_array())
        throw FormatError(what + ": header field 'sections' is missing");
    const io::json& sections = h.at("sections");
    if (sections.size() != params.size())
        throw FormatError(what + ": header field 'sections' lists " + std::to_string(sections.size()) +
                          " tensors, expected " + std::to_string(params.size()));
    std::size_t offset = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const io::json& s = sections[i];
        const auto name = io::field<std::string>(s, "name", what + " section");
        if (name != params[i]->name)
            throw FormatError(what + ": section " + std::to_string(i) + " is '" + name + "', expected '" +
                              params[i]->name + "'");
        if (io::field<std::vector<std::size_t>>(s, "shape", what + " section") != params[i]->shape)
            throw FormatError(what + ": section '" + name + "' has the wrong shape");
        if (io::field<std::size_t>(s, "offset", what + " section") != offset)
            throw FormatError(what + ": section '" + name + "' has an unexpected offset");
        offset += params[i]->count() * sizeof(double);
    }
    for (WeightTensor* w : params) io::read_values(in, w->values.data(), w->count(), what);
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError(what + ": trailing bytes after the weight blob");
    return model;
}

inline LnoModel load_checkpoint(const std::string& path) {
    auto in = io::open_in(path);
    return load_checkpoint(in);
}

} // namespace lno
