// lno: data generation, kernel inspection, training, rollout and validation.
//
// Exit codes: 0 ok, 1 usage, 2 data/format, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lno/lno.hpp"

namespace fs = std::filesystem;
using lno::io::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string fmt(double v, int prec = 10) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw UsageError(std::string("--") + what + ": '" + cell + "' is not a number");
        }
    }
    if (out.empty()) throw UsageError(std::string("--") + what + " is empty");
    return out;
}

void ensure_parent(const std::string& path) {
    const fs::path p = fs::path(path).parent_path();
    if (!p.empty()) fs::create_directories(p);
}

/// Every option of the subcommand with its resolved value (given or default).
json resolved_options(const CLI::App& sub) {
    json opts = json::object();
    for (const CLI::Option* o : sub.get_options()) {
        if (o->get_lnames().empty()) continue;
        const std::string name = o->get_lnames().front();
        if (name == "help") continue;
        if (o->count() > 0) {
            const auto& r = o->results();
            opts[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!o->get_default_str().empty()) {
            opts[name] = o->get_default_str();
        }
    }
    return opts;
}

void write_manifest(const CLI::App& sub, const std::string& artifact, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, std::optional<std::uint64_t> seed) {
    json m = {{"tool", "lno"},
              {"tool_version", kToolVersion},
              {"subcommand", sub.get_name()},
              {"options", resolved_options(sub)},
              {"inputs", inputs},
              {"outputs", outputs}};
    m["seed"] = seed ? json(*seed) : json(nullptr);
    const std::string path = artifact + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw lno::FormatError("cannot write manifest '" + path + "'");
    out << m.dump(2) << '\n';
}

// ---------------------------------------------------------------- kernels

struct KernelsArgs {
    std::size_t n = 12, m = 8;
    std::string out = "kernels.csv";
};

int cmd_kernels(const CLI::App& sub, const KernelsArgs& a) {
    if (a.m > a.n || a.m == 0 || a.n < 2) throw UsageError("kernels: need 2 <= n and 1 <= m <= n");
    const auto k = lno::make_kernels_1d(a.n, a.m);
    ensure_parent(a.out);
    std::ofstream out(a.out);
    if (!out) throw lno::FormatError("cannot write '" + a.out + "'");
    out << "i";
    for (std::size_t m = 0; m < a.m; ++m) out << ",phi_" << m + 1;
    for (std::size_t m = 0; m < a.m; ++m) out << ",psi_" << m + 1;
    out << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < a.n; ++i) {
        out << i + 1;
        for (std::size_t m = 0; m < a.m; ++m) out << ',' << k.phi_at(m, i);
        for (std::size_t m = 0; m < a.m; ++m) out << ',' << k.psi_at(m, i);
        out << '\n';
    }
    write_manifest(sub, a.out, {}, {a.out}, std::nullopt);
    const double dev = lno::reference_table_deviation(k);
    if (dev >= 0.0) {
        std::cout << "max deviation from reference table (N=" << a.n << "): " << fmt(dev, 4) << '\n';
        if (dev > lno::reference_tables::kTableTolerance) {
            std::cerr << "kernels deviate from the reference table by more than "
                      << lno::reference_tables::kTableTolerance << '\n';
            return kNumerical;
        }
    }
    std::cout << "wrote " << a.out << '\n';
    return kOk;
}

// -------------------------------------------------------------- corrosion

struct CorrosionArgs {
    std::size_t n_blocks = 4, window = 12, reps = 2, h = 1;
};

int cmd_corrosion(const CorrosionArgs& a) {
    lno::LnoConfig c;
    c.n_blocks = a.n_blocks;
    c.window = a.window;
    c.repetitions = a.reps;
    c.half_width = a.h;
    c.modes = 1;
    if (auto v = c.violations(); !v.empty()) throw UsageError("corrosion: " + v.front());
    const auto r = lno::corrosion(c);
    std::cout << "r1=" << r.r1 << " r2=" << r.r2 << " r3=" << r.r3 << " R=" << r.total << " r_min=" << r.r_min
              << "  (grid points)\n";
    return kOk;
}

// --------------------------------------------------------------- gen-data

struct GenArgs {
    std::string equation = "burgers";
    double param = 0.01;
    std::size_t grid = 64;
    std::size_t d = 1;
    double dt = 0.05;
    double seconds = 5.0;
    std::size_t count = 10;
    std::uint64_t seed = 0;
    std::string out = "data.lnod";
    std::size_t substeps = 1;
    double ic_scale = 1.0;
    double force_duration = 0.05;
    std::size_t jobs = 0;
};

lno::Trajectory generate_one(const GenArgs& a, std::uint64_t seed, std::size_t steps) {
    const double dx = 2.0 / double(a.grid);
    auto scaled = [&](lno::GridField f) {
        for (double& v : f.values()) v *= a.ic_scale;
        return f;
    };
    if (a.equation == "burgers") {
        lno::GridField ic = a.d == 1 ? lno::random_ic_1d(seed, a.grid, dx)
                                     : lno::random_force_2d(seed, a.grid, a.grid, dx, 2);
        return lno::solve_burgers(scaled(ic), a.param, a.dt, steps, {}, a.substeps);
    }
    if (a.equation == "wave") {
        lno::GridField ic = a.d == 1 ? lno::random_ic_1d(seed, a.grid, dx)
                                     : lno::random_force_2d(seed, a.grid, a.grid, dx, 1);
        return lno::solve_wave(scaled(ic), a.param, a.dt, steps);
    }
    // navier-stokes: start from rest, random force for the warm-up, then free decay
    lno::GridField rest(2, {a.grid, a.grid}, dx);
    lno::GridField force = scaled(lno::random_force_2d(seed, a.grid, a.grid, dx, 2));
    return lno::solve_ns_periodic(rest, a.param, a.dt, steps, force, a.force_duration);
}

int cmd_gen_data(const CLI::App& sub, const GenArgs& a) {
    if (a.equation != "burgers" && a.equation != "wave" && a.equation != "ns")
        throw UsageError("gen-data: --equation must be burgers, wave or ns");
    if (a.d != 1 && a.d != 2) throw UsageError("gen-data: --d must be 1 or 2");
    if (a.equation == "ns" && a.d != 2) throw UsageError("gen-data: ns needs --d 2");
    if (a.grid < 4 || a.count == 0 || !(a.dt > 0.0) || !(a.seconds > 0.0) || !(a.param > 0.0))
        throw UsageError("gen-data: grid >= 4, count >= 1 and positive dt, seconds, param required");
    const double ratio = a.seconds / a.dt;
    const auto steps = std::size_t(std::llround(ratio));
    if (steps == 0 || std::abs(ratio - double(steps)) > 1e-9)
        throw UsageError("gen-data: --seconds must be a positive multiple of --dt");

    std::vector<lno::Trajectory> trajs(a.count);
    std::vector<std::exception_ptr> errors(a.count);
    const std::size_t jobs =
        std::max<std::size_t>(1, std::min(a.count, a.jobs ? a.jobs : std::thread::hardware_concurrency()));
    auto worker = [&](std::size_t tid) {
        for (std::size_t k = tid; k < a.count; k += jobs) {
            try {
                trajs[k] = generate_one(a, splitmix64(a.seed + k), steps);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    lno::Dataset ds;
    ds.info = lno::describe(trajs, a.seed);
    ds.info.equation = a.equation == "ns" ? "navier-stokes" : a.equation;
    ds.trajectories = std::move(trajs);
    ensure_parent(a.out);
    lno::save_dataset(ds, a.out);
    write_manifest(sub, a.out, {}, {a.out}, a.seed);
    std::cout << "wrote " << a.count << " trajectories x " << ds.info.frame_count << " frames to " << a.out
              << '\n';
    return kOk;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string config;
    std::string data;
    std::size_t iters = 100000;
    std::uint64_t seed = 0;
    std::string out = "run";
    double lr0 = 1e-3;
    std::size_t decay_interval = 10000;
    std::size_t batch = 4;
    std::size_t rollout = 10;
    std::size_t checkpoint_every = 0;
    bool no_augment = false;
};

lno::LnoConfig read_config(const std::string& path, const lno::DatasetInfo& info) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw lno::FormatError("cannot open config '" + path + "'");
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw lno::FormatError("config '" + path + "' is not valid JSON: " + e.what());
        }
    }
    // shape and spacing default to the dataset's
    if (!j.contains("d")) j["d"] = info.d;
    if (!j.contains("d_u")) j["d_u"] = info.d_u;
    if (!j.contains("dx")) j["dx"] = info.dx;
    if (!j.contains("dt")) j["dt"] = info.dt;
    const auto c = lno::config_from_json(j, "config '" + path + "'");
    if (c.d != info.d) throw lno::FormatError("config field 'd' does not match the dataset");
    if (c.d_u != info.d_u) throw lno::FormatError("config field 'd_u' does not match the dataset");
    return c;
}

int cmd_train(const CLI::App& sub, const TrainArgs& a) {
    const lno::DatasetInfo info = lno::read_dataset_info(a.data);
    const lno::LnoConfig config = read_config(a.config, info);
    const lno::Dataset ds = lno::load_dataset(a.data);
    fs::create_directories(a.out);
    const std::string ckpt = (fs::path(a.out) / "model.ckpt").string();
    const std::string loss_csv = (fs::path(a.out) / "loss.csv").string();

    lno::TrainSchedule s;
    s.iterations = a.iters;
    s.lr0 = a.lr0;
    s.decay_interval = a.decay_interval;
    s.batch = a.batch;
    s.rollout = a.rollout;
    s.checkpoint_every = a.checkpoint_every;
    s.augment = !a.no_augment;

    lno::LnoModel model = lno::LnoModel::build(config, a.seed);
    std::ofstream csv(loss_csv);
    if (!csv) throw lno::FormatError("cannot write '" + loss_csv + "'");
    csv << "iteration,lr,loss\n" << std::setprecision(10);
    lno::TrainHooks hooks;
    hooks.on_log = [&](const lno::LossRecord& r) {
        csv << r.iteration << ',' << r.lr << ',' << r.loss << '\n';
        csv.flush();
        std::cout << "iter " << r.iteration << "  lr " << fmt(r.lr, 4) << "  loss " << fmt(r.loss, 6) << '\n';
    };
    hooks.on_checkpoint = [&](std::size_t it, const lno::LnoModel& m) {
        lno::save_checkpoint(m, (fs::path(a.out) / ("model_" + std::to_string(it) + ".ckpt")).string());
    };
    const auto result = lno::train_loop(model, ds.trajectories, s, a.seed, hooks);
    lno::save_checkpoint(model, ckpt);
    write_manifest(sub, ckpt, {a.data, a.config}, {ckpt, loss_csv}, a.seed);
    std::cout << "initial loss " << fmt(result.initial_loss, 6) << ", mean of last 100 "
              << fmt(result.tail_mean(), 6) << "\nwrote " << ckpt << '\n';
    return kOk;
}

// ---------------------------------------------------------------- rollout

struct RolloutArgs {
    std::string checkpoint;
    std::string ic;
    std::size_t ic_trajectory = 0;
    std::size_t ic_frame = 0;
    std::size_t steps = 10;
    std::string boundary;
    std::string ibm;
    double ibm_ds = 0.0;
    std::string out = "rollout.lnod";
    std::string export_ascii;
    std::string export_raw;
};

void export_frames(const lno::Trajectory& t, const std::string& ascii_dir, const std::string& raw_dir) {
    if (!ascii_dir.empty()) fs::create_directories(ascii_dir);
    if (!raw_dir.empty()) fs::create_directories(raw_dir);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const lno::GridField& f = t[k];
        char stem[32];
        std::snprintf(stem, sizeof stem, "frame_%05zu", k);
        if (!ascii_dir.empty()) {
            const lno::Plane p = f.plane();
            for (std::size_t c = 0; c < f.channels(); ++c) {
                std::ofstream out(fs::path(ascii_dir) / (std::string(stem) + "_c" + std::to_string(c) + ".txt"));
                out << std::setprecision(10);
                for (std::size_t r = 0; r < p.rows; ++r) {
                    for (std::size_t q = 0; q < p.cols; ++q) out << (q ? " " : "") << f.at(c, r * p.cols + q);
                    out << '\n';
                }
            }
        }
        if (!raw_dir.empty()) {
            std::ofstream out(fs::path(raw_dir) / (std::string(stem) + ".f64"), std::ios::binary);
            lno::io::write_values(out, f.values().data(), f.size());
        }
    }
}

int cmd_rollout(const CLI::App& sub, const RolloutArgs& a) {
    const lno::DatasetInfo info = lno::read_dataset_info(a.ic);
    const lno::LnoModel model = lno::load_checkpoint(a.checkpoint);
    const lno::LnoConfig& c = model.config();
    if (info.d != c.d || info.d_u != c.d_u)
        throw lno::FormatError("initial condition file fields 'd'/'d_u' do not match the checkpoint");
    if (a.ic_trajectory >= info.trajectory_count)
        throw UsageError("--ic-trajectory beyond trajectory_count " + std::to_string(info.trajectory_count));
    if (a.ic_frame >= info.frame_count)
        throw UsageError("--ic-frame beyond frame_count " + std::to_string(info.frame_count));
    const lno::Dataset ds = lno::load_dataset(a.ic);
    const lno::GridField& ic = ds.trajectories[a.ic_trajectory][a.ic_frame];

    lno::BoundarySpec spec;
    try {
        spec = a.boundary.empty() ? lno::BoundarySpec::periodic(c.d) : lno::parse_boundary(a.boundary, c.d);
        spec.validate(c.d, c.d_u);
    } catch (const lno::ShapeError& e) {
        throw UsageError(std::string("--boundary: ") + e.what());
    }
    std::optional<lno::IbmGeometry> geom;
    if (!a.ibm.empty()) geom = lno::load_ibm_csv(a.ibm, a.ibm_ds);

    lno::Trajectory t = lno::rollout(model, ic, a.steps, spec, geom ? &*geom : nullptr);
    t.equation = "lno-rollout";
    lno::Dataset outds;
    outds.info = lno::describe({t}, 0);
    outds.trajectories.push_back(std::move(t));
    ensure_parent(a.out);
    lno::save_dataset(outds, a.out);
    export_frames(outds.trajectories.front(), a.export_ascii, a.export_raw);
    std::vector<std::string> inputs{a.checkpoint, a.ic};
    if (!a.ibm.empty()) inputs.push_back(a.ibm);
    write_manifest(sub, a.out, inputs, {a.out}, std::nullopt);
    std::cout << "wrote " << a.steps + 1 << " frames to " << a.out << '\n';
    return kOk;
}

// --------------------------------------------------------------- validate

struct ValidateArgs {
    std::string checkpoint;
    std::string data;
    std::string times = "0.5,1,2";
    std::string boundary;
    std::string out = "validate.csv";
};

int cmd_validate(const CLI::App& sub, const ValidateArgs& a) {
    const lno::DatasetInfo info = lno::read_dataset_info(a.data);
    const lno::LnoModel model = lno::load_checkpoint(a.checkpoint);
    if (info.d != model.config().d || info.d_u != model.config().d_u)
        throw lno::FormatError("dataset fields 'd'/'d_u' do not match the checkpoint");
    const auto times = parse_list(a.times, "times");
    lno::BoundarySpec spec;
    try {
        spec = a.boundary.empty() ? lno::BoundarySpec::periodic(info.d) : lno::parse_boundary(a.boundary, info.d);
    } catch (const lno::ShapeError& e) {
        throw UsageError(std::string("--boundary: ") + e.what());
    }
    const lno::Dataset ds = lno::load_dataset(a.data);
    std::vector<lno::ErrorRow> rows;
    try {
        rows = lno::validate_error(model, ds.trajectories, times, spec);
    } catch (const lno::ShapeError& e) {
        throw UsageError(e.what());
    }
    ensure_parent(a.out);
    std::ofstream csv(a.out);
    if (!csv) throw lno::FormatError("cannot write '" + a.out + "'");
    csv << "time,mean_error,std_error\n" << std::setprecision(10);
    std::cout << "time      E_t          std\n";
    for (const auto& r : rows) {
        csv << r.time << ',' << r.mean << ',' << r.stddev << '\n';
        std::cout << std::left << std::setw(10) << fmt(r.time, 6) << std::setw(13) << fmt(r.mean, 6)
                  << fmt(r.stddev, 6) << '\n';
    }
    write_manifest(sub, a.out, {a.checkpoint, a.data}, {a.out}, std::nullopt);
    return kOk;
}

int run(int argc, char** argv);

// ----------------------------------------------------------------- replay

int cmd_replay(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw lno::FormatError("cannot open manifest '" + manifest_path + "'");
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw lno::FormatError("manifest is not valid JSON: " + std::string(e.what()));
    }
    const auto sub = lno::io::field<std::string>(m, "subcommand", "manifest");
    if (sub == "replay") throw lno::FormatError("manifest field 'subcommand' cannot be replay");
    if (!m.contains("options") || !m["options"].is_object())
        throw lno::FormatError("manifest field 'options' is missing");
    std::vector<std::string> args{"lno", sub};
    for (const auto& [key, value] : m["options"].items()) {
        if (value.is_array()) {
            for (const auto& v : value) args.insert(args.end(), {"--" + key, v.get<std::string>()});
        } else {
            const auto v = value.get<std::string>();
            // flags are recorded with their value
            if (v == "true") args.push_back("--" + key);
            else if (v != "false") args.insert(args.end(), {"--" + key, v});
        }
    }
    std::vector<char*> cargs;
    for (auto& s : args) cargs.push_back(s.data());
    std::cout << "replaying:";
    for (const auto& s : args) std::cout << ' ' << s;
    std::cout << '\n';
    return run(int(cargs.size()), cargs.data());
}

int run(int argc, char** argv) {
    CLI::App app{"Local neural operator toolkit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    KernelsArgs ka;
    auto* k = app.add_subcommand("kernels", "dump Legendre decomposition/reconstruction kernels as CSV");
    k->add_option("--n", ka.n, "window size N");
    k->add_option("--m", ka.m, "retained modes M");
    k->add_option("--out", ka.out, "CSV output path");

    CorrosionArgs ca;
    auto* co = app.add_subcommand("corrosion", "print corrosion widths for an architecture");
    co->set_help_flag("--help", "print this help and exit"); // -h would clash with --h
    co->add_option("--n-blocks", ca.n_blocks, "inner blocks n");
    co->add_option("--window", ca.window, "spectral window N");
    co->add_option("--reps", ca.reps, "window repetitions k");
    co->add_option("--h", ca.h, "physical kernel half-width H");

    GenArgs ga;
    auto* g = app.add_subcommand("gen-data", "generate reference trajectories");
    g->add_option("--equation", ga.equation, "burgers | wave | ns")->check(CLI::IsMember({"burgers", "wave", "ns"}));
    g->add_option("--param", ga.param, "viscosity (burgers, ns) or wave speed (wave)");
    g->add_option("--grid", ga.grid, "points per axis on [-1,1)");
    g->add_option("--d", ga.d, "spatial dimensions");
    g->add_option("--dt", ga.dt, "time between frames");
    g->add_option("--seconds", ga.seconds, "recorded duration per trajectory");
    g->add_option("--count", ga.count, "number of trajectories");
    g->add_option("--seed", ga.seed, "base seed");
    g->add_option("--out", ga.out, "dataset output path");
    g->add_option("--substeps", ga.substeps, "implicit Burgers steps per frame");
    g->add_option("--ic-scale", ga.ic_scale, "multiplier on the random initial field / force");
    g->add_option("--force-duration", ga.force_duration, "ns warm-up forcing time");
    g->add_option("--jobs", ga.jobs, "worker threads (0 = all cores)");

    TrainArgs ta;
    auto* t = app.add_subcommand("train", "train a model on a dataset");
    t->add_option("--config", ta.config, "JSON model config (fields of the checkpoint config)");
    t->add_option("--data", ta.data, "dataset path")->required();
    t->add_option("--iters", ta.iters, "iterations");
    t->add_option("--seed", ta.seed, "seed for weights and sampling");
    t->add_option("--out", ta.out, "output directory");
    t->add_option("--lr0", ta.lr0, "initial learning rate");
    t->add_option("--decay-interval", ta.decay_interval, "iterations between 0.7x decays");
    t->add_option("--batch", ta.batch, "windows per iteration");
    t->add_option("--rollout", ta.rollout, "recurrent steps in the loss");
    t->add_option("--checkpoint-every", ta.checkpoint_every, "periodic checkpoint cadence (0 = off)");
    t->add_flag("--no-augment", ta.no_augment, "disable 2-D symmetry augmentation");

    RolloutArgs ra;
    auto* r = app.add_subcommand("rollout", "march an initial condition with a trained model");
    r->add_option("--checkpoint", ra.checkpoint, "model checkpoint")->required();
    r->add_option("--ic", ra.ic, "dataset file holding the initial condition")->required();
    r->add_option("--ic-trajectory", ra.ic_trajectory, "trajectory index in --ic");
    r->add_option("--ic-frame", ra.ic_frame, "frame index in --ic");
    r->add_option("--steps", ra.steps, "time steps");
    r->add_option("--boundary", ra.boundary, "e.g. x:periodic,y:constant=1.0,0.0 (default all periodic)");
    r->add_option("--ibm", ra.ibm, "immersed boundary CSV (x,y,u_bc,v_bc)");
    r->add_option("--ibm-ds", ra.ibm_ds, "Lagrange spacing (0 = infer)");
    r->add_option("--out", ra.out, "trajectory output path");
    r->add_option("--export-ascii", ra.export_ascii, "directory for per-frame ASCII grids");
    r->add_option("--export-raw", ra.export_raw, "directory for per-frame float64 dumps");

    ValidateArgs va;
    auto* v = app.add_subcommand("validate", "mean L2 error of rollouts against a dataset");
    v->add_option("--checkpoint", va.checkpoint, "model checkpoint")->required();
    v->add_option("--data", va.data, "validation dataset")->required();
    v->add_option("--times", va.times, "comma-separated times");
    v->add_option("--boundary", va.boundary, "boundary spec (default all periodic)");
    v->add_option("--out", va.out, "CSV output path");

    std::string manifest;
    auto* rp = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    rp->add_option("manifest", manifest, "manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (k->parsed()) return cmd_kernels(*k, ka);
    if (co->parsed()) return cmd_corrosion(ca);
    if (g->parsed()) return cmd_gen_data(*g, ga);
    if (t->parsed()) return cmd_train(*t, ta);
    if (r->parsed()) return cmd_rollout(*r, ra);
    if (v->parsed()) return cmd_validate(*v, va);
    if (rp->parsed()) return cmd_replay(manifest);
    return kUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const lno::FormatError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const lno::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const lno::ShapeError& e) {
        std::cerr << "shape error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
