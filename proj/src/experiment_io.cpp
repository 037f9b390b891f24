#include "eoslab/experiment_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

namespace eoslab {

namespace fs = std::filesystem;

namespace {

// Strict view of one JSON object: construction rejects keys outside `allowed`.
class Fields {
public:
    Fields(const json& j, std::string where, std::initializer_list<const char*> allowed)
        : j_(j), where_(std::move(where)) {
        if (!j.is_object()) throw ConfigError(where_, "expected a JSON object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, _] : j.items())
            if (!ok.count(k)) throw ConfigError(path(k), "unknown key");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }
    const json& at(const char* key) const {
        if (!has(key)) throw ConfigError(path(key), "missing required key");
        return j_.at(key);
    }

    double number(const char* key) const {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        return v.get<double>();
    }
    double number(const char* key, double def) const { return has(key) ? number(key) : def; }

    long integer(const char* key) const {
        const json& v = at(key);
        if (v.is_number_integer()) return v.get<long>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e18) return static_cast<long>(d);
        }
        throw ConfigError(path(key), "expected an integer");
    }
    long integer(const char* key, long def) const { return has(key) ? integer(key) : def; }
    std::size_t count(const char* key, std::size_t def) const {
        if (!has(key)) return def;
        const long v = integer(key);
        if (v < 0) throw ConfigError(path(key), "must be >= 0");
        return static_cast<std::size_t>(v);
    }

    bool boolean(const char* key, bool def) const {
        if (!has(key)) return def;
        const json& v = at(key);
        if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key) const {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const char* key, const std::string& def) const { return has(key) ? string(key) : def; }

private:
    const json& j_;
    std::string where_;
};

template <class Fn>
auto wrap_invalid(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    }
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string activation_name(const Activation& a) {
    switch (a.kind) {
        case Activation::Kind::Tanh: return "tanh";
        case Activation::Kind::ReLU: return "relu";
        case Activation::Kind::LeakyReLU: return "leaky_relu";
        case Activation::Kind::ReLUk: return "relu" + std::to_string(a.power);
    }
    return "tanh";
}

Activation activation_from_name(const std::string& s, const std::string& where) {
    if (s == "tanh") return Activation::tanh();
    if (s == "relu") return Activation::relu();
    if (s == "leaky_relu") return Activation::leaky_relu();
    static const std::regex pow_re(R"(relu\^?([0-9]+))");
    std::smatch m;
    if (std::regex_match(s, m, pow_re)) {
        const int k = std::stoi(m[1]);
        if (k < 2) throw ConfigError(where, "ReLU power must be >= 2");
        return Activation::relu_k(k);
    }
    throw ConfigError(where, "unknown activation '" + s + "' (tanh, relu, leaky_relu, reluK)");
}

const std::pair<Mode, const char*> kModeNames[] = {
    {Mode::Simulate, "simulate"}, {Mode::Sweep, "sweep"},   {Mode::Verify, "verify"},
    {Mode::NNTrain, "nn-train"},  {Mode::Props, "props"},   {Mode::FigureData, "figure-data"},
};

}  // namespace

std::string to_string(Mode m) {
    for (const auto& [mode, name] : kModeNames)
        if (mode == m) return name;
    return "?";
}

double lr_from_multiplier(const Objective& spec, double x0, double y0, double C) {
    return C / lr_denominator(TheoremId::Stability_Necessity, spec, x0, y0);
}

// ---- objective / run configs ----

json to_json(const Objective& f) {
    switch (f.family()) {
        case Family::Good: return {{"kind", "good"}, {"a", f.a()}};
        case Family::Bad: return {{"kind", "bad"}, {"b", f.b()}};
        case Family::Perturbed: return {{"kind", "perturbed"}};
    }
    return {};
}

Objective objective_from_json(const json& j, const std::string& where) {
    const Fields top(j, where, {"kind", "a", "b"});
    const std::string kind = top.string("kind");
    return wrap_invalid(where, [&] {
        if (kind == "good") {
            const Fields f(j, where, {"kind", "a"});
            return Objective::good(f.number("a"));
        }
        if (kind == "bad") {
            const Fields f(j, where, {"kind", "b"});
            return Objective::bad(static_cast<int>(f.integer("b")));
        }
        if (kind == "perturbed") {
            const Fields f(j, where, {"kind"});
            return Objective::perturbed();
        }
        throw ConfigError(top.path("kind"), "expected good, bad or perturbed, got '" + kind + "'");
    });
}

json to_json(const RunConfig& c) {
    return {{"spec", to_json(c.spec)},
            {"x0", c.x0},
            {"y0", c.y0},
            {"h", c.learning_rate},
            {"max_iters", c.max_iters},
            {"convergence_tol", c.convergence_tol},
            {"divergence_bound", c.divergence_bound},
            {"record_stride", c.record_stride},
            {"stall_tol", c.stall_tol}};
}

RunConfig run_config_from_json(const json& j, const std::string& where) {
    const Fields f(j, where,
                   {"spec", "x0", "y0", "h", "C", "max_iters", "convergence_tol", "divergence_bound", "record_stride",
                    "stall_tol"});
    RunConfig c;
    c.spec = objective_from_json(f.at("spec"), f.path("spec"));
    c.x0 = f.number("x0");
    c.y0 = f.number("y0");
    if (f.has("h") == f.has("C")) throw ConfigError(where, "give exactly one of h or C");
    c.learning_rate = f.has("h") ? f.number("h") : lr_from_multiplier(c.spec, c.x0, c.y0, f.number("C"));
    c.max_iters = f.integer("max_iters", c.max_iters);
    c.convergence_tol = f.number("convergence_tol", c.convergence_tol);
    c.divergence_bound = f.number("divergence_bound", c.divergence_bound);
    c.record_stride = f.integer("record_stride", c.record_stride);
    c.stall_tol = f.number("stall_tol", c.stall_tol);
    wrap_invalid(where, [&] {
        c.validate();
        return 0;
    });
    return c;
}

json to_json(const GridCell& c) {
    json j{{"spec", to_json(c.spec)}, {"x0", c.x0}, {"y0", c.y0}};
    j[c.lr.kind == LearningRate::Kind::Multiplier ? "C" : "h"] = c.lr.value;
    return j;
}

GridCell grid_cell_from_json(const json& j, const std::string& where) {
    const Fields f(j, where, {"spec", "x0", "y0", "C", "h"});
    GridCell c;
    c.spec = objective_from_json(f.at("spec"), f.path("spec"));
    c.x0 = f.number("x0");
    c.y0 = f.number("y0");
    if (f.has("h") == f.has("C")) throw ConfigError(where, "give exactly one of h or C");
    c.lr = f.has("C") ? LearningRate::multiplier(f.number("C")) : LearningRate::absolute(f.number("h"));
    return c;
}

std::vector<GridCell> grid_from_json(const json& j, const std::string& where) {
    const json* arr = &j;
    if (j.is_object()) {
        const Fields f(j, where, {"cells"});
        arr = &f.at("cells");
    }
    if (!arr->is_array()) throw ConfigError(where, "expected an array of cells");
    std::vector<GridCell> cells;
    for (std::size_t i = 0; i < arr->size(); ++i)
        cells.push_back(grid_cell_from_json((*arr)[i], where + "[" + std::to_string(i) + "]"));
    if (cells.empty()) throw ConfigError(where, "grid is empty");
    return cells;
}

// ---- networks ----

json to_json(const NetworkConfig& c) {
    return {{"N0", c.N0},
            {"N1", c.N1},
            {"N2", c.N2},
            {"depth", c.depth},
            {"loss", c.loss == LossKind::L2 ? "l2" : "huber"},
            {"huber_delta", c.huber_delta},
            {"activation", activation_name(c.activation)},
            {"batch_norm", c.batch_norm},
            {"bn_eps", c.bn_eps},
            {"parallel_matmul", c.parallel_matmul},
            {"init", {{"seed", c.init.seed}, {"frob_W1", c.init.frob_W1}, {"frob_W2", c.init.frob_W2}}}};
}

NetworkConfig network_config_from_json(const json& j, const std::string& where) {
    const Fields f(j, where,
                   {"N0", "N1", "N2", "depth", "loss", "huber_delta", "activation", "batch_norm", "bn_eps",
                    "parallel_matmul", "init"});
    NetworkConfig c;
    c.N0 = f.count("N0", c.N0);
    c.N1 = f.count("N1", c.N1);
    c.N2 = f.count("N2", c.N2);
    c.depth = static_cast<int>(f.integer("depth", c.depth));
    const std::string loss = f.string("loss", "l2");
    if (loss == "l2")
        c.loss = LossKind::L2;
    else if (loss == "huber")
        c.loss = LossKind::Huber;
    else
        throw ConfigError(f.path("loss"), "expected l2 or huber, got '" + loss + "'");
    c.huber_delta = f.number("huber_delta", c.huber_delta);
    if (f.has("activation")) c.activation = activation_from_name(f.string("activation"), f.path("activation"));
    c.batch_norm = f.boolean("batch_norm", c.batch_norm);
    c.bn_eps = f.number("bn_eps", c.bn_eps);
    c.parallel_matmul = f.boolean("parallel_matmul", c.parallel_matmul);
    if (f.has("init")) {
        const Fields in(f.at("init"), f.path("init"), {"seed", "frob_W1", "frob_W2"});
        c.init.seed = static_cast<std::uint64_t>(in.integer("seed", static_cast<long>(c.init.seed)));
        c.init.frob_W1 = in.number("frob_W1", c.init.frob_W1);
        c.init.frob_W2 = in.number("frob_W2", c.init.frob_W2);
    }
    wrap_invalid(where, [&] {
        c.validate();
        return 0;
    });
    return c;
}

json to_json(const NNExperiment& e) {
    json j{{"network", to_json(e.network)},
           {"train",
            {{"h", e.train.h},
             {"epochs", e.train.epochs},
             {"record_stride", e.train.record_stride},
             {"lanczos_iters", e.train.lanczos_iters},
             {"hvp_seed", e.train.hvp_seed}}}};
    if (e.lr_multiplier) j["lr_multiplier"] = *e.lr_multiplier;
    if (e.data.kind == DataConfig::Kind::Synthetic)
        j["data"] = {{"kind", "synthetic"}, {"samples", e.data.samples}, {"seed", e.data.seed}};
    else
        j["data"] = {{"kind", "idx"},          {"images", e.data.images}, {"labels", e.data.labels},
                     {"subset", e.data.subset}, {"seed", e.data.seed},     {"classes", e.data.classes}};
    return j;
}

NNExperiment nn_experiment_from_json(const json& j, const std::string& where) {
    const Fields f(j, where, {"network", "train", "lr_multiplier", "data"});
    NNExperiment e;
    if (f.has("network")) e.network = network_config_from_json(f.at("network"), f.path("network"));
    if (f.has("train")) {
        const Fields t(f.at("train"), f.path("train"), {"h", "epochs", "record_stride", "lanczos_iters", "hvp_seed"});
        e.train.h = t.number("h", e.train.h);
        e.train.epochs = t.integer("epochs", e.train.epochs);
        e.train.record_stride = t.integer("record_stride", e.train.record_stride);
        e.train.lanczos_iters = static_cast<int>(t.integer("lanczos_iters", e.train.lanczos_iters));
        e.train.hvp_seed = static_cast<std::uint64_t>(t.integer("hvp_seed", static_cast<long>(e.train.hvp_seed)));
        if (!(e.train.h > 0.0)) throw ConfigError(t.path("h"), "must be > 0");
        if (e.train.epochs < 0) throw ConfigError(t.path("epochs"), "must be >= 0");
        if (e.train.lanczos_iters < 1) throw ConfigError(t.path("lanczos_iters"), "must be >= 1");
    }
    if (f.has("lr_multiplier")) {
        e.lr_multiplier = f.number("lr_multiplier");
        if (!(*e.lr_multiplier > 0.0)) throw ConfigError(f.path("lr_multiplier"), "must be > 0");
    }
    if (f.has("data")) {
        const Fields d0(f.at("data"), f.path("data"), {"kind", "samples", "seed", "images", "labels", "subset", "classes"});
        const std::string kind = d0.string("kind");
        if (kind == "synthetic") {
            const Fields d(f.at("data"), f.path("data"), {"kind", "samples", "seed"});
            e.data.kind = DataConfig::Kind::Synthetic;
            e.data.samples = d.count("samples", e.data.samples);
            e.data.seed = static_cast<std::uint64_t>(d.integer("seed", static_cast<long>(e.data.seed)));
        } else if (kind == "idx") {
            const Fields d(f.at("data"), f.path("data"), {"kind", "images", "labels", "subset", "seed", "classes"});
            e.data.kind = DataConfig::Kind::Idx;
            e.data.images = d.string("images");
            e.data.labels = d.string("labels");
            e.data.subset = d.count("subset", e.data.subset);
            e.data.seed = static_cast<std::uint64_t>(d.integer("seed", static_cast<long>(e.data.seed)));
            e.data.classes = d.count("classes", e.data.classes);
        } else {
            throw ConfigError(d0.path("kind"), "expected synthetic or idx, got '" + kind + "'");
        }
    }
    return e;
}

Dataset make_dataset(const DataConfig& d, const NetworkConfig& net) {
    if (d.kind == DataConfig::Kind::Synthetic) return synthetic_dataset(d.samples, net.N0, net.N2, d.seed);
    Dataset ds = load_idx(d.images, d.labels, d.subset, d.seed, d.classes);
    if (ds.inputs.cols() != net.N0 || ds.targets.cols() != net.N2)
        throw ConfigError("nn.network", "N0/N2 must match the IDX image size " + std::to_string(ds.inputs.cols()) +
                                            " and class count " + std::to_string(ds.targets.cols()));
    return ds;
}

NNRun run_nn_experiment(const NNExperiment& e) {
    const Dataset data = make_dataset(e.data, e.network);
    NetworkState st = init_network(e.network);
    NNRun r;
    r.initial_sharpness = sharpness_lanczos(e.network, st, data, e.train.lanczos_iters, e.train.hvp_seed);
    TrainOptions opt = e.train;
    if (e.lr_multiplier) opt.h = *e.lr_multiplier / r.initial_sharpness;
    r.h = opt.h;
    r.trajectory = train_full_batch(e.network, st, data, opt);
    r.verdict = classify_nn(r.trajectory);
    return r;
}

// ---- experiment config ----

json to_json(const ExperimentConfig& c) {
    json j{{"mode", to_string(c.mode)},
           {"output_dir", c.output_dir},
           {"format", c.format == OutputFormat::CSV ? "csv" : "jsonl"}};
    switch (c.mode) {
        case Mode::Simulate: j["run"] = to_json(c.run); break;
        case Mode::Sweep: {
            json arr = json::array();
            for (const auto& r : c.runs) arr.push_back(to_json(r));
            j["runs"] = arr;
            break;
        }
        case Mode::Verify: {
            j["theorem"] = to_string(c.theorem);
            json arr = json::array();
            for (const auto& g : c.grid) arr.push_back(to_json(g));
            j["grid"] = arr;
            break;
        }
        case Mode::NNTrain: j["nn"] = to_json(c.nn); break;
        case Mode::Props:
            j["props"] = {{"spec", to_json(c.props.spec)},
                          {"grid_points", c.props.options.grid_points},
                          {"fd_points", c.props.options.fd_points},
                          {"seed", c.props.options.seed}};
            break;
        case Mode::FigureData: j["figure"] = c.figure_id; break;
    }
    return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
    const Fields top(j, "", {"mode", "output_dir", "format", "run", "runs", "theorem", "grid", "nn", "props", "figure"});
    ExperimentConfig c;
    const std::string mode = top.string("mode");
    bool found = false;
    for (const auto& [m, name] : kModeNames)
        if (mode == name) c.mode = m, found = true;
    if (!found) throw ConfigError("mode", "unknown mode '" + mode + "'");
    c.output_dir = top.string("output_dir", c.output_dir);
    const std::string format = top.string("format", c.mode == Mode::Sweep || c.mode == Mode::Verify ? "jsonl" : "csv");
    if (format == "csv")
        c.format = OutputFormat::CSV;
    else if (format == "jsonl")
        c.format = OutputFormat::JSONL;
    else
        throw ConfigError("format", "expected csv or jsonl, got '" + format + "'");

    // payload keys belonging to other modes are rejected
    const std::pair<Mode, std::vector<const char*>> payload[] = {
        {Mode::Simulate, {"run"}}, {Mode::Sweep, {"runs"}}, {Mode::Verify, {"theorem", "grid"}},
        {Mode::NNTrain, {"nn"}},   {Mode::Props, {"props"}}, {Mode::FigureData, {"figure"}},
    };
    for (const auto& [m, keys] : payload)
        if (m != c.mode)
            for (const char* k : keys)
                if (top.has(k)) throw ConfigError(k, "not used by mode " + mode);

    switch (c.mode) {
        case Mode::Simulate: c.run = run_config_from_json(top.at("run"), "run"); break;
        case Mode::Sweep: {
            const json& arr = top.at("runs");
            if (!arr.is_array() || arr.empty()) throw ConfigError("runs", "expected a non-empty array");
            for (std::size_t i = 0; i < arr.size(); ++i)
                c.runs.push_back(run_config_from_json(arr[i], "runs[" + std::to_string(i) + "]"));
            break;
        }
        case Mode::Verify:
            c.theorem = wrap_invalid("theorem", [&] { return theorem_from_string(top.string("theorem")); });
            c.grid = grid_from_json(top.at("grid"), "grid");
            break;
        case Mode::NNTrain: c.nn = nn_experiment_from_json(top.at("nn"), "nn"); break;
        case Mode::Props: {
            const Fields p(top.at("props"), "props", {"spec", "grid_points", "fd_points", "seed"});
            c.props.spec = objective_from_json(p.at("spec"), "props.spec");
            c.props.options.grid_points = p.integer("grid_points", c.props.options.grid_points);
            c.props.options.fd_points = p.integer("fd_points", c.props.options.fd_points);
            c.props.options.seed =
                static_cast<std::uint64_t>(p.integer("seed", static_cast<long>(c.props.options.seed)));
            break;
        }
        case Mode::FigureData: {
            c.figure_id = top.string("figure");
            const auto& ids = figure_ids();
            if (std::find(ids.begin(), ids.end(), c.figure_id) == ids.end())
                throw ConfigError("figure", "unknown figure id '" + c.figure_id + "'");
            break;
        }
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

void save_config(const ExperimentConfig& c, const fs::path& path) { open_output(path) << to_json(c).dump(2) << '\n'; }

std::ofstream open_output(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

// ---- trajectories ----

void write_trajectory_csv(const Trajectory& t, std::ostream& out) {
    out << "k,x,y,loss,delta,ell,q,r,uu,sharpness\n";
    for (const auto& s : t.steps) {
        out << s.k;
        for (double v : {s.x, s.y, s.loss, s.delta, s.ell, s.q, s.r, s.uu, s.sharpness}) out << ',' << fmt17(v);
        out << '\n';
    }
}

void write_trajectory(const Trajectory& t, const fs::path& path) {
    auto out = open_output(path);
    write_trajectory_csv(t, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<StepRecord> read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "k,x,y,loss,delta,ell,q,r,uu,sharpness")
        throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<StepRecord> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            errno = 0;
            const double d = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            v.push_back(d);
        }
        if (v.size() != 10)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 10 columns");
        rows.push_back({static_cast<long>(v[0]), v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
    }
    return rows;
}

// ---- reports ----

json to_json(const PhenomenaReport& r) {
    json one_sided{{"detected", r.one_sided.detected}};
    one_sided["index"] = r.one_sided.index ? json(*r.one_sided.index) : json(nullptr);
    return {{"catapult",
             {{"detected", r.catapult.detected},
              {"peak_loss", finite_or_null(r.catapult.peak_loss)},
              {"peak_index", r.catapult.peak_index}}},
            {"balancing",
             {{"detected", r.balancing.detected},
              {"initial_gap", finite_or_null(r.balancing.initial_gap)},
              {"final_gap", finite_or_null(r.balancing.final_gap)}}},
            {"eos",
             {{"de_sharpening", r.eos.de_sharpening},
              {"progressive_sharpening", r.eos.progressive_sharpening},
              {"limiting", r.eos.limiting}}},
            {"one_sided", one_sided},
            {"regime", to_string(r.regime)},
            {"stats",
             {{"converged", r.converged},
              {"s0", finite_or_null(r.eos.s0)},
              {"s_min", finite_or_null(r.eos.s_min)},
              {"s_min_index", r.eos.s_min_index},
              {"s_inf", finite_or_null(r.eos.s_inf)},
              {"two_over_h", finite_or_null(r.eos.two_over_h)},
              {"one_over_h", finite_or_null(r.one_sided.one_over_h)},
              {"rising_fraction", finite_or_null(r.eos.rising_fraction)},
              {"max_sharpness", finite_or_null(r.max_sharpness)},
              {"phase_boundary", r.phase_boundary ? json(*r.phase_boundary) : json(nullptr)}}}};
}

json to_json(const TheoremCheck& c) {
    json extras = json::object();
    for (const auto& [k, v] : c.extras) extras[k] = finite_or_null(v);
    return {{"theorem", to_string(c.theorem)},
            {"spec", to_json(c.spec)},
            {"x0", c.x0},
            {"y0", c.y0},
            {"C", finite_or_null(c.C)},
            {"h", c.h},
            {"hypotheses", to_string(c.hypotheses)},
            {"notes", c.notes},
            {"predicted_lo", finite_or_null(c.predicted_lo)},
            {"predicted_hi", finite_or_null(c.predicted_hi)},
            {"measured", finite_or_null(c.measured)},
            {"verdict", to_string(c.verdict)},
            {"margin", finite_or_null(c.margin)},
            {"slack", finite_or_null(c.slack)},
            {"run_status", to_string(c.run_status)},
            {"iterations", c.iterations},
            {"limit_stability", c.limit_stability ? json(to_string(*c.limit_stability)) : json(nullptr)},
            {"extras", extras}};
}

json to_json(const PropertyResult& r) {
    return {{"name", r.name},
            {"passed", r.passed},
            {"samples", r.samples},
            {"failures", r.failures},
            {"worst", finite_or_null(r.worst)},
            {"detail", r.detail}};
}

void write_report(const PhenomenaReport& r, const fs::path& path) { open_output(path) << to_json(r).dump(2) << '\n'; }

void write_report(const std::vector<TheoremCheck>& checks, const fs::path& path) {
    auto out = open_output(path);
    for (const auto& c : checks) out << to_json(c).dump() << '\n';
}

void write_nn_csv(const NNTrajectory& t, const fs::path& path) {
    auto out = open_output(path);
    out << "epoch,loss,sharpness,balancing_gap_sq\n";
    for (const auto& r : t.records)
        out << r.epoch << ',' << fmt17(r.loss) << ',' << fmt17(r.sharpness) << ',' << fmt17(r.balancing_gap_sq) << '\n';
}

}  // namespace eoslab
