#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "eoslab/experiment_io.hpp"
#include "eoslab/parallel.hpp"

#ifndef EOSLAB_VERSION
#define EOSLAB_VERSION "dev"
#endif

namespace eoslab {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "good:0.5", "bad:3" or "perturbed"
Objective parse_spec(const std::string& s) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    try {
        if (kind == "perturbed" && arg.empty()) return Objective::perturbed();
        if (kind == "good" && !arg.empty()) return Objective::good(std::stod(arg));
        if (kind == "bad" && !arg.empty()) {
            std::size_t used = 0;
            const int b = std::stoi(arg, &used);
            if (used == arg.size()) return Objective::bad(b);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError("--spec " + s + ": " + e.what());
    } catch (const std::out_of_range&) {
    }
    throw UsageError("--spec expects good:<a>, bad:<b> or perturbed, got '" + s + "'");
}

std::string g4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ExperimentConfig config_for(const std::string& path, Mode expected) {
    ExperimentConfig c = load_config(path);
    if (c.mode != expected)
        throw UsageError(path + ": config mode is " + to_string(c.mode) + ", expected " + to_string(expected));
    return c;
}

void print_run(const std::string& label, const Trajectory& t, const PhenomenaReport& r) {
    std::cout << label << ": " << to_string(t.status) << " after " << t.iterations << " steps"
              << ", S_inf=" << g4(r.eos.s_inf) << ", 2/h=" << g4(r.eos.two_over_h)
              << ", catapult=" << r.catapult.detected << ", balancing=" << r.balancing.detected
              << ", limiting=" << r.eos.limiting << ", one_sided=" << r.one_sided.detected
              << ", regime=" << to_string(r.regime) << '\n';
}

int do_simulate(const ExperimentConfig& c) {
    const Trajectory t = run(c.run);
    const PhenomenaReport rep = analyze(t);
    const fs::path dir = c.output_dir;
    write_trajectory(t, dir / "trajectory.csv");
    write_report(rep, dir / "report.json");
    print_run(c.run.spec.name(), t, rep);
    return 0;
}

int do_sweep(const ExperimentConfig& c) {
    const auto trajs = run_batch(c.runs);
    const fs::path dir = c.output_dir;
    auto jsonl = open_output(dir / "sweep.jsonl");
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const PhenomenaReport rep = analyze(trajs[i]);
        if (c.format == OutputFormat::CSV) write_trajectory(trajs[i], dir / ("run_" + std::to_string(i) + ".csv"));
        json line = to_json(rep);
        line["index"] = i;
        line["run"] = to_json(c.runs[i]);
        line["status"] = to_string(trajs[i].status);
        jsonl << line.dump() << '\n';
        print_run("run " + std::to_string(i), trajs[i], rep);
    }
    return 0;
}

int do_verify(const ExperimentConfig& c) {
    const auto checks = sweep(c.theorem, c.grid);
    write_report(checks, fs::path(c.output_dir) / "verify.jsonl");
    int rc = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& k = checks[i];
        std::cout << to_string(k.theorem) << " cell " << i << " (" << k.spec.name() << ", x0=" << g4(k.x0)
                  << ", y0=" << g4(k.y0) << ", h=" << g4(k.h) << "): " << to_string(k.verdict)
                  << ", hypotheses " << to_string(k.hypotheses) << ", measured " << g4(k.measured) << ", bounds ["
                  << g4(k.predicted_lo) << ", " << g4(k.predicted_hi) << "]\n";
        if (k.hypotheses == Hypotheses::Satisfied && k.verdict == Verdict::Fail) rc = 1;
    }
    return rc;
}

int do_nn(const ExperimentConfig& c) {
    const NNRun r = run_nn_experiment(c.nn);
    const fs::path dir = c.output_dir;
    write_nn_csv(r.trajectory, dir / "nn_trajectory.csv");
    const auto& v = r.verdict;
    open_output(dir / "nn_summary.json") << json{{"config", to_json(c.nn)},
                                                 {"h", r.h},
                                                 {"initial_sharpness", r.initial_sharpness},
                                                 {"final_sharpness", v.final_sharpness},
                                                 {"two_over_h", v.two_over_h},
                                                 {"initial_gap", v.initial_gap},
                                                 {"final_gap", v.final_gap},
                                                 {"eos", v.eos},
                                                 {"balancing", v.balancing},
                                                 {"diverged", r.trajectory.diverged}}
                                                .dump(2)
                                         << '\n';
    std::cout << nn_label(c.nn.network) << ": h=" << g4(r.h) << ", S_final=" << g4(v.final_sharpness)
              << ", 2/h=" << g4(v.two_over_h) << ", gap " << g4(v.initial_gap) << " -> " << g4(v.final_gap)
              << ", eos=" << v.eos << ", balancing=" << v.balancing << (r.trajectory.diverged ? ", diverged" : "")
              << '\n';
    return 0;
}

int do_props(const ExperimentConfig& c, bool write) {
    const auto results = property_suite(c.props.spec, c.props.options);
    std::optional<std::ofstream> out;
    if (write) out.emplace(open_output(fs::path(c.output_dir) / "props.jsonl"));
    int rc = 0;
    for (const auto& r : results) {
        std::cout << (r.passed ? "ok   " : "FAIL ") << c.props.spec.name() << ' ' << r.name << " (" << r.samples
                  << " samples, worst " << g4(r.worst) << ")" << (r.detail.empty() ? "" : ": " + r.detail) << '\n';
        if (out) *out << to_json(r).dump() << '\n';
        if (!r.passed) rc = 1;
    }
    return rc;
}

int do_figure(const ExperimentConfig& c) {
    const FigureOutput out = write_figure_data(c.figure_id, c.output_dir);
    for (const auto& s : out.summary) std::cout << c.figure_id << ' ' << s << '\n';
    for (const auto& f : out.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Gradient descent on f(x,y) = F(xy): simulation, phenomenon detection, bound checks and toy networks"};
    app.set_version_flag("--version", std::string(EOSLAB_VERSION));
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";

    // simulate
    auto* sim = app.add_subcommand("simulate", "run GD from one start and write trajectory.csv + report.json");
    sim->set_help_flag("--help", "print this help and exit");  // -h would clash with --h
    std::string spec_str = "good:1";
    double x0 = 0, y0 = 0, h = 0, C = 0;
    long max_iters = 1'000'000, stride = 0;
    sim->add_option("--config", config_path, "experiment config (mode simulate)")->check(CLI::ExistingFile);
    sim->add_option("--spec", spec_str, "good:<a>, bad:<b> or perturbed");
    auto* x0_opt = sim->add_option("--x0", x0);
    auto* y0_opt = sim->add_option("--y0", y0);
    auto* h_opt = sim->add_option("--h", h, "step size");
    auto* c_opt = sim->add_option("--C", C, "step size as a multiple of the family's 1/denominator");
    h_opt->excludes(c_opt);
    sim->add_option("--max-iters", max_iters);
    sim->add_option("--stride", stride, "record every n-th step (0: automatic)");
    sim->add_option("--out", out_dir, "output directory");

    // sweep
    auto* swp = app.add_subcommand("sweep", "run a batch of GD configs across the worker pool");
    swp->add_option("--config", config_path, "experiment config (mode sweep)")->required()->check(CLI::ExistingFile);
    auto* swp_out = swp->add_option("--out", out_dir, "output directory (overrides config)");

    // verify
    auto* ver = app.add_subcommand("verify", "check a theorem's bounds on a grid of starts");
    std::string theorem, grid_path;
    ver->add_option("--config", config_path, "experiment config (mode verify)")->check(CLI::ExistingFile);
    ver->add_option("--theorem", theorem, "EoS_Good, NoEoS_Bad, Balancing_Good, Balancing_b1, NoBalancing_Bad, "
                                          "Conv_Good, Conv_b1, Conv_Bad or Stability_Necessity");
    ver->add_option("--grid", grid_path, "JSON array of {spec, x0, y0, C|h}")->check(CLI::ExistingFile);
    auto* ver_out = ver->add_option("--out", out_dir, "output directory");

    // nn-train
    auto* nn = app.add_subcommand("nn-train", "train a toy network with full-batch GD");
    nn->add_option("--config", config_path, "experiment config (mode nn-train)")->required()->check(CLI::ExistingFile);
    auto* nn_out = nn->add_option("--out", out_dir, "output directory (overrides config)");

    // props
    auto* props = app.add_subcommand("props", "sampled checks of the objective's closed-form properties");
    double pa = 0;
    int pb = 0;
    bool pert = false;
    long grid_points = 10000;
    auto* a_opt = props->add_option("--a", pa, "good family exponent in (0, 1]");
    auto* b_opt = props->add_option("--b", pb, "bad family odd exponent");
    auto* p_opt = props->add_flag("--perturbed", pert);
    a_opt->excludes(b_opt)->excludes(p_opt);
    b_opt->excludes(p_opt);
    props->add_option("--config", config_path, "experiment config (mode props)")->check(CLI::ExistingFile);
    props->add_option("--grid-points", grid_points);
    auto* props_out = props->add_option("--out", out_dir, "also write props.jsonl here");

    // figure-data
    auto* fig = app.add_subcommand("figure-data", "write plot-ready CSVs and a metadata sidecar for one figure");
    std::string figure_id;
    fig->add_option("id", figure_id)->required()->check(CLI::IsMember(figure_ids()));
    fig->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig c;
        c.output_dir = out_dir;
        if (*sim) {
            if (!config_path.empty()) {
                c = config_for(config_path, Mode::Simulate);
                if (sim->count("--out")) c.output_dir = out_dir;
            } else {
                if (!*x0_opt || !*y0_opt) throw UsageError("simulate needs --x0 and --y0 (or --config)");
                if (!*h_opt && !*c_opt) throw UsageError("simulate needs --h or --C");
                c.mode = Mode::Simulate;
                c.run.spec = parse_spec(spec_str);
                c.run.x0 = x0;
                c.run.y0 = y0;
                c.run.learning_rate = *h_opt ? h : lr_from_multiplier(c.run.spec, x0, y0, C);
                c.run.max_iters = max_iters;
                c.run.record_stride = stride;
                try {
                    c.run.validate();
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            }
            return do_simulate(c);
        }
        if (*swp) {
            c = config_for(config_path, Mode::Sweep);
            if (*swp_out) c.output_dir = out_dir;
            return do_sweep(c);
        }
        if (*ver) {
            if (!config_path.empty()) {
                c = config_for(config_path, Mode::Verify);
                if (*ver_out) c.output_dir = out_dir;
            } else {
                if (theorem.empty() || grid_path.empty()) throw UsageError("verify needs --theorem and --grid (or --config)");
                c.mode = Mode::Verify;
                try {
                    c.theorem = theorem_from_string(theorem);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
                std::ifstream in(grid_path);
                json j;
                try {
                    j = json::parse(in);
                } catch (const json::parse_error& e) {
                    throw ConfigError("", grid_path + ": " + e.what());
                }
                c.grid = grid_from_json(j);
            }
            return do_verify(c);
        }
        if (*nn) {
            c = config_for(config_path, Mode::NNTrain);
            if (*nn_out) c.output_dir = out_dir;
            return do_nn(c);
        }
        if (*props) {
            if (!config_path.empty()) {
                c = config_for(config_path, Mode::Props);
            } else {
                c.mode = Mode::Props;
                try {
                    c.props.spec = *a_opt ? Objective::good(pa) : *b_opt ? Objective::bad(pb)
                                   : pert ? Objective::perturbed()
                                          : throw UsageError("props needs --a, --b or --perturbed");
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
                c.props.options.grid_points = grid_points;
            }
            if (*props_out) c.output_dir = out_dir;
            return do_props(c, static_cast<bool>(*props_out));
        }
        if (*fig) {
            c.mode = Mode::FigureData;
            c.figure_id = figure_id;
            return do_figure(c);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace eoslab
