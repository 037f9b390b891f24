#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "eoslab/experiment_io.hpp"
#include "eoslab/parallel.hpp"

#ifndef EOSLAB_VERSION
#define EOSLAB_VERSION "dev"
#endif

namespace eoslab {

namespace fs = std::filesystem;

namespace {

constexpr long kNNEpochs = 3000;
constexpr long kNNStride = 20;
// plot CSVs keep at most this many points per series (first and last always kept)
constexpr std::size_t kMaxPoints = 20000;

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Series {
    std::string name;
    const Trajectory* traj;
};

// Long-format CSV: series,k,value.
void write_long(const fs::path& path, const std::vector<Series>& series,
                const std::function<double(const StepRecord&, const Trajectory&)>& value) {
    auto out = open_output(path);
    out << "series,k,value\n";
    for (const auto& s : series) {
        const auto& steps = s.traj->steps;
        const std::size_t every = std::max<std::size_t>(1, (steps.size() + kMaxPoints - 1) / kMaxPoints);
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (i % every == 0 || i + 1 == steps.size())
                out << s.name << ',' << steps[i].k << ',' << g17(value(steps[i], *s.traj)) << '\n';
    }
}

double gap_of(const StepRecord& r, const Trajectory&) { return (r.x - r.y) * (r.x - r.y); }
double loss_of(const StepRecord& r, const Trajectory&) { return r.loss; }
double sharp_of(const StepRecord& r, const Trajectory&) { return r.sharpness; }

std::string run_summary(const std::string& label, const Trajectory& t) {
    const PhenomenaReport rep = analyze(t);
    return label + ": " + to_string(t.status) + " after " + std::to_string(t.iterations) +
           " steps, S_inf=" + g4(rep.eos.s_inf) + ", 2/h=" + g4(rep.eos.two_over_h) +
           ", limiting=" + (rep.eos.limiting ? "yes" : "no") + ", one_sided=" + (rep.one_sided.detected ? "yes" : "no") +
           ", balancing=" + (rep.balancing.detected ? "yes" : "no") + ", catapult=" + (rep.catapult.detected ? "yes" : "no");
}

RunConfig gd_config(const Objective& f, double x0, double y0, double h) {
    RunConfig c;
    c.spec = f;
    c.x0 = x0;
    c.y0 = y0;
    c.learning_rate = h;
    c.max_iters = 1'000'000;
    return c;
}

json run_params(const RunConfig& c) { return to_json(c); }

void write_meta(const fs::path& dir, const std::string& id, const std::string& title, const json& params,
                FigureOutput& out) {
    json files = json::array();
    for (const auto& f : out.files) files.push_back(f.filename().string());
    const fs::path meta = dir / (id + ".meta.json");
    open_output(meta) << json{{"figure", id},
                              {"title", title},
                              {"parameters", params},
                              {"tool_version", EOSLAB_VERSION},
                              {"files", files},
                              {"summary", out.summary}}
                             .dump(2)
                      << '\n';
    out.files.push_back(meta);
}

// Runs labelled GD configs concurrently and writes one long CSV per requested quantity.
FigureOutput gd_figure(const fs::path& dir, const std::string& id, const std::string& title,
                       const std::vector<std::pair<std::string, RunConfig>>& runs,
                       const std::vector<std::pair<std::string, std::function<double(const StepRecord&, const Trajectory&)>>>& panels,
                       bool panel_per_run = false) {
    std::vector<RunConfig> cfgs;
    for (const auto& r : runs) cfgs.push_back(r.second);
    const auto trajs = run_batch(cfgs);
    FigureOutput out;
    json params = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        json p = run_params(runs[i].second);
        p["label"] = runs[i].first;
        params.push_back(p);
        out.summary.push_back(run_summary(runs[i].first, trajs[i]));
    }
    for (const auto& [panel, value] : panels) {
        if (panel_per_run) {
            for (std::size_t i = 0; i < runs.size(); ++i) {
                const fs::path p = dir / (id + "_" + panel + "_" + runs[i].first + ".csv");
                write_long(p, {{runs[i].first, &trajs[i]}}, value);
                out.files.push_back(p);
            }
        } else {
            std::vector<Series> s;
            for (std::size_t i = 0; i < runs.size(); ++i) s.push_back({runs[i].first, &trajs[i]});
            const fs::path p = dir / (id + "_" + panel + ".csv");
            write_long(p, s, value);
            out.files.push_back(p);
        }
    }
    write_meta(dir, id, title, params, out);
    return out;
}

FigureOutput fig1(const fs::path& dir) {
    const Objective f = Objective::good(1.0);
    const auto c = gd_config(f, 0.2, 10.0, 4.0 / (0.04 + 100.0));
    const auto d = gd_config(f, 2.0, 10.0, 4.0 / (4.0 + 100.0));
    std::vector<RunConfig> cfgs{c, d};
    const auto trajs = run_batch(cfgs);
    FigureOutput out;
    const fs::path loss = dir / "fig1_loss.csv", gap = dir / "fig1_balancing.csv", sc = dir / "fig1_sharpness_c.csv",
                   sd = dir / "fig1_sharpness_d.csv";
    write_long(loss, {{"x0=0.2", &trajs[0]}}, loss_of);
    write_long(gap, {{"x0=0.2", &trajs[0]}}, gap_of);
    write_long(sc, {{"x0=0.2", &trajs[0]}}, sharp_of);
    write_long(sd, {{"x0=2", &trajs[1]}}, sharp_of);
    out.files = {loss, gap, sc, sd};
    out.summary = {run_summary("x0=0.2", trajs[0]), run_summary("x0=2", trajs[1])};
    write_meta(dir, "fig1", "Large learning rate phenomena on the good-regularity objective (a=1), h = 4/(x0^2+y0^2)",
               json::array({run_params(c), run_params(d)}), out);
    return out;
}

FigureOutput fig2(const fs::path& dir) {
    const Objective f = Objective::bad(3);
    const double x0 = 0.15, y0 = 10.0, p = x0 * y0;
    const double h = 4.0 / (x0 * x0 + y0 * y0) / std::pow(p, 4);
    return gd_figure(dir, "fig2", "No catapult, balancing or EoS on the bad-regularity objective (b=3)",
                     {{"b=3", gd_config(f, x0, y0, h)}}, {{"loss", loss_of}, {"balancing", gap_of}, {"sharpness", sharp_of}});
}

FigureOutput fig3(const fs::path& dir) {
    const Objective pert = Objective::perturbed(), good = Objective::good(1.0);
    const double x0 = 10.0, y0 = 0.15;
    FigureOutput out = gd_figure(dir, "fig3", "GD on the perturbed good-regularity objective",
                                 {{"perturbed", gd_config(pert, x0, y0, 4.0 / (x0 * x0 + y0 * y0))}},
                                 {{"loss", loss_of}, {"sharpness", sharp_of}});
    // curve panel: F and its perturbation over s in [-1, 3]
    const fs::path curve = dir / "fig3_F.csv";
    {
        auto o = open_output(curve);
        o << "series,s,value\n";
        for (const auto* fam : {&good, &pert})
            for (int i = 0; i <= 800; ++i) {
                const double s = -1.0 + 4.0 * i / 800.0;
                o << (fam == &good ? "good" : "perturbed") << ',' << g17(s) << ',' << g17(fam->F(s)) << '\n';
            }
    }
    out.files.insert(out.files.end() - 1, curve);
    return out;
}

FigureOutput fig5(const fs::path& dir) {
    const Objective f = Objective::bad(3);
    const double x0 = 6.0, y0 = 1.0, uu = x0 * x0 + y0 * y0, p = x0 * y0;
    std::vector<std::pair<std::string, RunConfig>> runs;
    for (double C : {2.0, 4.0, 6.0, 8.0})
        runs.push_back({"C=" + g4(C), gd_config(f, x0, y0, C / (uu * std::pow(p, 4)))});
    return gd_figure(dir, "fig5", "Bad regularity (b=3) under increasing learning rates, h = C/((x0^2+y0^2)(x0 y0)^4)",
                     runs, {{"sharpness", sharp_of}, {"balancing", gap_of}});
}

FigureOutput fig6(const fs::path& dir) {
    const Objective f = Objective::bad(1);
    std::vector<std::pair<std::string, RunConfig>> runs;
    for (double y0 : {0.15, 1.5, 15.0})
        runs.push_back({"y0=" + g4(y0), gd_config(f, 10.0, y0, 4.0 / (100.0 + y0 * y0))});
    return gd_figure(dir, "fig6", "b=1 from x0=10, h = 4/(x0^2+y0^2)", runs, {{"sharpness", sharp_of}, {"loss", loss_of}});
}

FigureOutput fig7(const fs::path& dir) {
    const double x0 = 10.0, y0 = 0.11, uu = x0 * x0 + y0 * y0, p = x0 * y0;
    std::vector<std::pair<std::string, RunConfig>> runs;
    for (int b : {3, 9})
        runs.push_back({"b=" + std::to_string(b),
                        gd_config(Objective::bad(b), x0, y0, 4.0 / ((uu + 4.0) * std::pow(p, 2 * b - 2)))});
    return gd_figure(dir, "fig7", "Starts near the minimum of bad-regularity objectives, h = 4/((x0^2+y0^2+4)(x0 y0)^{2b-2})",
                     runs, {{"loss", loss_of}, {"balancing", gap_of}, {"sharpness", sharp_of}});
}

struct NNCase {
    std::string label;
    NNExperiment exp;
};

FigureOutput nn_figure(const fs::path& dir, const std::string& id, const std::string& title,
                       const std::vector<NNCase>& cases, bool sharpness, bool gap) {
    std::vector<NNRun> runs(cases.size());
    for_each_index(cases.size(), Exec::Parallel, [&](std::size_t i) { runs[i] = run_nn_experiment(cases[i].exp); });
    FigureOutput out;
    json params = json::array();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        json p = to_json(cases[i].exp);
        p["label"] = cases[i].label;
        p["h"] = runs[i].h;
        params.push_back(p);
        const auto& v = runs[i].verdict;
        out.summary.push_back(cases[i].label + ": h=" + g4(runs[i].h) + ", S_final=" + g4(v.final_sharpness) +
                              ", 2/h=" + g4(v.two_over_h) + ", gap " + g4(v.initial_gap) + " -> " + g4(v.final_gap) +
                              ", eos=" + (v.eos ? "yes" : "no") + ", balancing=" + (v.balancing ? "yes" : "no") +
                              (runs[i].trajectory.diverged ? ", diverged" : ""));
    }
    auto emit = [&](const std::string& panel, auto value, bool with_ref) {
        const fs::path p = dir / (id + "_" + panel + ".csv");
        auto o = open_output(p);
        o << "series,epoch,value" << (with_ref ? ",two_over_h" : "") << '\n';
        for (std::size_t i = 0; i < cases.size(); ++i)
            for (const auto& r : runs[i].trajectory.records) {
                o << cases[i].label << ',' << r.epoch << ',' << g17(value(r));
                if (with_ref) o << ',' << g17(2.0 / runs[i].h);
                o << '\n';
            }
        out.files.push_back(p);
    };
    if (sharpness) emit("sharpness", [](const NNRecord& r) { return r.sharpness; }, true);
    if (gap) emit("balancing", [](const NNRecord& r) { return r.balancing_gap_sq; }, false);
    emit("loss", [](const NNRecord& r) { return r.loss; }, false);
    write_meta(dir, id, title, params, out);
    return out;
}

std::vector<NNCase> table_cases() {
    std::vector<NNCase> cases;
    for (LossKind loss : {LossKind::Huber, LossKind::L2})
        for (Activation act : {Activation::tanh(), Activation::relu(), Activation::relu_k(3)}) {
            NNExperiment e = nn_protocol(loss, act, false, 2, 4.0);
            cases.push_back({nn_label(e.network), e});
        }
    return cases;
}

}  // namespace

std::string nn_label(const NetworkConfig& c) {
    std::string s = c.loss == LossKind::L2 ? "l2" : "huber";
    switch (c.activation.kind) {
        case Activation::Kind::Tanh: s += "+tanh"; break;
        case Activation::Kind::ReLU: s += "+relu"; break;
        case Activation::Kind::LeakyReLU: s += "+leaky_relu"; break;
        case Activation::Kind::ReLUk: s += "+relu" + std::to_string(c.activation.power); break;
    }
    if (c.batch_norm) s += "+bn";
    if (c.depth == 3) s += "+3layer";
    return s;
}

NNExperiment nn_protocol(LossKind loss, Activation act, bool batch_norm, int depth, double C) {
    NNExperiment e;
    e.network.loss = loss;
    e.network.activation = act;
    e.network.batch_norm = batch_norm;
    e.network.depth = depth;
    if (depth == 3) {
        e.network.init.frob_W1 = 3.0;
        e.network.init.frob_W2 = 10.0;
    }
    e.train.epochs = kNNEpochs;
    e.train.record_stride = kNNStride;
    e.train.lanczos_iters = 20;
    e.lr_multiplier = C;
    e.data.kind = DataConfig::Kind::Synthetic;
    e.data.samples = 64;
    e.data.seed = 7;
    return e;
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig1",    "fig2",    "fig3",     "fig5",     "fig6",
                                              "fig7",    "nn_fig9", "nn_fig10", "nn_fig11", "nn_fig12"};
    return ids;
}

FigureOutput write_figure_data(const std::string& id, const fs::path& dir) {
    if (id == "fig1") return fig1(dir);
    if (id == "fig2") return fig2(dir);
    if (id == "fig3") return fig3(dir);
    if (id == "fig5") return fig5(dir);
    if (id == "fig6") return fig6(dir);
    if (id == "fig7") return fig7(dir);
    if (id == "nn_fig9")
        return nn_figure(dir, id, "Sharpness of two-layer nets for each loss/activation pair", table_cases(), true, false);
    if (id == "nn_fig10")
        return nn_figure(dir, id, "Balancing gap of two-layer nets for each loss/activation pair", table_cases(), false,
                         true);
    if (id == "nn_fig11") {
        std::vector<NNCase> cases;
        for (auto e : {nn_protocol(LossKind::L2, Activation::relu(), true, 2, 4.0),
                       nn_protocol(LossKind::Huber, Activation::relu_k(3), false, 3, 4.0),
                       nn_protocol(LossKind::Huber, Activation::relu_k(3), true, 3, 4.0),
                       nn_protocol(LossKind::L2, Activation::relu_k(3), true, 2, 4.0)})
            cases.push_back({nn_label(e.network), e});
        return nn_figure(dir, id, "Batch normalization and a fixed last layer", cases, true, true);
    }
    if (id == "nn_fig12") {
        std::vector<NNCase> cases;
        for (double C : {1.5, 4.0})
            for (auto [loss, act] : {std::pair{LossKind::Huber, Activation::relu()}, std::pair{LossKind::L2, Activation::tanh()}}) {
                NNExperiment e = nn_protocol(loss, act, false, 2, C);
                cases.push_back({nn_label(e.network) + "+C=" + g4(C), e});
            }
        return nn_figure(dir, id, "Small versus large learning rate", cases, true, true);
    }
    throw std::invalid_argument("unknown figure id '" + id + "'");
}

}  // namespace eoslab
