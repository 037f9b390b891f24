#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "eoslab/experiment_io.hpp"

using namespace eoslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "eoslab_io_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "eoslab");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string config_error_key(const json& j) {
    try {
        experiment_config_from_json(j);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<none>";
}

}  // namespace

TEST_SUITE("experiment_io") {
    TEST_CASE("config round-trips through a file") {
        const fs::path dir = scratch("roundtrip");
        std::vector<ExperimentConfig> cs(6);
        cs[0].mode = Mode::Simulate;
        cs[0].run.spec = Objective::good(0.3);
        cs[0].run.x0 = 0.2;
        cs[0].run.y0 = 10;
        cs[0].run.learning_rate = 4.0 / 100.04;
        cs[0].run.record_stride = 3;
        cs[1].mode = Mode::Sweep;
        cs[1].runs = {cs[0].run, cs[0].run};
        cs[1].runs[1].spec = Objective::bad(5);
        cs[1].format = OutputFormat::JSONL;
        cs[2].mode = Mode::Verify;
        cs[2].theorem = TheoremId::NoBalancing_Bad;
        cs[2].grid = {{Objective::bad(3), 6, 1, LearningRate::multiplier(2)},
                      {Objective::perturbed(), 10, 0.15, LearningRate::absolute(0.04)}};
        cs[2].format = OutputFormat::JSONL;
        cs[3].mode = Mode::NNTrain;
        cs[3].nn = nn_protocol(LossKind::Huber, Activation::relu_k(3), true, 3, 2.5);
        cs[3].nn.network.init.seed = 99;
        cs[4].mode = Mode::Props;
        cs[4].props.spec = Objective::bad(9);
        cs[4].props.options.grid_points = 123;
        cs[5].mode = Mode::FigureData;
        cs[5].figure_id = "nn_fig11";
        for (std::size_t i = 0; i < cs.size(); ++i) {
            CAPTURE(i);
            const fs::path p = dir / ("c" + std::to_string(i) + ".json");
            save_config(cs[i], p);
            CHECK(load_config(p) == cs[i]);
        }
    }

    TEST_CASE("strict parsing names the offending key") {
        json base = {{"mode", "simulate"},
                     {"run", {{"spec", {{"kind", "good"}, {"a", 1.0}}}, {"x0", 0.2}, {"y0", 10.0}, {"C", 4.0}}}};
        CHECK(config_error_key(base) == "<none>");
        CHECK(experiment_config_from_json(base).run.learning_rate == doctest::Approx(4.0 / 100.04));

        json j = base;
        j["colour"] = "red";
        CHECK(config_error_key(j) == "colour");
        j = base;
        j["run"]["x1"] = 1.0;
        CHECK(config_error_key(j) == "run.x1");
        j = base;
        j["run"]["spec"]["b"] = 3;
        CHECK(config_error_key(j) == "run.spec.b");
        j = base;
        j["run"]["x0"] = "far";
        CHECK(config_error_key(j) == "run.x0");
        j = base;
        j["run"]["h"] = 0.1;
        CHECK(config_error_key(j) == "run");
        j = base;
        j["run"]["spec"]["a"] = 2.0;
        CHECK(config_error_key(j) == "run.spec");
        j = base;
        j["figure"] = "fig1";
        CHECK(config_error_key(j) == "figure");
        j = base;
        j["mode"] = "dance";
        CHECK(config_error_key(j) == "mode");
        json n = {{"mode", "nn-train"}, {"nn", {{"network", {{"activation", "swish"}}}}}};
        CHECK(config_error_key(n) == "nn.network.activation");
        n = {{"mode", "nn-train"}, {"nn", {{"data", {{"kind", "synthetic"}, {"images", "x"}}}}}};
        CHECK(config_error_key(n) == "nn.data.images");
        json f = {{"mode", "figure-data"}, {"figure", "fig4"}};
        CHECK(config_error_key(f) == "figure");
    }

    TEST_CASE("trajectory CSV keeps the step identity") {
        RunConfig c;
        c.spec = Objective::good(1.0);
        c.x0 = 0.2;
        c.y0 = 10;
        c.learning_rate = 4.0 / 100.04;
        const Trajectory t = run(c);
        const fs::path p = scratch("traj") / "t.csv";
        write_trajectory(t, p);
        std::ifstream in(p);
        std::string header;
        std::getline(in, header);
        CHECK(header == "k,x,y,loss,delta,ell,q,r,uu,sharpness");
        const auto rows = read_trajectory_csv(p);
        REQUIRE(rows.size() == t.steps.size());
        long checked = 0;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            CHECK(rows[i].x == t.steps[i].x);
            if (std::abs(rows[i].delta) < 1e-9) continue;
            const double pred = rows[i].r * rows[i].delta;
            CHECK(std::abs(rows[i + 1].delta - pred) <= 1e-10 * std::max(1.0, std::abs(rows[i].delta)));
            ++checked;
        }
        CHECK(checked > 100);
    }

    TEST_CASE("report JSON has the fixed key set") {
        RunConfig c;
        c.spec = Objective::bad(3);
        c.x0 = 0.15;
        c.y0 = 10;
        c.learning_rate = 4.0 / 100.0225 / std::pow(1.5, 4);
        const json j = to_json(analyze(run(c)));
        std::set<std::string> keys;
        for (const auto& [k, _] : j.items()) keys.insert(k);
        CHECK(keys == std::set<std::string>{"catapult", "balancing", "eos", "one_sided", "regime", "stats"});
        std::set<std::string> eos;
        for (const auto& [k, _] : j["eos"].items()) eos.insert(k);
        CHECK(eos == std::set<std::string>{"de_sharpening", "progressive_sharpening", "limiting"});
        CHECK(j["one_sided"]["detected"] == true);
        CHECK(j["regime"] == "LargeLR");

        const TheoremCheck k = verify(TheoremId::NoBalancing_Bad, Objective::bad(3), 6, 1, LearningRate::multiplier(2));
        const fs::path p = scratch("report") / "checks.jsonl";
        write_report(std::vector<TheoremCheck>{k, k}, p);
        std::ifstream in(p);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) {
            const json l = json::parse(line);
            CHECK(l["verdict"] == "pass");
            CHECK(l["predicted_hi"].is_null());
            ++lines;
        }
        CHECK(lines == 2);
    }

    TEST_CASE("NN CSV") {
        NNTrajectory t;
        t.h = 0.1;
        t.records = {{0, 1.5, 2.0, 196.0}, {10, 1.0, 2.5, 150.0}};
        const fs::path p = scratch("nn") / "nn.csv";
        write_nn_csv(t, p);
        std::ifstream in(p);
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        CHECK(header == "epoch,loss,sharpness,balancing_gap_sq");
        CHECK(row == "0,1.5,2,196");
    }

    TEST_CASE("command line") {
        const fs::path dir = scratch("cli");
        CHECK(cli({"simulate", "--spec", "good:1", "--x0", "0.2", "--y0", "10", "--C", "4", "--out", (dir / "sim").string()}) == 0);
        CHECK(fs::exists(dir / "sim" / "trajectory.csv"));
        const json rep = json::parse(std::ifstream(dir / "sim" / "report.json"));
        CHECK(rep["catapult"]["detected"] == true);

        CHECK(cli({"simulate", "--bogus"}) == 2);
        CHECK(cli({"simulate", "--spec", "bad:2", "--x0", "1", "--y0", "1", "--h", "0.1"}) == 2);
        CHECK(cli({"simulate", "--x0", "1", "--y0", "1", "--h", "0.1", "--C", "2"}) == 2);
        CHECK(cli({"nosuch"}) == 2);
        CHECK(cli({"nn-train", "--config", (dir / "missing.json").string()}) == 2);
        CHECK(cli({"figure-data", "fig4"}) == 2);
        {
            std::ofstream(dir / "broken.json") << "{\"mode\": \"nn-train\", \"nn\": {\"netwrk\": {}}}";
        }
        CHECK(cli({"nn-train", "--config", (dir / "broken.json").string()}) == 2);
        // unwritable output
        {
            std::ofstream(dir / "file") << "x";
        }
        CHECK(cli({"simulate", "--x0", "1", "--y0", "2", "--h", "0.1", "--out", (dir / "file" / "sub").string()}) == 2);

        // verify: exit 1 only when a cell with satisfied hypotheses fails
        const fs::path grid = dir / "grid.json";
        std::ofstream(grid) << R"([{"spec":{"kind":"bad","b":3},"x0":6,"y0":1,"C":2},
                                   {"spec":{"kind":"bad","b":3},"x0":6,"y0":1,"C":8}])";
        CHECK(cli({"verify", "--theorem", "NoBalancing_Bad", "--grid", grid.string(), "--out", (dir / "ver").string()}) == 0);
        CHECK(fs::exists(dir / "ver" / "verify.jsonl"));
        CHECK(cli({"verify", "--theorem", "Nope", "--grid", grid.string()}) == 2);

        CHECK(cli({"props", "--b", "3", "--grid-points", "500"}) == 0);
        CHECK(cli({"props", "--a", "1", "--grid-points", "500", "--out", (dir / "props").string()}) == 0);
        CHECK(fs::exists(dir / "props" / "props.jsonl"));

        ExperimentConfig sw;
        sw.mode = Mode::Sweep;
        sw.output_dir = (dir / "sweep").string();
        RunConfig r;
        r.spec = Objective::bad(1);
        r.x0 = 10;
        r.y0 = 1.5;
        r.learning_rate = 4.0 / 102.25;
        sw.runs = {r, r};
        sw.runs[1].y0 = 15;
        save_config(sw, dir / "sweep.json");
        CHECK(cli({"sweep", "--config", (dir / "sweep.json").string()}) == 0);
        CHECK(fs::exists(dir / "sweep" / "run_1.csv"));
        CHECK(fs::exists(dir / "sweep" / "sweep.jsonl"));
    }

    TEST_CASE("figure data") {
        const fs::path dir = scratch("fig");
        CHECK(cli({"figure-data", "fig1", "--out", dir.string()}) == 0);
        for (const char* f : {"fig1_loss.csv", "fig1_balancing.csv", "fig1_sharpness_c.csv", "fig1_sharpness_d.csv"})
            CHECK(fs::exists(dir / f));
        const json meta = json::parse(std::ifstream(dir / "fig1.meta.json"));
        CHECK(meta["figure"] == "fig1");
        CHECK(meta["tool_version"] == EOSLAB_VERSION);
        CHECK(meta["parameters"][0]["h"] == doctest::Approx(4.0 / 100.04));
        CHECK(meta["parameters"][1]["h"] == doctest::Approx(4.0 / 104.0));

        const FigureOutput out = write_figure_data("fig3", dir);
        CHECK(out.summary.size() == 1);
        CHECK(out.summary[0].find("limiting=no") != std::string::npos);
        CHECK(out.files.back().filename() == "fig3.meta.json");
        CHECK_THROWS(write_figure_data("fig9", dir));
    }

    TEST_CASE("NN experiment from config") {
        NNExperiment e = nn_protocol(LossKind::L2, Activation::tanh(), false, 2, 2.0);
        e.train.epochs = 30;
        e.train.record_stride = 10;
        const NNRun r = run_nn_experiment(e);
        CHECK(r.h == doctest::Approx(2.0 / r.initial_sharpness));
        CHECK(r.trajectory.records.size() == 4);
        CHECK(r.trajectory.records.front().balancing_gap_sq == doctest::Approx(196.0));
        e.data.kind = DataConfig::Kind::Idx;
        e.data.images = "/nonexistent";
        CHECK_THROWS(run_nn_experiment(e));
    }
}
