#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eoslab/gd_engine.hpp"
#include "eoslab/phenomena.hpp"
#include "eoslab/propositions.hpp"
#include "eoslab/theorem_verifier.hpp"
#include "eoslab/toy_nn.hpp"

namespace eoslab {

using json = nlohmann::json;

// Thrown for any schema problem; key() names the offending key path, e.g. "run.x0".
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& key, const std::string& msg)
        : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// Where NN training data comes from.
struct DataConfig {
    enum class Kind { Synthetic, Idx };
    Kind kind = Kind::Synthetic;
    std::size_t samples = 64;  // synthetic
    std::uint64_t seed = 7;    // synthetic labels, or idx subset draw
    std::string images, labels;
    std::size_t subset = 1000;
    std::size_t classes = 10;
    bool operator==(const DataConfig&) const = default;
};

// A full NN run. When lr_multiplier is set, h = lr_multiplier / S(epoch 0) and train.h is ignored.
struct NNExperiment {
    NetworkConfig network;
    TrainOptions train;
    std::optional<double> lr_multiplier;
    DataConfig data;
    bool operator==(const NNExperiment&) const = default;
};

struct NNRun {
    NNTrajectory trajectory;
    NNVerdict verdict;
    double initial_sharpness = 0.0;
    double h = 0.0;
};

// Desk-scale protocol shared by the NN figures: synthetic 64 x (20 -> 30 -> 5) data,
// init norms (6, 20) for two layers and (3, 10) for three, h = C / S(epoch 0).
NNExperiment nn_protocol(LossKind loss, Activation act, bool batch_norm, int depth, double C);
std::string nn_label(const NetworkConfig& c);

Dataset make_dataset(const DataConfig& d, const NetworkConfig& net);
NNRun run_nn_experiment(const NNExperiment& e);

enum class Mode { Simulate, Sweep, Verify, NNTrain, Props, FigureData };
std::string to_string(Mode m);

enum class OutputFormat { CSV, JSONL };

struct PropsRequest {
    Objective spec = Objective::good(1.0);
    PropertyOptions options;
    bool operator==(const PropsRequest& o) const {
        return spec == o.spec && options.grid_points == o.options.grid_points &&
               options.fd_points == o.options.fd_points && options.seed == o.options.seed;
    }
};

struct ExperimentConfig {
    Mode mode = Mode::Simulate;
    RunConfig run;                       // simulate
    std::vector<RunConfig> runs;         // sweep
    TheoremId theorem = TheoremId::Conv_Good;  // verify
    std::vector<GridCell> grid;          // verify
    NNExperiment nn;                     // nn-train
    PropsRequest props;                  // props
    std::string figure_id;               // figure-data
    std::string output_dir = "out";
    OutputFormat format = OutputFormat::CSV;
    bool operator==(const ExperimentConfig&) const = default;
};

// h from a learning-rate multiplier C using the family's natural denominator:
// uu0 for good/perturbed, uu0 + 4 for b = 1, (uu0 + 4)(x0 y0)^{2b-2} for b >= 3.
double lr_from_multiplier(const Objective& spec, double x0, double y0, double C);

json to_json(const Objective& f);
Objective objective_from_json(const json& j, const std::string& where = "spec");
json to_json(const RunConfig& c);
RunConfig run_config_from_json(const json& j, const std::string& where = "run");
json to_json(const GridCell& c);
GridCell grid_cell_from_json(const json& j, const std::string& where = "cell");
std::vector<GridCell> grid_from_json(const json& j, const std::string& where = "grid");
json to_json(const NetworkConfig& c);
NetworkConfig network_config_from_json(const json& j, const std::string& where = "network");
json to_json(const NNExperiment& e);
NNExperiment nn_experiment_from_json(const json& j, const std::string& where = "nn");
json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& c, const std::filesystem::path& path);

// Trajectory CSV: k,x,y,loss,delta,ell,q,r,uu,sharpness with 17 significant digits.
void write_trajectory_csv(const Trajectory& t, std::ostream& out);
void write_trajectory(const Trajectory& t, const std::filesystem::path& path);
std::vector<StepRecord> read_trajectory_csv(const std::filesystem::path& path);

json to_json(const PhenomenaReport& r);
json to_json(const TheoremCheck& c);
json to_json(const PropertyResult& r);
void write_report(const PhenomenaReport& r, const std::filesystem::path& path);
// One JSON object per line.
void write_report(const std::vector<TheoremCheck>& checks, const std::filesystem::path& path);

void write_nn_csv(const NNTrajectory& t, const std::filesystem::path& path);

// Opens path for writing, creating parent directories; throws std::runtime_error on failure.
std::ofstream open_output(const std::filesystem::path& path);

struct FigureOutput {
    std::vector<std::filesystem::path> files;  // CSVs followed by the metadata sidecar
    std::vector<std::string> summary;          // one line per run
};

const std::vector<std::string>& figure_ids();
FigureOutput write_figure_data(const std::string& id, const std::filesystem::path& dir);

// Command-line entry point. 0: success, 1: a check with satisfied hypotheses failed, 2: usage or I/O error.
int run_cli(int argc, char** argv);

}  // namespace eoslab
