#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoslab/dense.hpp"
#include "eoslab/function_family.hpp"

namespace eoslab {

struct InitConfig {
    std::uint64_t seed = 1;
    double frob_W1 = 6.0;
    double frob_W2 = 20.0;
    bool operator==(const InitConfig&) const = default;
};

// depth 2: out = act(BN?(X W1)) W2
// depth 3: out = act(BN?(X W1 W2)) W3, W3 a fixed N2 x N2 matrix of +-1 entries
// No bias terms anywhere; BN has no learnable affine part.
struct NetworkConfig {
    std::size_t N0 = 20, N1 = 30, N2 = 5;
    int depth = 2;
    LossKind loss = LossKind::L2;
    double huber_delta = 1.0;
    Activation activation = Activation::tanh();
    bool batch_norm = false;
    InitConfig init;
    double bn_eps = 1e-5;
    bool parallel_matmul = false;

    void validate() const;
    bool operator==(const NetworkConfig&) const = default;
};

struct NetworkState {
    Matrix W1, W2, W3;
    long epoch = 0;

    std::size_t parameter_count() const { return W1.size() + W2.size(); }
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> theta);
    double balancing_gap_sq() const;
};

struct Dataset {
    Matrix inputs;   // samples x N0
    Matrix targets;  // samples x N2, one-hot
    std::string source;
};

NetworkState init_network(const NetworkConfig& cfg);

// Gaussian inputs labelled by the argmax of a random linear map.
Dataset synthetic_dataset(std::size_t samples, std::size_t N0, std::size_t N2, std::uint64_t seed);

// Per-column standardization with the batch mean and biased variance: (z - mean) / sqrt(var + eps).
Matrix batch_normalize(const Matrix& z, double eps);
// Input to the activation for every sample (after batch norm when enabled).
Matrix pre_activations(const NetworkConfig& cfg, const NetworkState& st, const Matrix& inputs);

Matrix network_output(const NetworkConfig& cfg, const NetworkState& st, const Matrix& inputs);
double forward_loss(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data);
// Gradient of the mean loss with respect to (W1, W2), flattened in that order.
std::vector<double> loss_grad(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data,
                              double* loss_out = nullptr);

// Hessian-vector product by central differences of the gradient,
// step 1e-4 (1 + |theta|) / |v|.
std::vector<double> hvp(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data,
                        std::span<const double> v);
double sharpness_lanczos(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data, int iters,
                         std::uint64_t seed);
// Dense Hessian assembled column by column from hvp(e_i), symmetrized.
Matrix dense_hessian(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data);

struct NNRecord {
    long epoch;
    double loss;
    double sharpness;
    double balancing_gap_sq;
};

struct NNTrajectory {
    std::vector<NNRecord> records;
    double h = 0.0;
    bool diverged = false;
};

struct TrainOptions {
    double h = 0.01;
    long epochs = 1000;
    long record_stride = 10;
    int lanczos_iters = 20;
    std::uint64_t hvp_seed = 0;
    bool operator==(const TrainOptions&) const = default;
};

NNTrajectory train_full_batch(const NetworkConfig& cfg, NetworkState& st, const Dataset& data,
                              const TrainOptions& opt);

struct NNVerdict {
    bool eos = false;        // last recorded sharpness within tol of 2/h
    bool balancing = false;  // (|W1|_F - |W2|_F)^2 shrank
    double final_sharpness = 0.0;
    double two_over_h = 0.0;
    double initial_gap = 0.0;
    double final_gap = 0.0;
};
NNVerdict classify_nn(const NNTrajectory& traj, double rel_tol = 0.2);

// Log-log slope of |network output|_F when W1 is scaled by s in [s_lo, s_hi].
double output_growth_slope(const NetworkConfig& cfg, const NetworkState& st, const Matrix& inputs,
                           double s_lo = 1.0, double s_hi = 100.0);

struct IdxError : std::runtime_error {
    IdxError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
    std::size_t offset;
};

struct IdxImages {
    std::size_t count = 0, rows = 0, cols = 0;
    std::vector<std::uint8_t> pixels;
};
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

// Reads an IDX image/label pair, scales pixels to [0,1], one-hot encodes labels and
// keeps a deterministic random subset.
Dataset load_idx(const std::string& images_path, const std::string& labels_path, std::size_t subset_size,
                 std::uint64_t seed, std::size_t classes = 10);

}  // namespace eoslab
