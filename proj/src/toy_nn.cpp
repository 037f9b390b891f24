#include "eoslab/toy_nn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace eoslab {

namespace {

constexpr double kLeakySlope = 0.01;

double act(const Activation& a, double z) {
    switch (a.kind) {
        case Activation::Kind::Tanh: return std::tanh(z);
        case Activation::Kind::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Kind::LeakyReLU: return z > 0.0 ? z : kLeakySlope * z;
        case Activation::Kind::ReLUk: return z > 0.0 ? std::pow(z, a.power) : 0.0;
    }
    return z;
}

double act_prime(const Activation& a, double z) {
    switch (a.kind) {
        case Activation::Kind::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Kind::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Kind::LeakyReLU: return z > 0.0 ? 1.0 : kLeakySlope;
        case Activation::Kind::ReLUk: return z > 0.0 ? a.power * std::pow(z, a.power - 1) : 0.0;
    }
    return 1.0;
}

double loss_value(const NetworkConfig& cfg, double d) {
    if (cfg.loss == LossKind::L2) return 0.5 * d * d;
    const double ad = std::abs(d), k = cfg.huber_delta;
    return ad <= k ? 0.5 * d * d : k * (ad - 0.5 * k);
}

double loss_prime(const NetworkConfig& cfg, double d) {
    if (cfg.loss == LossKind::L2) return d;
    return std::clamp(d, -cfg.huber_delta, cfg.huber_delta);
}

struct BatchNormCache {
    Matrix normalized;
    std::vector<double> inv_std;
};

BatchNormCache batch_norm(const Matrix& z, double eps) {
    const std::size_t n = z.rows(), m = z.cols();
    BatchNormCache c{Matrix(n, m), std::vector<double>(m)};
    for (std::size_t j = 0; j < m; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) mu += z(i, j);
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (z(i, j) - mu) * (z(i, j) - mu);
        var /= static_cast<double>(n);
        const double inv = 1.0 / std::sqrt(var + eps);
        c.inv_std[j] = inv;
        for (std::size_t i = 0; i < n; ++i) c.normalized(i, j) = (z(i, j) - mu) * inv;
    }
    return c;
}

Matrix batch_norm_backward(const BatchNormCache& c, const Matrix& dA) {
    const std::size_t n = dA.rows(), m = dA.cols();
    const double nn = static_cast<double>(n);
    Matrix dZ(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0, sum_xhat = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += dA(i, j);
            sum_xhat += dA(i, j) * c.normalized(i, j);
        }
        for (std::size_t i = 0; i < n; ++i)
            dZ(i, j) = c.inv_std[j] / nn * (nn * dA(i, j) - sum - c.normalized(i, j) * sum_xhat);
    }
    return dZ;
}

// Everything the backward pass needs from a forward pass.
struct Forward {
    Matrix z1;   // X W1
    Matrix pre;  // input to the activation (after BN when enabled)
    Matrix hidden;
    Matrix out;
    BatchNormCache bn;
};

Forward forward(const NetworkConfig& cfg, const NetworkState& st, const Matrix& x) {
    const Exec ex = cfg.parallel_matmul ? Exec::Parallel : Exec::Serial;
    Forward f;
    f.z1 = matmul(x, st.W1, ex);
    Matrix z = cfg.depth == 3 ? matmul(f.z1, st.W2, ex) : f.z1;
    if (cfg.batch_norm) {
        f.bn = batch_norm(z, cfg.bn_eps);
        f.pre = f.bn.normalized;
    } else {
        f.pre = std::move(z);
    }
    f.hidden = Matrix(f.pre.rows(), f.pre.cols());
    for (std::size_t i = 0; i < f.pre.size(); ++i) f.hidden.flat()[i] = act(cfg.activation, f.pre.flat()[i]);
    f.out = matmul(f.hidden, cfg.depth == 3 ? st.W3 : st.W2, ex);
    return f;
}

Matrix uniform_matrix(std::size_t r, std::size_t c, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix m(r, c);
    for (auto& v : m.flat()) v = u(rng);
    return m;
}

void rescale(Matrix& m, double target) {
    const double n = m.frobenius();
    for (auto& v : m.flat()) v *= target / n;
}

}  // namespace

void NetworkConfig::validate() const {
    if (N0 == 0 || N1 == 0 || N2 == 0) throw std::invalid_argument("network dimensions must be positive");
    if (depth != 2 && depth != 3) throw std::invalid_argument("depth must be 2 or 3");
    if (!(init.frob_W1 > 0.0) || !(init.frob_W2 > 0.0)) throw std::invalid_argument("Frobenius norms must be > 0");
    if (loss == LossKind::Huber && !(huber_delta > 0.0)) throw std::invalid_argument("Huber delta must be > 0");
    if (activation.kind == Activation::Kind::ReLUk && activation.power < 2)
        throw std::invalid_argument("ReLU^k needs integer k >= 2");
    if (!(bn_eps > 0.0)) throw std::invalid_argument("bn_eps must be > 0");
}

std::vector<double> NetworkState::flatten() const {
    std::vector<double> theta;
    theta.reserve(parameter_count());
    theta.insert(theta.end(), W1.flat().begin(), W1.flat().end());
    theta.insert(theta.end(), W2.flat().begin(), W2.flat().end());
    return theta;
}

void NetworkState::unflatten(std::span<const double> theta) {
    if (theta.size() != parameter_count()) throw std::invalid_argument("unflatten: wrong parameter count");
    std::copy(theta.begin(), theta.begin() + static_cast<long>(W1.size()), W1.flat().begin());
    std::copy(theta.begin() + static_cast<long>(W1.size()), theta.end(), W2.flat().begin());
}

double NetworkState::balancing_gap_sq() const {
    const double d = W1.frobenius() - W2.frobenius();
    return d * d;
}

NetworkState init_network(const NetworkConfig& cfg) {
    cfg.validate();
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::mt19937_64 rng(cfg.init.seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ull);
        NetworkState st;
        st.W1 = uniform_matrix(cfg.N0, cfg.N1, 1.0 / std::sqrt(static_cast<double>(cfg.N0)), rng);
        st.W2 = uniform_matrix(cfg.N1, cfg.N2, 1.0 / std::sqrt(static_cast<double>(cfg.N1)), rng);
        if (st.W1.frobenius() == 0.0 || st.W2.frobenius() == 0.0) continue;
        rescale(st.W1, cfg.init.frob_W1);
        rescale(st.W2, cfg.init.frob_W2);
        if (cfg.depth == 3) {
            std::bernoulli_distribution coin(0.5);
            st.W3 = Matrix(cfg.N2, cfg.N2);
            for (auto& v : st.W3.flat()) v = coin(rng) ? 1.0 : -1.0;
        }
        return st;
    }
    throw std::runtime_error("init_network: zero-norm weight draw twice");
}

Dataset synthetic_dataset(std::size_t samples, std::size_t N0, std::size_t N2, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Dataset d{Matrix(samples, N0), Matrix(samples, N2), "synthetic"};
    Matrix teacher(N0, N2);
    for (auto& v : d.inputs.flat()) v = g(rng);
    for (auto& v : teacher.flat()) v = g(rng);
    const Matrix logits = matmul(d.inputs, teacher);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto row = logits.row(i);
        const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        d.targets(i, best) = 1.0;
    }
    return d;
}

Matrix batch_normalize(const Matrix& z, double eps) { return batch_norm(z, eps).normalized; }

Matrix pre_activations(const NetworkConfig& cfg, const NetworkState& st, const Matrix& inputs) {
    return forward(cfg, st, inputs).pre;
}

Matrix network_output(const NetworkConfig& cfg, const NetworkState& st, const Matrix& inputs) {
    return forward(cfg, st, inputs).out;
}

double forward_loss(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data) {
    const Matrix out = network_output(cfg, st, data.inputs);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += loss_value(cfg, out.flat()[i] - data.targets.flat()[i]);
    return s / static_cast<double>(out.size());
}

std::vector<double> loss_grad(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data, double* loss_out) {
    const Exec ex = cfg.parallel_matmul ? Exec::Parallel : Exec::Serial;
    const Forward f = forward(cfg, st, data.inputs);
    const double scale = 1.0 / static_cast<double>(f.out.size());
    Matrix d_out(f.out.rows(), f.out.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < f.out.size(); ++i) {
        const double d = f.out.flat()[i] - data.targets.flat()[i];
        loss += loss_value(cfg, d);
        d_out.flat()[i] = loss_prime(cfg, d) * scale;
    }
    if (loss_out) *loss_out = loss * scale;

    const Matrix& last = cfg.depth == 3 ? st.W3 : st.W2;
    Matrix d_hidden = matmul_nt(d_out, last, ex);
    for (std::size_t i = 0; i < d_hidden.size(); ++i) d_hidden.flat()[i] *= act_prime(cfg.activation, f.pre.flat()[i]);
    Matrix d_z = cfg.batch_norm ? batch_norm_backward(f.bn, d_hidden) : std::move(d_hidden);

    Matrix gW1, gW2;
    if (cfg.depth == 3) {
        gW2 = matmul_tn(f.z1, d_z, ex);
        const Matrix d_z1 = matmul_nt(d_z, st.W2, ex);
        gW1 = matmul_tn(data.inputs, d_z1, ex);
    } else {
        gW2 = matmul_tn(f.hidden, d_out, ex);
        gW1 = matmul_tn(data.inputs, d_z, ex);
    }
    std::vector<double> g;
    g.reserve(st.parameter_count());
    g.insert(g.end(), gW1.flat().begin(), gW1.flat().end());
    g.insert(g.end(), gW2.flat().begin(), gW2.flat().end());
    return g;
}

std::vector<double> hvp(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data,
                        std::span<const double> v) {
    const std::vector<double> theta = st.flatten();
    const double vn = norm2(v);
    std::vector<double> out(theta.size(), 0.0);
    if (vn == 0.0) return out;
    const double eps = 1e-4 * (1.0 + norm2(theta)) / vn;
    NetworkState probe = st;
    std::vector<double> shifted(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) shifted[i] = theta[i] + eps * v[i];
    probe.unflatten(shifted);
    const auto gp = loss_grad(cfg, probe, data);
    for (std::size_t i = 0; i < theta.size(); ++i) shifted[i] = theta[i] - eps * v[i];
    probe.unflatten(shifted);
    const auto gm = loss_grad(cfg, probe, data);
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = (gp[i] - gm[i]) / (2.0 * eps);
    return out;
}

double sharpness_lanczos(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data, int iters,
                         std::uint64_t seed) {
    const LinearOperator op = [&](std::span<const double> in, std::span<double> out) {
        const auto hv = hvp(cfg, st, data, in);
        std::copy(hv.begin(), hv.end(), out.begin());
    };
    return lanczos_top(op, st.parameter_count(), iters, seed).top;
}

Matrix dense_hessian(const NetworkConfig& cfg, const NetworkState& st, const Dataset& data) {
    const std::size_t n = st.parameter_count();
    Matrix H(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const auto col = hvp(cfg, st, data, e);
        for (std::size_t i = 0; i < n; ++i) H(i, j) = col[i];
        e[j] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) H(i, j) = H(j, i) = 0.5 * (H(i, j) + H(j, i));
    return H;
}

NNTrajectory train_full_batch(const NetworkConfig& cfg, NetworkState& st, const Dataset& data,
                              const TrainOptions& opt) {
    if (!(opt.h > 0.0)) throw std::invalid_argument("train_full_batch: h must be > 0");
    NNTrajectory traj;
    traj.h = opt.h;
    const long stride = std::max(1L, opt.record_stride);
    std::vector<double> theta = st.flatten();
    for (long e = 0;; ++e) {
        double loss = 0.0;
        const auto g = loss_grad(cfg, st, data, &loss);
        if (!std::isfinite(loss)) {
            traj.diverged = true;
            break;
        }
        if (e % stride == 0 || e == opt.epochs) {
            traj.records.push_back(
                {st.epoch, loss, sharpness_lanczos(cfg, st, data, opt.lanczos_iters, opt.hvp_seed), st.balancing_gap_sq()});
        }
        if (e == opt.epochs) break;
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= opt.h * g[i];
        st.unflatten(theta);
        ++st.epoch;
    }
    return traj;
}

NNVerdict classify_nn(const NNTrajectory& traj, double rel_tol) {
    NNVerdict v;
    if (traj.records.empty()) return v;
    v.two_over_h = 2.0 / traj.h;
    v.final_sharpness = traj.records.back().sharpness;
    v.initial_gap = traj.records.front().balancing_gap_sq;
    v.final_gap = traj.records.back().balancing_gap_sq;
    v.eos = !traj.diverged && std::abs(v.final_sharpness - v.two_over_h) <= rel_tol * v.two_over_h;
    v.balancing = !traj.diverged && v.final_gap < v.initial_gap * (1.0 - 1e-6);
    return v;
}

double output_growth_slope(const NetworkConfig& cfg, const NetworkState& st, const Matrix& inputs, double s_lo,
                           double s_hi) {
    const int points = 9;
    std::vector<double> lx, ly;
    for (int i = 0; i < points; ++i) {
        const double ls = std::log(s_lo) + (std::log(s_hi) - std::log(s_lo)) * i / (points - 1);
        NetworkState scaled = st;
        for (auto& w : scaled.W1.flat()) w *= std::exp(ls);
        lx.push_back(ls);
        ly.push_back(std::log(network_output(cfg, scaled, inputs).frobenius()));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < points; ++i) mx += lx[i], my += ly[i];
    mx /= points;
    my /= points;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < points; ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    return sxy / sxx;
}

}  // namespace eoslab
