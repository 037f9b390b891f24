#include "eoslab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace eoslab {

double Matrix::frobenius() const { return norm2(data_); }

Matrix matmul(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    const std::size_t n = b.cols(), inner = a.cols();
    for_each_index(a.rows(), exec, [&](std::size_t i) {
        double* ci = c.row(i).data();
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = a(i, k);
            const double* bk = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    });
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: shape mismatch");
    Matrix c(a.cols(), b.cols());
    const std::size_t n = b.cols(), inner = a.rows();
    for_each_index(a.cols(), exec, [&](std::size_t i) {
        double* ci = c.row(i).data();
        for (std::size_t k = 0; k < inner; ++k) {
            const double aki = a(k, i);
            const double* bk = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    });
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: shape mismatch");
    Matrix c(a.rows(), b.rows());
    for_each_index(a.rows(), exec, [&](std::size_t i) {
        const auto ai = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(ai, b.row(j));
    });
    return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> symmetric_eigenvalues(Matrix a, double tol, int max_sweeps) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += a(i, i) * a(i, i);
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        }
        if (off <= tol * tol * (diag + off)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

LanczosResult lanczos_top(const LinearOperator& op, std::size_t n, int iters, std::uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("lanczos_top: iters must be >= 1");
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(iters), n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<std::vector<double>> basis;
    std::vector<double> v(n), w(n), alpha, beta;
    for (auto& e : v) e = gauss(rng);
    const double nv = norm2(v);
    for (auto& e : v) e /= nv;

    LanczosResult res;
    for (std::size_t j = 0; j < m; ++j) {
        basis.push_back(v);
        op(basis.back(), w);
        const double a = dot(w, basis.back());
        alpha.push_back(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double c = dot(w, b);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
            }
        const double bnorm = norm2(w);
        res.iterations = static_cast<int>(j + 1);
        if (j + 1 == m) break;
        if (bnorm <= 1e-12 * std::max(1.0, std::abs(a))) {
            res.breakdown = true;
            break;
        }
        beta.push_back(bnorm);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / bnorm;
    }
    const std::size_t k = alpha.size();
    Matrix t(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    res.top = symmetric_eigenvalues(t).back();
    return res;
}

}  // namespace eoslab
