#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eoslab/parallel.hpp"

namespace eoslab {

// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    double frobenius() const;
    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// C = A B, C = A^T B and C = A B^T. Rows of C are split across threads in the
// parallel path; each entry is accumulated in the same order either way, so both
// paths agree bit for bit.
Matrix matmul(const Matrix& a, const Matrix& b, Exec exec = Exec::Serial);
Matrix matmul_tn(const Matrix& a, const Matrix& b, Exec exec = Exec::Serial);
Matrix matmul_nt(const Matrix& a, const Matrix& b, Exec exec = Exec::Serial);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(Matrix a, double tol = 1e-14, int max_sweeps = 100);

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

struct LanczosResult {
    double top = 0.0;       // largest Ritz value
    int iterations = 0;
    bool breakdown = false;
};

// Lanczos with full reorthogonalization on a symmetric operator of dimension n.
LanczosResult lanczos_top(const LinearOperator& op, std::size_t n, int iters, std::uint64_t seed);

}  // namespace eoslab
