#include <doctest.h>

#include <cstdlib>
#include <random>

#include "eoslab/dense.hpp"

using namespace eoslab;

namespace {
Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(r, c);
    for (auto& v : m.flat()) v = g(rng);
    return m;
}
}  // namespace

TEST_SUITE("dense") {
    TEST_CASE("products agree with a naive triple loop") {
        const Matrix a = random_matrix(7, 5, 1), b = random_matrix(5, 4, 2);
        const Matrix c = matmul(a, b);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                double s = 0;
                for (std::size_t k = 0; k < 5; ++k) s += a(i, k) * b(k, j);
                CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
            }
        const Matrix at = random_matrix(5, 7, 3);
        const Matrix tn = matmul_tn(at, random_matrix(5, 3, 4));
        CHECK(tn.rows() == 7);
        CHECK(tn.cols() == 3);
        Matrix att(7, 5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 7; ++j) att(j, i) = at(i, j);
        CHECK(matmul_tn(at, b) == matmul(att, b));
        const Matrix nt = matmul_nt(a, random_matrix(6, 5, 5));
        CHECK(nt.rows() == 7);
        CHECK(nt.cols() == 6);
        CHECK_THROWS(matmul(a, a));
    }

    TEST_CASE("serial and parallel products are bit-identical") {
        const Matrix a = random_matrix(64, 40, 7), b = random_matrix(40, 30, 8), c = random_matrix(64, 30, 9);
        CHECK(matmul(a, b, Exec::Serial) == matmul(a, b, Exec::Parallel));
        CHECK(matmul_tn(a, c, Exec::Serial) == matmul_tn(a, c, Exec::Parallel));
        CHECK(matmul_nt(c, b, Exec::Serial) == matmul_nt(c, b, Exec::Parallel));
    }

    TEST_CASE("Jacobi eigenvalues") {
        Matrix m(3, 3);
        m(0, 0) = 2;
        m(1, 1) = 2;
        m(2, 2) = 5;
        m(0, 1) = m(1, 0) = 1;
        const auto ev = symmetric_eigenvalues(m);
        CHECK(ev[0] == doctest::Approx(1.0));
        CHECK(ev[1] == doctest::Approx(3.0));
        CHECK(ev[2] == doctest::Approx(5.0));
        CHECK_THROWS(symmetric_eigenvalues(Matrix(2, 3)));
    }

    TEST_CASE("worker count honours EOSLAB_THREADS") {
        setenv("EOSLAB_THREADS", "3", 1);
        CHECK(worker_count() == 3);
        setenv("EOSLAB_THREADS", "junk", 1);
        CHECK(worker_count() >= 1);
        unsetenv("EOSLAB_THREADS");
        CHECK(worker_count() >= 1);
    }

    TEST_CASE("parallel loop propagates exceptions") {
        CHECK_THROWS_AS(for_each_index(16, Exec::Parallel,
                                       [](std::size_t i) {
                                           if (i == 5) throw std::runtime_error("boom");
                                       }),
                        std::runtime_error);
    }
}
