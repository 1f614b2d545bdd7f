// linalg.hpp — small dense matrix type plus the two solvers the toolkit
// needs: LU linear solve and a cyclic-Jacobi symmetric eigensolver.
// Everything here is desk-scale (n up to a few hundred); no attempt is made
// at blocking or sparsity.
#pragma once

#include <cstddef>
#include <vector>

namespace netlearn {

using Vec = std::vector<double>;

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a; // row-major

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Vec matvec(const Matrix& m, const Vec& x);
Matrix matmul(const Matrix& a, const Matrix& b);
bool is_symmetric(const Matrix& m, double tol = 1e-12);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);            // Euclidean norm
double norm2_sq(const Vec& a);

// Solves a x = b by LU with partial pivoting; throws on singular input.
Vec lu_solve(Matrix a, Vec b);

// All eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi; converges
// to machine precision for the sizes used here. Throws if m is not square
// or not symmetric.
std::vector<double> symmetric_eigenvalues(Matrix m);

double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

} // namespace netlearn
