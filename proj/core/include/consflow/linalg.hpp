#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace consflow {

/// Dense column vector. Entries are required to be finite.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim) : entries_(dim, 0.0) {}
  DenseVector(std::initializer_list<double> values);
  explicit DenseVector(std::vector<double> entries);

  std::size_t dim() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> entries_;
};

/// Dense row-major matrix. Entries are required to be finite.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  const std::vector<double>& entries() const { return entries_; }

  /// Pointer to the start of row i (row-major storage).
  const double* row(std::size_t i) const { return entries_.data() + i * cols_; }
  double* row(std::size_t i) { return entries_.data() + i * cols_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Full symmetric eigendecomposition. `values` ascending; column j of
/// `vectors` pairs with values[j]; columns orthonormal.
struct EigenResult {
  std::vector<double> values;
  DenseMatrix vectors;
};

// ---- elementwise / BLAS-level helpers ----

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
DenseVector operator+(const DenseVector& a, const DenseVector& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);
DenseVector operator*(double s, const DenseVector& a);
DenseVector operator*(const DenseMatrix& a, const DenseVector& x);

DenseMatrix transpose(const DenseMatrix& a);
double dot(const DenseVector& a, const DenseVector& b);
double norm2(const DenseVector& v);

/// max |entry|
double max_abs(const DenseVector& v);
double max_abs(const DenseMatrix& m);
double frobenius_norm(const DenseMatrix& m);

bool all_finite(const DenseVector& v);
bool all_finite(const DenseMatrix& m);

// ---- kernel operations ----

/// Kronecker product, (a.rows*b.rows) x (a.cols*b.cols).
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
/// Throws ErrorCode::not_symmetric if max |m(i,j)-m(j,i)| exceeds
/// tol::symmetry_check, ErrorCode::no_convergence past the sweep cap.
EigenResult sym_eigen(const DenseMatrix& m);

/// Eigenvalues only; same algorithm, skips accumulating vectors.
std::vector<double> sym_eigenvalues(const DenseMatrix& m);

/// Solve a x = b by Gaussian elimination with partial pivoting.
/// Throws ErrorCode::singular when a pivot falls below
/// tol::solve_pivot_rel * max|a|.
DenseVector direct_solve(const DenseMatrix& a, const DenseVector& b);

/// Numerical rank via row elimination; pivots below
/// tol::rank_pivot_rel * max|a| do not count.
std::size_t rank(const DenseMatrix& a);

/// Eigenvalues of a general square matrix: Householder reduction to
/// Hessenberg form followed by shifted QR iteration. Serves the small
/// nonsymmetric cross-checks; symmetric paths should use sym_eigen.
std::vector<std::complex<double>> general_eigenvalues(const DenseMatrix& a);

}  // namespace consflow
