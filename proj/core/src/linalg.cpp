#include "consflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "consflow/errors.hpp"
#include "consflow/tolerances.hpp"

namespace consflow {

namespace {

void require_finite(const std::vector<double>& entries) {
  for (double v : entries) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite, "matrix/vector entry is NaN or Inf");
    }
  }
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

}  // namespace

DenseVector::DenseVector(std::initializer_list<double> values)
    : entries_(values) {
  require_finite(entries_);
}

DenseVector::DenseVector(std::vector<double> entries)
    : entries_(std::move(entries)) {
  require_finite(entries_);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw Error(ErrorCode::bad_param, "entry count does not match rows*cols");
  }
  require_finite(entries_);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::bad_param, "ragged initializer list");
    }
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  require_finite(entries_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::bad_param, "matrix addition shape mismatch");
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) {
    out.row(0)[i] = a.row(0)[i] + b.row(0)[i];
  }
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::bad_param, "matrix subtraction shape mismatch");
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) {
    out.row(0)[i] = a.row(0)[i] - b.row(0)[i];
  }
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::bad_param, "matrix product shape mismatch");
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) {
    out.row(0)[i] = s * a.row(0)[i];
  }
  return out;
}

DenseVector operator+(const DenseVector& a, const DenseVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::bad_param, "vector addition dim mismatch");
  }
  DenseVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

DenseVector operator-(const DenseVector& a, const DenseVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::bad_param, "vector subtraction dim mismatch");
  }
  DenseVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

DenseVector operator*(double s, const DenseVector& a) {
  DenseVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = s * a[i];
  return out;
}

DenseVector operator*(const DenseMatrix& a, const DenseVector& x) {
  if (a.cols() != x.dim()) {
    throw Error(ErrorCode::bad_param, "matvec shape mismatch");
  }
  DenseVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    out[i] = s;
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::bad_param, "dot dim mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const DenseVector& v) { return std::sqrt(dot(v, v)); }

double max_abs(const DenseVector& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

double max_abs(const DenseMatrix& m) {
  double r = 0.0;
  for (double v : m.entries()) r = std::max(r, std::abs(v));
  return r;
}

double frobenius_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.entries()) s += v * v;
  return std::sqrt(s);
}

bool all_finite(const DenseVector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

bool all_finite(const DenseMatrix& m) {
  for (double v : m.entries()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p) {
        double* orow = out.row(i * b.rows() + p) + j * b.cols();
        const double* brow = b.row(p);
        for (std::size_t q = 0; q < b.cols(); ++q) orow[q] = aij * brow[q];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for symmetric matrices.
// ---------------------------------------------------------------------------

namespace {

double offdiag_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  }
  return std::sqrt(2.0 * s);
}

// One full cyclic sweep of Jacobi rotations over the strict upper triangle.
// `vectors` may be null when only eigenvalues are wanted.
void jacobi_sweep(DenseMatrix& a, DenseMatrix* vectors) {
  const std::size_t n = a.rows();
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      double t;
      if (std::abs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta);  // avoid overflow in theta*theta
      } else {
        t = sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      }
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      const double tau = s / (1.0 + c);

      const double app = a(p, p);
      const double aqq = a(q, q);
      a(p, p) = app - t * apq;
      a(q, q) = aqq + t * apq;
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == p || r == q) continue;
        const double arp = a(r, p);
        const double arq = a(r, q);
        a(r, p) = arp - s * (arq + tau * arp);
        a(p, r) = a(r, p);
        a(r, q) = arq + s * (arp - tau * arq);
        a(q, r) = a(r, q);
      }
      if (vectors != nullptr) {
        DenseMatrix& v = *vectors;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
}

void check_symmetric_input(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::not_symmetric, "matrix is not square");
  }
  double asym = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
    }
  }
  if (asym > tol::symmetry_check) {
    throw Error(ErrorCode::not_symmetric,
                "max |m(i,j)-m(j,i)| = " + std::to_string(asym));
  }
}

// Shared Jacobi driver; a is consumed. Returns ascending eigenvalues and
// fills `vectors` (when non-null) with matching orthonormal columns.
std::vector<double> jacobi_eigen(DenseMatrix a, DenseMatrix* vectors) {
  const std::size_t n = a.rows();
  // Work on the exactly symmetric part; the admitted asymmetry is roundoff.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  if (vectors != nullptr) *vectors = DenseMatrix::identity(n);

  const double target = tol::jacobi_offdiag_rel * frobenius_norm(a);
  bool converged = false;
  for (std::size_t sweep = 0; sweep < tol::jacobi_max_sweeps; ++sweep) {
    if (offdiag_norm(a) <= target) {
      converged = true;
      break;
    }
    jacobi_sweep(a, vectors);
  }
  if (!converged && offdiag_norm(a) > target) {
    throw Error(ErrorCode::no_convergence, "Jacobi sweep cap exceeded");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = a(order[k], order[k]);
  if (vectors != nullptr) {
    DenseMatrix sorted(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t r = 0; r < n; ++r) sorted(r, k) = (*vectors)(r, order[k]);
    }
    *vectors = std::move(sorted);
  }
  return values;
}

}  // namespace

EigenResult sym_eigen(const DenseMatrix& m) {
  check_symmetric_input(m);
  EigenResult result;
  result.values = jacobi_eigen(m, &result.vectors);
  return result;
}

std::vector<double> sym_eigenvalues(const DenseMatrix& m) {
  check_symmetric_input(m);
  return jacobi_eigen(m, nullptr);
}

// ---------------------------------------------------------------------------
// Gaussian elimination with partial pivoting.
// ---------------------------------------------------------------------------

DenseVector direct_solve(const DenseMatrix& a, const DenseVector& b) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::bad_param, "direct_solve requires a square matrix");
  }
  if (a.rows() != b.dim()) {
    throw Error(ErrorCode::bad_param, "rhs dimension does not match matrix");
  }
  const std::size_t n = a.rows();
  if (n == 0) return DenseVector{};

  const double scale = max_abs(a);
  if (scale == 0.0) {
    throw Error(ErrorCode::singular, "zero matrix");
  }
  const double pivot_floor = tol::solve_pivot_rel * scale;

  DenseMatrix u = a;
  DenseVector y = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot_row = k;
    double pivot_mag = std::abs(u(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double mag = std::abs(u(i, k));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (pivot_mag < pivot_floor) {
      throw Error(ErrorCode::singular,
                  "pivot " + std::to_string(pivot_mag) + " below threshold");
    }
    if (pivot_row != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(u(k, j), u(pivot_row, j));
      std::swap(y[k], y[pivot_row]);
    }
    const double inv_pivot = 1.0 / u(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = u(i, k) * inv_pivot;
      if (factor == 0.0) continue;
      u(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) u(i, j) -= factor * u(k, j);
      y[i] -= factor * y[k];
    }
  }

  DenseVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= u(ii, j) * x[j];
    x[ii] = s / u(ii, ii);
  }
  return x;
}

std::size_t rank(const DenseMatrix& a) {
  const double scale = max_abs(a);
  if (scale == 0.0) return 0;
  const double pivot_floor = tol::rank_pivot_rel * scale;

  DenseMatrix u = a;
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    std::size_t pivot_row = r;
    double pivot_mag = std::abs(u(r, col));
    for (std::size_t i = r + 1; i < m; ++i) {
      const double mag = std::abs(u(i, col));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (pivot_mag <= pivot_floor) continue;
    if (pivot_row != r) {
      for (std::size_t j = col; j < n; ++j) std::swap(u(r, j), u(pivot_row, j));
    }
    const double inv_pivot = 1.0 / u(r, col);
    for (std::size_t i = r + 1; i < m; ++i) {
      const double factor = u(i, col) * inv_pivot;
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) u(i, j) -= factor * u(r, j);
    }
    ++r;
  }
  return r;
}

// ---------------------------------------------------------------------------
// General eigenvalues: Householder reduction to Hessenberg form followed by
// implicitly shifted (Francis) QR iteration, eigenvalues only. Standard
// EISPACK-style formulation.
// ---------------------------------------------------------------------------

namespace {

void hessenberg_reduce(DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> u(n);
  for (std::size_t col = 0; col + 2 < n; ++col) {
    double scale = 0.0;
    for (std::size_t i = col + 1; i < n; ++i) scale += std::abs(a(i, col));
    if (scale == 0.0) continue;
    double sigma = 0.0;
    for (std::size_t i = col + 1; i < n; ++i) {
      u[i] = a(i, col) / scale;
      sigma += u[i] * u[i];
    }
    double alpha = std::sqrt(sigma);
    if (u[col + 1] < 0.0) alpha = -alpha;
    u[col + 1] += alpha;
    const double beta = alpha * u[col + 1];  // = u'u / 2
    if (beta == 0.0) continue;

    for (std::size_t j = 0; j < n; ++j) {  // A <- H A
      double s = 0.0;
      for (std::size_t i = col + 1; i < n; ++i) s += u[i] * a(i, j);
      s /= beta;
      for (std::size_t i = col + 1; i < n; ++i) a(i, j) -= s * u[i];
    }
    for (std::size_t i = 0; i < n; ++i) {  // A <- A H
      double s = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) s += a(i, j) * u[j];
      s /= beta;
      for (std::size_t j = col + 1; j < n; ++j) a(i, j) -= s * u[j];
    }
    a(col + 1, col) = -alpha * scale;
    for (std::size_t i = col + 2; i < n; ++i) a(i, col) = 0.0;
  }
}

std::vector<std::complex<double>> hqr_eigenvalues(DenseMatrix& h) {
  const int n = static_cast<int>(h.rows());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  if (n == 0) return out;

  auto H = [&](int i, int j) -> double& {
    return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(H(i, j));
  }

  int nn = n - 1;
  double t = 0.0;
  std::size_t total_its = 0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      // Look for a single small subdiagonal element to split the matrix.
      for (l = nn; l >= 1; --l) {
        double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(H(l, l - 1)) + s == s) {
          H(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = H(nn, nn);
      if (l == nn) {  // one real root
        out[static_cast<std::size_t>(nn)] = {x + t, 0.0};
        --nn;
      } else {
        double y = H(nn - 1, nn - 1);
        double w = H(nn, nn - 1) * H(nn - 1, nn);
        if (l == nn - 1) {  // a 2x2 block: real pair or complex conjugates
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            double r1 = x + z;
            double r2 = (z != 0.0) ? x - w / z : r1;
            out[static_cast<std::size_t>(nn - 1)] = {r1, 0.0};
            out[static_cast<std::size_t>(nn)] = {r2, 0.0};
          } else {
            out[static_cast<std::size_t>(nn - 1)] = {x + p, -z};
            out[static_cast<std::size_t>(nn)] = {x + p, z};
          }
          nn -= 2;
        } else {  // no root yet: one double-shift QR step
          if (its == 30 || ++total_its > tol::general_eigen_max_iter) {
            throw Error(ErrorCode::no_convergence, "QR iteration cap exceeded");
          }
          if (its == 10 || its == 20) {  // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) H(i, i) -= x;
            double s = std::abs(H(nn, nn - 1)) + std::abs(H(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (m = nn - 2; m >= l; --m) {
            z = H(m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / H(m + 1, m) + H(m, m + 1);
            q = H(m + 1, m + 1) - z - rr - ss;
            r = H(m + 2, m + 1);
            double s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            double u = std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r));
            double v = std::abs(p) *
                       (std::abs(H(m - 1, m - 1)) + std::abs(z) + std::abs(H(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            H(i, i - 2) = 0.0;
            if (i != m + 2) H(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = H(k, k - 1);
              q = H(k + 1, k - 1);
              r = (k != nn - 1) ? H(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) H(k, k - 1) = -H(k, k - 1);
            } else {
              H(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {  // row modification
              double pp = H(k, j) + q * H(k + 1, j);
              if (k != nn - 1) {
                pp += r * H(k + 2, j);
                H(k + 2, j) -= pp * z;
              }
              H(k + 1, j) -= pp * y;
              H(k, j) -= pp * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {  // column modification
              double pp = x * H(i, k) + y * H(i, k + 1);
              if (k != nn - 1) {
                pp += z * H(i, k + 2);
                H(i, k + 2) -= pp * r;
              }
              H(i, k + 1) -= pp * q;
              H(i, k) -= pp;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> general_eigenvalues(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::bad_param, "eigenvalues require a square matrix");
  }
  DenseMatrix h = a;
  hessenberg_reduce(h);
  auto values = hqr_eigenvalues(h);
  std::sort(values.begin(), values.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() < y.real();
              return x.imag() < y.imag();
            });
  return values;
}

}  // namespace consflow
