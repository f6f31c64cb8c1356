#pragma once

// Dense row-major linear algebra used by every other ringres module. //

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringres {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_{rows}, cols_{cols}, data_(rows * cols, fill)
    {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_{rows}, cols_{cols}, data_{std::move(data)}
    {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument(
              "Matrix: data length " + std::to_string(data_.size()) + " does not equal "
              + std::to_string(rows_) + "x" + std::to_string(cols_));
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows)
      : rows_{rows.size()}, cols_{rows.size() ? rows.begin()->size() : 0}
    {
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d)
    {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept
    {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    Matrix& operator*=(double s) noexcept
    {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(Matrix m, double s) noexcept { return m *= s; }

inline Matrix transpose(const Matrix& m)
{
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

inline double frobenius_norm(const Matrix& m) noexcept { return norm2(m.values()); }

inline bool all_finite(std::span<const double> v) noexcept
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline bool all_finite(const Matrix& m) noexcept { return all_finite(m.values()); }

/// out = m * v. `out` must not alias `v`.
inline void matvec_into(const Matrix& m, std::span<const double> v, std::span<double> out)
{
    if (m.cols() != v.size())
        throw std::invalid_argument(
          "matvec: matrix has " + std::to_string(m.cols()) + " columns but vector has length "
          + std::to_string(v.size()));
    if (out.size() != m.rows()) throw std::invalid_argument("matvec: output length mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
}

inline Vector matvec(const Matrix& m, std::span<const double> v)
{
    Vector out(m.rows());
    matvec_into(m, v, out);
    return out;
}

/// mᵀ * v without forming the transpose.
inline Vector transpose_matvec(const Matrix& m, std::span<const double> v)
{
    if (m.rows() != v.size()) throw std::invalid_argument("transpose_matvec: dimension mismatch");
    Vector out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double vi = v[i];
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * r[j];
    }
    return out;
}

/// a * b
inline Matrix matmul(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

/// aᵀ * b
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at_b: row count mismatch");
    Matrix c(a.cols(), b.cols());
    for (std::size_t s = 0; s < a.rows(); ++s) {
        auto as = a.row(s);
        auto bs = b.row(s);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ai = as[i];
            if (ai == 0.0) continue;
            auto ci = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += ai * bs[j];
        }
    }
    return c;
}

/// a * bᵀ
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_a_bt: column count mismatch");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
    return c;
}

struct SpectralEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct PowerIterationOptions {
    double tolerance = 1e-6;
    int max_iterations = 1000;
};

/// Largest singular value of a square matrix by power iteration on mᵀm.
///
/// The start vector is the normalized all-ones vector. If that vector lies in
/// the null space, the iteration restarts from the unit vector of the column
/// with the largest norm. A zero matrix yields a converged estimate of 0.
/// Non-convergence is reported through the flag; the value is the last estimate.
inline SpectralEstimate spectral_radius(const Matrix& m, PowerIterationOptions opts = {})
{
    if (!m.square())
        throw std::invalid_argument(
          "spectral_radius: matrix must be square, got " + std::to_string(m.rows()) + "x"
          + std::to_string(m.cols()));
    const std::size_t n = m.rows();
    if (n == 0) throw std::invalid_argument("spectral_radius: empty matrix");

    Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (norm2(matvec(m, v)) == 0.0) {
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += m(i, j) * m(i, j);
            if (s > best_norm) best_norm = s, best = j;
        }
        if (best_norm == 0.0) return {0.0, true, 0};
        std::fill(v.begin(), v.end(), 0.0);
        v[best] = 1.0;
    }

    SpectralEstimate est;
    double previous = 0.0;
    Vector w(n);
    for (int it = 1; it <= opts.max_iterations; ++it) {
        matvec_into(m, v, w);
        const double sigma = norm2(w);
        Vector z = transpose_matvec(m, w);
        const double zn = norm2(z);
        est.value = sigma;
        est.iterations = it;
        if (zn == 0.0) {
            est.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / zn;
        if (it > 1 && std::abs(sigma - previous) <= opts.tolerance * sigma) {
            est.converged = true;
            break;
        }
        previous = sigma;
    }
    return est;
}

/// Returns m rescaled so that its spectral_radius equals `target`.
inline Matrix scale_to_radius(const Matrix& m, double target)
{
    if (!(target > 0.0)) throw std::invalid_argument("scale_to_radius: target must be > 0");
    const double r = spectral_radius(m).value;
    if (!(r > 0.0)) throw std::invalid_argument("scale_to_radius: cannot scale a zero matrix");
    return m * (target / r);
}

namespace detail {

// In-place Cholesky of a symmetric positive definite matrix; lower factor is left in `a`.
inline bool cholesky(Matrix& a)
{
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) - dot(a.row(j).first(j), a.row(j).first(j));
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        d = std::sqrt(d);
        a(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i)
            a(i, j) = (a(i, j) - dot(a.row(i).first(j), a.row(j).first(j))) / d;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
    return true;
}

// Solves L Lᵀ X = B for every column of B in place.
inline void cholesky_solve(const Matrix& l, Matrix& b)
{
    const std::size_t n = l.rows();
    const std::size_t k = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        auto bi = b.row(i);
        for (std::size_t j = 0; j < i; ++j) {
            const double lij = l(i, j);
            auto bj = b.row(j);
            for (std::size_t c = 0; c < k; ++c) bi[c] -= lij * bj[c];
        }
        for (std::size_t c = 0; c < k; ++c) bi[c] /= l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        auto bi = b.row(ii);
        for (std::size_t j = ii + 1; j < n; ++j) {
            const double lji = l(j, ii);
            auto bj = b.row(j);
            for (std::size_t c = 0; c < k; ++c) bi[c] -= lji * bj[c];
        }
        for (std::size_t c = 0; c < k; ++c) bi[c] /= l(ii, ii);
    }
}

// Least squares min ‖XW − Y‖ by Householder QR. Throws on rank deficiency.
inline Matrix qr_least_squares(Matrix x, Matrix y)
{
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const std::size_t q = y.cols();
    if (n < p)
        throw std::invalid_argument(
          "solve_ridge: underdetermined system with lambda = 0; use lambda > 0");
    Vector diag(p);
    Vector house(n);
    for (std::size_t k = 0; k < p; ++k) {
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += x(i, k) * x(i, k);
        const double alpha = x(k, k) > 0 ? -std::sqrt(s) : std::sqrt(s);
        diag[k] = alpha;
        for (std::size_t i = k; i < n; ++i) house[i] = x(i, k);
        house[k] -= alpha;
        double hn = 0.0;
        for (std::size_t i = k; i < n; ++i) hn += house[i] * house[i];
        if (hn == 0.0) continue;
        for (std::size_t j = k + 1; j < p; ++j) {
            double t = 0.0;
            for (std::size_t i = k; i < n; ++i) t += house[i] * x(i, j);
            t = 2.0 * t / hn;
            for (std::size_t i = k; i < n; ++i) x(i, j) -= t * house[i];
        }
        for (std::size_t j = 0; j < q; ++j) {
            double t = 0.0;
            for (std::size_t i = k; i < n; ++i) t += house[i] * y(i, j);
            t = 2.0 * t / hn;
            for (std::size_t i = k; i < n; ++i) y(i, j) -= t * house[i];
        }
    }
    double max_diag = 0.0;
    for (double d : diag) max_diag = std::max(max_diag, std::abs(d));
    for (double d : diag)
        if (!(std::abs(d) > 1e-12 * max_diag))
            throw std::invalid_argument(
              "solve_ridge: singular system with lambda = 0; use lambda > 0");

    Matrix w(p, q);
    for (std::size_t kk = p; kk-- > 0;) {
        for (std::size_t j = 0; j < q; ++j) {
            double s = y(kk, j);
            for (std::size_t c = kk + 1; c < p; ++c) s -= x(kk, c) * w(c, j);
            w(kk, j) = s / diag[kk];
        }
    }
    return w;
}

} // namespace detail

/// Ridge regression W = (XᵀX + λI)⁻¹ XᵀY for X (samples × features), Y (samples × targets).
///
/// λ = 0 is solved by Householder QR on X directly. For λ > 0 the normal equations are
/// factored by Cholesky; when there are fewer samples than features the equivalent
/// kernel form Xᵀ(XXᵀ + λI)⁻¹Y is used so the factored system is samples × samples.
inline Matrix solve_ridge(const Matrix& x, const Matrix& y, double lambda)
{
    if (x.rows() != y.rows())
        throw std::invalid_argument(
          "solve_ridge: X has " + std::to_string(x.rows()) + " rows but Y has "
          + std::to_string(y.rows()));
    if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("solve_ridge: empty system");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("solve_ridge: lambda must be finite and >= 0");

    if (lambda == 0.0) return detail::qr_least_squares(x, y);

    if (x.rows() < x.cols()) {
        Matrix k = matmul_a_bt(x, x);
        for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += lambda;
        if (!detail::cholesky(k))
            throw std::runtime_error("solve_ridge: kernel system is not positive definite");
        Matrix a = y;
        detail::cholesky_solve(k, a);
        return matmul_at_b(x, a);
    }

    Matrix g = matmul_at_b(x, x);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
    if (!detail::cholesky(g))
        throw std::runtime_error("solve_ridge: normal equations are not positive definite");
    Matrix w = matmul_at_b(x, y);
    detail::cholesky_solve(g, w);
    return w;
}

} // namespace ringres
