#pragma once
#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "lzero/integers.hpp"

namespace lzero {

/// Dense integer matrix, row-major. Empty shapes (0 x n, n x 0) are
/// first-class: they present zero modules and zero morphisms.
class IntMatrix {
  public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(long long rows, long long cols)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols)) {
        if (rows < 0 || cols < 0) throw malformed_input("matrix shape must be nonnegative");
    }
    IntMatrix(long long rows, long long cols, std::vector<Int> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (rows < 0 || cols < 0) throw malformed_input("matrix shape must be nonnegative");
        if (a_.size() != static_cast<size_t>(rows * cols))
            throw malformed_input("entry count does not match shape");
    }

    static IntMatrix identity(long long n) {
        IntMatrix m(n, n);
        for (long long i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    long long rows() const { return rows_; }
    long long cols() const { return cols_; }

    Int& at(long long i, long long j) { return a_[static_cast<size_t>(i * cols_ + j)]; }
    const Int& at(long long i, long long j) const { return a_[static_cast<size_t>(i * cols_ + j)]; }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const Int& x : a_)
            if (x != 0) return false;
        return true;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols_ != o.rows_) throw malformed_input("matrix product shape mismatch");
        IntMatrix r(rows_, o.cols_);
        for (long long i = 0; i < rows_; ++i)
            for (long long k = 0; k < cols_; ++k) {
                const Int& v = at(i, k);
                if (v == 0) continue;
                for (long long j = 0; j < o.cols_; ++j) r.at(i, j) += v * o.at(k, j);
            }
        return r;
    }

    IntMatrix operator+(const IntMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw malformed_input("matrix sum shape mismatch");
        IntMatrix r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }

    IntMatrix operator-(const IntMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw malformed_input("matrix difference shape mismatch");
        IntMatrix r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }

    IntMatrix operator-() const {
        IntMatrix r = *this;
        for (Int& x : r.a_) x = -x;
        return r;
    }

    IntMatrix scaled(const Int& c) const {
        IntMatrix r = *this;
        for (Int& x : r.a_) x *= c;
        return r;
    }

    IntMatrix transposed() const {
        IntMatrix r(cols_, rows_);
        for (long long i = 0; i < rows_; ++i)
            for (long long j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    std::vector<Int> column(long long j) const {
        std::vector<Int> c(static_cast<size_t>(rows_));
        for (long long i = 0; i < rows_; ++i) c[static_cast<size_t>(i)] = at(i, j);
        return c;
    }

    void set_column(long long j, const std::vector<Int>& c) {
        for (long long i = 0; i < rows_; ++i) at(i, j) = c[static_cast<size_t>(i)];
    }

    IntMatrix columns(long long first, long long count) const {
        IntMatrix r(rows_, count);
        for (long long i = 0; i < rows_; ++i)
            for (long long j = 0; j < count; ++j) r.at(i, j) = at(i, first + j);
        return r;
    }

    IntMatrix top_rows(long long count) const {
        IntMatrix r(count, cols_);
        for (long long i = 0; i < count; ++i)
            for (long long j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        os << "[";
        for (long long i = 0; i < rows_; ++i) {
            os << (i ? "; " : "");
            for (long long j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j);
        }
        os << "]";
        return os.str();
    }

  private:
    long long rows_, cols_;
    std::vector<Int> a_;
};

inline IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows()) throw malformed_input("hstack row mismatch");
    IntMatrix r(a.rows(), a.cols() + b.cols());
    for (long long i = 0; i < a.rows(); ++i) {
        for (long long j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
        for (long long j = 0; j < b.cols(); ++j) r.at(i, a.cols() + j) = b.at(i, j);
    }
    return r;
}

inline IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.cols()) throw malformed_input("vstack column mismatch");
    IntMatrix r(a.rows() + b.rows(), a.cols());
    for (long long j = 0; j < a.cols(); ++j) {
        for (long long i = 0; i < a.rows(); ++i) r.at(i, j) = a.at(i, j);
        for (long long i = 0; i < b.rows(); ++i) r.at(a.rows() + i, j) = b.at(i, j);
    }
    return r;
}

inline std::vector<Int> mat_vec(const IntMatrix& a, const std::vector<Int>& x) {
    if (static_cast<long long>(x.size()) != a.cols()) throw malformed_input("mat_vec shape mismatch");
    std::vector<Int> r(static_cast<size_t>(a.rows()));
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j) r[static_cast<size_t>(i)] += a.at(i, j) * x[static_cast<size_t>(j)];
    return r;
}

/// Smith decomposition U*A*V = D with U, V unimodular and D diagonal,
/// d1 | d2 | ... (nonnegative, zeros trailing). U and V are not canonical;
/// only the defining equations are contractual.
struct SmithForm {
    IntMatrix U, D, V;
    std::vector<Int> diagonal;  // all min(rows, cols) diagonal entries of D

    long long rank() const {
        long long r = 0;
        for (const Int& d : diagonal)
            if (d != 0) ++r;
        return r;
    }
};

namespace detail {

// row_i += c * row_k, applied to both the working matrix and U.
inline void row_axpy(IntMatrix& m, long long i, long long k, const Int& c) {
    for (long long j = 0; j < m.cols(); ++j) m.at(i, j) += c * m.at(k, j);
}
inline void col_axpy(IntMatrix& m, long long j, long long k, const Int& c) {
    for (long long i = 0; i < m.rows(); ++i) m.at(i, j) += c * m.at(i, k);
}
inline void row_swap(IntMatrix& m, long long i, long long k) {
    for (long long j = 0; j < m.cols(); ++j) std::swap(m.at(i, j), m.at(k, j));
}
inline void col_swap(IntMatrix& m, long long j, long long k) {
    for (long long i = 0; i < m.rows(); ++i) std::swap(m.at(i, j), m.at(i, k));
}
inline void row_negate(IntMatrix& m, long long i) {
    for (long long j = 0; j < m.cols(); ++j) m.at(i, j) = -m.at(i, j);
}

// Unimodular row mix sending (pivot, other) rows to (gcd combination, cleared).
// [p q; -b/g a/g] has determinant +1.
inline void row_gcd_mix(IntMatrix& d, IntMatrix& u, long long t, long long i) {
    Int a = d.at(t, t), b = d.at(i, t);
    auto [g, p, q] = xgcd(a, b);
    Int ar = a / g, br = b / g;
    for (long long j = 0; j < d.cols(); ++j) {
        Int dt = d.at(t, j), di = d.at(i, j);
        d.at(t, j) = p * dt + q * di;
        d.at(i, j) = ar * di - br * dt;
    }
    for (long long j = 0; j < u.cols(); ++j) {
        Int ut = u.at(t, j), ui = u.at(i, j);
        u.at(t, j) = p * ut + q * ui;
        u.at(i, j) = ar * ui - br * ut;
    }
}

inline void col_gcd_mix(IntMatrix& d, IntMatrix& v, long long t, long long j) {
    Int a = d.at(t, t), b = d.at(t, j);
    auto [g, p, q] = xgcd(a, b);
    Int ar = a / g, br = b / g;
    for (long long i = 0; i < d.rows(); ++i) {
        Int dt = d.at(i, t), dj = d.at(i, j);
        d.at(i, t) = p * dt + q * dj;
        d.at(i, j) = ar * dj - br * dt;
    }
    for (long long i = 0; i < v.rows(); ++i) {
        Int vt = v.at(i, t), vj = v.at(i, j);
        v.at(i, t) = p * vt + q * vj;
        v.at(i, j) = ar * vj - br * vt;
    }
}

}  // namespace detail

/// Smith normal form over the integers. Total on every shape; pivot scan
/// order is fixed so results are deterministic.
inline SmithForm smith_normal_form(const IntMatrix& a) {
    const long long m = a.rows(), n = a.cols();
    SmithForm f{IntMatrix::identity(m), a, IntMatrix::identity(n), {}};
    IntMatrix& d = f.D;
    IntMatrix& u = f.U;
    IntMatrix& v = f.V;
    const long long steps = std::min(m, n);

    for (long long t = 0; t < steps; ++t) {
        // Smallest nonzero absolute value in the trailing block; first hit
        // in scan order wins ties.
        long long pi = -1, pj = -1;
        Int best = 0;
        for (long long i = t; i < m; ++i)
            for (long long j = t; j < n; ++j) {
                const Int& x = d.at(i, j);
                if (x == 0) continue;
                Int ax = abs_int(x);
                if (pi < 0 || ax < best) { best = ax; pi = i; pj = j; }
            }
        if (pi < 0) break;  // trailing block identically zero
        if (pi != t) { detail::row_swap(d, t, pi); detail::row_swap(u, t, pi); }
        if (pj != t) { detail::col_swap(d, t, pj); detail::col_swap(v, t, pj); }

        for (;;) {
            for (long long i = t + 1; i < m; ++i) {
                if (d.at(i, t) == 0) continue;
                if (d.at(i, t) % d.at(t, t) == 0) {
                    Int q = d.at(i, t) / d.at(t, t);
                    detail::row_axpy(d, i, t, -q);
                    detail::row_axpy(u, i, t, -q);
                } else {
                    detail::row_gcd_mix(d, u, t, i);
                }
            }
            for (long long j = t + 1; j < n; ++j) {
                if (d.at(t, j) == 0) continue;
                if (d.at(t, j) % d.at(t, t) == 0) {
                    Int q = d.at(t, j) / d.at(t, t);
                    detail::col_axpy(d, j, t, -q);
                    detail::col_axpy(v, j, t, -q);
                } else {
                    detail::col_gcd_mix(d, v, t, j);
                }
            }
            bool cleared = true;
            for (long long i = t + 1; i < m && cleared; ++i)
                if (d.at(i, t) != 0) cleared = false;
            for (long long j = t + 1; j < n && cleared; ++j)
                if (d.at(t, j) != 0) cleared = false;
            if (!cleared) continue;

            // Divisibility sweep: fold any non-multiple into the pivot row.
            long long bad_i = -1;
            for (long long i = t + 1; i < m && bad_i < 0; ++i)
                for (long long j = t + 1; j < n; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) { bad_i = i; break; }
            if (bad_i < 0) break;
            detail::row_axpy(d, t, bad_i, 1);
            detail::row_axpy(u, t, bad_i, 1);
        }
        if (d.at(t, t) < 0) { detail::row_negate(d, t); detail::row_negate(u, t); }
    }

    f.diagonal.resize(static_cast<size_t>(steps));
    for (long long i = 0; i < steps; ++i) f.diagonal[static_cast<size_t>(i)] = d.at(i, i);
    return f;
}

/// Reusable Smith factorization of a coefficient matrix, for solving many
/// right-hand sides against the same lattice.
class SolveContext {
  public:
    explicit SolveContext(IntMatrix a) : a_(std::move(a)), f_(smith_normal_form(a_)) {}

    const IntMatrix& matrix() const { return a_; }
    const SmithForm& smith() const { return f_; }

    /// Least solution in the fixed Smith coordinates of A*x = b, if any.
    std::optional<std::vector<Int>> solve(const std::vector<Int>& b) const {
        if (static_cast<long long>(b.size()) != a_.rows())
            throw malformed_input("solve: right-hand side length mismatch");
        std::vector<Int> c = mat_vec(f_.U, b);
        const long long m = a_.rows(), n = a_.cols();
        std::vector<Int> y(static_cast<size_t>(n));
        const long long steps = std::min(m, n);
        for (long long i = 0; i < m; ++i) {
            const Int& ci = c[static_cast<size_t>(i)];
            if (i < steps && f_.diagonal[static_cast<size_t>(i)] != 0) {
                const Int& di = f_.diagonal[static_cast<size_t>(i)];
                if (ci % di != 0) return std::nullopt;
                y[static_cast<size_t>(i)] = ci / di;
            } else if (ci != 0) {
                return std::nullopt;
            }
        }
        return mat_vec(f_.V, y);
    }

    bool in_span(const std::vector<Int>& b) const { return solve(b).has_value(); }

    /// True iff every column of B lies in the column span of A.
    bool columns_in_span(const IntMatrix& b) const {
        if (b.rows() != a_.rows()) throw malformed_input("columns_in_span shape mismatch");
        for (long long j = 0; j < b.cols(); ++j)
            if (!in_span(b.column(j))) return false;
        return true;
    }

  private:
    IntMatrix a_;
    SmithForm f_;
};

/// Integer solution of A*x = b, decided exactly via the Smith form.
inline std::optional<std::vector<Int>> solve_integer(const IntMatrix& a, const std::vector<Int>& b) {
    if (static_cast<long long>(b.size()) != a.rows())
        throw malformed_input("solve_integer: length of b must equal row count");
    return SolveContext(a).solve(b);
}

/// Basis of the integer null-space {x : A*x = 0}, as matrix columns.
/// Column count is cols(A) - rank(A).
inline IntMatrix kernel_basis(const IntMatrix& a) {
    SmithForm f = smith_normal_form(a);
    long long r = f.rank();
    return f.V.columns(r, a.cols() - r);
}

/// Inverse of a unimodular matrix, exactly.
inline IntMatrix unimodular_inverse(const IntMatrix& u) {
    if (u.rows() != u.cols()) throw malformed_input("unimodular_inverse: matrix not square");
    SolveContext ctx(u);
    IntMatrix inv(u.rows(), u.cols());
    std::vector<Int> e(static_cast<size_t>(u.rows()));
    for (long long j = 0; j < u.cols(); ++j) {
        e.assign(static_cast<size_t>(u.rows()), 0);
        e[static_cast<size_t>(j)] = 1;
        auto x = ctx.solve(e);
        if (!x) throw internal_error("unimodular_inverse: matrix is not invertible over the integers");
        inv.set_column(j, *x);
    }
    return inv;
}

}  // namespace lzero
