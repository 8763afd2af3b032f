#include "ltx/plinalg.hpp"

#include <algorithm>

#include "ltx/errors.hpp"

namespace ltx {

PMatrix PMatrix::identity(RingPtr R, int n, long digits) {
    PMatrix m(R, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Padic::integer(R, i == j ? 1 : 0, digits);
    return m;
}

PMatrix PMatrix::scalar(const Padic& s, int n) {
    PMatrix m(s.R, n, n);
    long digits = s.exact_zero() ? 64 : std::max<long>(1, s.prec / s.R->e);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = i == j ? s : Padic::integer(s.R, 0, digits);
    return m;
}

PMatrix PMatrix::from_ints(RingPtr R, const std::vector<std::vector<long>>& m, long digits) {
    int r = static_cast<int>(m.size());
    int c = r ? static_cast<int>(m[0].size()) : 0;
    PMatrix x(R, r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(m[i].size()) != c) throw DimensionMismatch("ragged integer matrix");
        for (int j = 0; j < c; ++j) x(i, j) = Padic::integer(R, m[i][j], digits);
    }
    return x;
}

PMatrix PMatrix::from_mpz(RingPtr R, const std::vector<std::vector<mpz_class>>& m, long digits) {
    int r = static_cast<int>(m.size());
    int c = r ? static_cast<int>(m[0].size()) : 0;
    PMatrix x(R, r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(m[i].size()) != c) throw DimensionMismatch("ragged integer matrix");
        for (int j = 0; j < c; ++j) x(i, j) = Padic::integer(R, m[i][j], digits);
    }
    return x;
}

PMatrix PMatrix::operator-() const {
    PMatrix x = *this;
    for (auto& v : x.a) v = -v;
    return x;
}

PMatrix operator+(const PMatrix& x, const PMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("matrix sum");
    PMatrix z = x;
    for (std::size_t k = 0; k < z.a.size(); ++k) z.a[k] += y.a[k];
    return z;
}

PMatrix operator-(const PMatrix& x, const PMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("matrix difference");
    PMatrix z = x;
    for (std::size_t k = 0; k < z.a.size(); ++k) z.a[k] -= y.a[k];
    return z;
}

PMatrix operator*(const PMatrix& x, const PMatrix& y) {
    if (x.cols != y.rows) throw DimensionMismatch("matrix product");
    PMatrix z(x.R, x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < y.cols; ++j) {
            Padic s(x.R);
            for (int k = 0; k < x.cols; ++k) s += x(i, k) * y(k, j);
            z(i, j) = s;
        }
    return z;
}

PMatrix operator*(const Padic& s, const PMatrix& y) {
    PMatrix z = y;
    for (auto& v : z.a) v = s * v;
    return z;
}

PMatrix PMatrix::transpose() const {
    PMatrix t(R, cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

PMatrix PMatrix::pow(long n) const {
    if (!square()) throw DimensionMismatch("power of a non-square matrix");
    if (n < 0) return inverse_any(*this).pow(-n);
    PMatrix result = identity(R, rows, ref_digits());
    PMatrix base = *this;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : result * base;
            first = false;
        }
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

PMatrix PMatrix::with_prec(long units) const {
    PMatrix x = *this;
    for (auto& v : x.a) v = v.with_prec(units);
    return x;
}

PMatrix PMatrix::block(int r0, int c0, int nr, int nc) const {
    PMatrix b(R, nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void PMatrix::set_block(int r0, int c0, const PMatrix& b) {
    for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

long PMatrix::min_prec() const {
    long m = Padic::kInf;
    for (auto& v : a) m = std::min(m, v.prec);
    return m;
}

long PMatrix::ref_digits() const {
    long d = min_prec() / R->e + 1;
    return std::clamp<long>(d, 1, 2048);
}

long PMatrix::min_val() const {
    long m = Padic::kInf;
    for (auto& v : a)
        if (!v.is_zero()) m = std::min(m, v.val);
    return m;
}

bool PMatrix::is_zero() const {
    return std::all_of(a.begin(), a.end(), [](const Padic& v) { return v.is_zero(); });
}

json PMatrix::to_json() const {
    json rowsj = json::array();
    for (int i = 0; i < rows; ++i) {
        json row = json::array();
        for (int j = 0; j < cols; ++j) {
            const Padic& v = (*this)(i, j);
            if (R->dim() == 1) {
                row.push_back(v.coeff(0).get_str());
            } else {
                json cs = json::array();
                for (int k = 0; k < R->dim(); ++k) cs.push_back(v.coeff(k).get_str());
                row.push_back(cs);
            }
        }
        rowsj.push_back(row);
    }
    json j;
    j["ring"] = R->name();
    j["rows"] = rowsj;
    j["prec"] = mpq_class(min_prec(), R->e).get_str();
    return j;
}

bool agree(const PMatrix& x, const PMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) return false;
    for (std::size_t k = 0; k < x.a.size(); ++k)
        if (!agree(x.a[k], y.a[k])) return false;
    return true;
}

bool congruent(const PMatrix& x, const PMatrix& y, long units) {
    if (x.rows != y.rows || x.cols != y.cols) return false;
    for (std::size_t k = 0; k < x.a.size(); ++k) {
        Padic d = x.a[k] - y.a[k];
        if (d.exact_zero()) continue;
        if (d.prec < units) throw PrecisionExhausted("congruence below the known precision");
        if (!d.is_zero() && d.val < units) return false;
    }
    return true;
}

PMatrix frobenius(const PMatrix& m) {
    PMatrix x = m;
    for (auto& v : x.a) v = frobenius(v);
    return x;
}

PMatrix frobenius_pow(const PMatrix& m, long n) {
    PMatrix x = m;
    for (auto& v : x.a) v = frobenius_pow(v, n);
    return x;
}

PMatrix embed(const PMatrix& m, RingPtr S) {
    PMatrix x(S, m.rows, m.cols);
    for (std::size_t k = 0; k < m.a.size(); ++k) x.a[k] = embed(m.a[k], S);
    return x;
}

fp::Mat residue_matrix(const PMatrix& m) {
    fp::Mat r(m.rows, std::vector<long>(m.cols, 0));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r[i][j] = residue(m(i, j))[0];
    return r;
}

// ------------------------------------------------------------ determinants

namespace {

Padic cofactor_rec(const PMatrix& m, std::vector<int>& cols_left, int row) {
    int n = m.rows;
    if (row == n) return Padic::one(m.R, m.ref_digits());
    Padic acc(m.R);
    int sign = 1;
    for (std::size_t k = 0; k < cols_left.size(); ++k) {
        int c = cols_left[k];
        std::vector<int> rest = cols_left;
        rest.erase(rest.begin() + static_cast<long>(k));
        Padic term = m(row, c) * cofactor_rec(m, rest, row + 1);
        if (sign > 0)
            acc += term;
        else
            acc -= term;
        sign = -sign;
    }
    return acc;
}

}  // namespace

Padic det_cofactor(const PMatrix& m) {
    if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
    if (m.rows == 0) return Padic::one(m.R, 64);
    std::vector<int> cols(m.cols);
    for (int j = 0; j < m.cols; ++j) cols[j] = j;
    return cofactor_rec(m, cols, 0);
}

Padic det_bareiss(const PMatrix& m0) {
    if (!m0.square()) throw DimensionMismatch("determinant of a non-square matrix");
    int n = m0.rows;
    if (n == 0) return Padic::one(m0.R, 64);
    PMatrix m = m0;
    int sign = 1;
    Padic prev = Padic::one(m.R, m.ref_digits());
    for (int k = 0; k < n; ++k) {
        // pivot of minimal valuation, row-major ties
        int pi = -1, pj = -1;
        long best = Padic::kInf;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                const Padic& v = m(i, j);
                if (!v.is_zero() && v.val < best) {
                    best = v.val;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) {
            // remaining block vanishes at precision: bound the determinant via Sylvester's identity
            long lo = Padic::kInf;
            for (int i = k; i < n; ++i)
                for (int j = k; j < n; ++j) lo = std::min(lo, m(i, j).prec);
            long bound = (n - k) * lo - (n - k - 1) * (prev.is_zero() ? 0 : prev.val);
            Padic z = Padic::integer(m.R, 0, 0);
            z.prec = z.val = bound;
            return z;
        }
        if (pi != k) {
            for (int j = 0; j < n; ++j) std::swap(m(pi, j), m(k, j));
            sign = -sign;
        }
        if (pj != k) {
            for (int i = 0; i < n; ++i) std::swap(m(i, pj), m(i, k));
            sign = -sign;
        }
        const Padic piv = m(k, k);
        Padic prev_inv = k == 0 ? Padic() : prev.inv();
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Padic v = piv * m(i, j) - m(i, k) * m(k, j);
                m(i, j) = k == 0 ? v : v * prev_inv;
            }
        prev = piv;
    }
    Padic d = m(n - 1, n - 1);
    return sign > 0 ? d : -d;
}

Padic det(const PMatrix& m) {
    if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
    return m.rows <= 4 ? det_cofactor(m) : det_bareiss(m);
}

PMatrix inverse(const PMatrix& m) {
    if (!m.square()) throw DimensionMismatch("inverse of a non-square matrix");
    Padic d = det(m);
    if (d.is_zero() || d.val > 0) throw NonUnitDeterminant("determinant is not a unit");
    int n = m.rows;
    PMatrix a = m;
    PMatrix b = PMatrix::identity(m.R, n, m.ref_digits());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a(r, col).is_zero() && a(r, col).val == 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw NonUnitDeterminant("no unit pivot");
        for (int j = 0; j < n; ++j) {
            std::swap(a(piv, j), a(col, j));
            std::swap(b(piv, j), b(col, j));
        }
        Padic pinv = a(col, col).inv();
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) * pinv;
            b(col, j) = b(col, j) * pinv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            Padic f = a(r, col);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                b(r, j) -= f * b(col, j);
            }
        }
    }
    return b;
}

PMatrix inverse_any(const PMatrix& m) {
    if (!m.square()) throw DimensionMismatch("inverse of a non-square matrix");
    int n = m.rows;
    PMatrix a = m;
    PMatrix b = PMatrix::identity(m.R, n, m.ref_digits());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        long best = Padic::kInf;
        for (int r = col; r < n; ++r)
            if (!a(r, col).is_zero() && a(r, col).val < best) {
                best = a(r, col).val;
                piv = r;
            }
        if (piv < 0) throw PrecisionExhausted("matrix singular at the working precision");
        for (int j = 0; j < n; ++j) {
            std::swap(a(piv, j), a(col, j));
            std::swap(b(piv, j), b(col, j));
        }
        Padic pinv = a(col, col).inv();
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) * pinv;
            b(col, j) = b(col, j) * pinv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            Padic f = a(r, col);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                b(r, j) -= f * b(col, j);
            }
        }
    }
    return b;
}

// ------------------------------------------------------------ orders mod p

mpz_class gl_order(long p, int r) {
    mpz_class o = 1, pz = p;
    for (int i = 1; i <= r; ++i) {
        mpz_class pi;
        mpz_pow_ui(pi.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(i));
        o *= pi - 1;
    }
    mpz_class ps;
    mpz_pow_ui(ps.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(r * (r - 1) / 2));
    return o * ps;
}

long matrix_order_mod_p(const fp::Mat& u, long p) {
    std::size_t n = u.size();
    if (fp::mat_det(u, p) == 0) throw NotInvertibleModP("u is singular mod p");
    fp::Mat I = fp::mat_identity(n), x = u;
    mpz_class bound = gl_order(p, static_cast<int>(n));
    for (long k = 1;; ++k) {
        if (x == I) {
            if (!mpz_divisible_ui_p(bound.get_mpz_t(), static_cast<unsigned long>(k)))
                throw std::logic_error("order mod p does not divide |GL_r(F_p)|");
            return k;
        }
        if (mpz_class(k) > bound) throw std::logic_error("order mod p exceeds |GL_r(F_p)|");
        x = fp::mat_mul(x, u, p);
    }
}

long matrix_order_mod_p(const PMatrix& u) {
    if (!u.square()) throw DimensionMismatch("order of a non-square matrix");
    if (u.R->dim() != 1) throw InvalidInput("order mod p is computed over Z_p");
    return matrix_order_mod_p(residue_matrix(u), u.R->p);
}

// ------------------------------------------------------------ Smith form

long SmithProfile::total() const {
    long s = 0;
    for (long v : valuations) s += v;
    return s;
}

json SmithProfile::to_json() const {
    json j;
    j["valuations"] = valuations;
    j["certified"] = certified;
    return j;
}

SmithProfile smith_valuations(const PMatrix& m0) {
    if (m0.R->dim() != 1) throw InvalidInput("Smith profile is computed over Z_p");
    constexpr long kGuard = 5;
    PMatrix m = m0;
    int n = std::min(m.rows, m.cols);
    SmithProfile prof;
    for (int k = 0; k < n; ++k) {
        int pi = -1, pj = -1;
        long best = Padic::kInf;
        for (int i = k; i < m.rows; ++i)
            for (int j = k; j < m.cols; ++j) {
                const Padic& v = m(i, j);
                if (!v.is_zero() && v.val < best) {
                    best = v.val;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) throw PrecisionExhausted("Smith pivot vanishes at the working precision");
        if (best > m(pi, pj).prec - kGuard) throw PrecisionExhausted("Smith pivot within 5 digits of the precision");
        for (int j = 0; j < m.cols; ++j) std::swap(m(pi, j), m(k, j));
        for (int i = 0; i < m.rows; ++i) std::swap(m(i, pj), m(i, k));
        Padic pinv = m(k, k).inv();
        for (int i = k + 1; i < m.rows; ++i) {
            if (m(i, k).is_zero()) continue;
            Padic f = m(i, k) * pinv;
            for (int j = k; j < m.cols; ++j) m(i, j) -= f * m(k, j);
        }
        for (int j = k + 1; j < m.cols; ++j) {
            if (m(k, j).is_zero()) continue;
            Padic f = m(k, j) * pinv;
            for (int i = k; i < m.rows; ++i) m(i, j) -= f * m(i, k);
        }
        prof.valuations.push_back(best);
    }
    std::sort(prof.valuations.begin(), prof.valuations.end());
    return prof;
}

QuotientStructure finite_quotient_structure(const PMatrix& A) {
    if (!A.square()) throw DimensionMismatch("quotient by a non-square matrix");
    QuotientStructure q;
    q.divisors = smith_valuations(A);
    q.omega = q.divisors.total();
    return q;
}

// ------------------------------------------------------------ block determinant

BlockDet block_det(const PMatrix& A, const std::vector<PMatrix>& B) {
    if (B.empty()) throw DimensionMismatch("block_det needs at least one B block");
    int r = A.rows;
    if (!A.square()) throw DimensionMismatch("A must be square");
    for (auto& b : B)
        if (b.rows != r || b.cols != r || b.R != A.R) throw DimensionMismatch("B blocks must match A");
    int n = static_cast<int>(B.size());
    long digits = std::max<long>(1, std::min(A.min_prec(), B[0].min_prec()) / A.R->e);
    PMatrix I = PMatrix::identity(A.R, r, digits);
    PMatrix S = I, negA = -A, P = I;
    for (int i = 0; i < n; ++i) {
        S = S + P * B[n - 1 - i];
        P = P * negA;
    }
    BlockDet out;
    out.formula = det(S);
    PMatrix M(A.R, n * r, n * r);
    for (auto& v : M.a) v = Padic::integer(A.R, 0, digits);
    for (int k = 0; k < n; ++k) {
        M.set_block(k * r, k * r, I);
        if (k > 0) M.set_block(k * r, (k - 1) * r, A);
        M.set_block(k * r, (n - 1) * r, k == n - 1 ? I + B[k] : B[k]);
    }
    out.assembled = det(M);
    out.agree = agree(out.formula, out.assembled);
    out.matrix = M;
    return out;
}

// ------------------------------------------------------------ Tate cohomology

namespace {

// exponent of p in [Z_p^r : B Z_p^c + L Z_p^r]
long joint_index(const PMatrix& B, const PMatrix& L) {
    PMatrix J(B.R, B.rows, B.cols + L.cols);
    J.set_block(0, 0, B);
    J.set_block(0, B.cols, L);
    return smith_valuations(J).total();
}

}  // namespace

TateOrders tate_action(const PMatrix& X, const PMatrix& L, long d) {
    if (!X.square() || !L.square() || X.rows != L.rows) throw DimensionMismatch("tate_action");
    if (d < 1) throw InvalidInput("group order must be positive");
    int r = X.rows;
    Padic dl = det(L);
    if (dl.is_zero()) throw InfiniteModule("det of the relation matrix vanishes at precision");
    long omega = smith_valuations(L).total();
    long digits = X.ref_digits();
    PMatrix I = PMatrix::identity(X.R, r, digits);
    PMatrix N = I, P = I;
    for (long i = 1; i < d; ++i) {
        P = P * X;
        N = N + P;
    }
    long fixed = joint_index(X - I, L);  // log |M^g| = log |M / (g-1)M|
    long nker = joint_index(N, L);       // log |ker N| = log |M / N M|
    TateOrders t;
    t.h0 = fixed - (omega - nker);
    t.hm1 = nker - (omega - fixed);
    return t;
}

TateOrders tate_cohomology_cyclic(const PMatrix& U, long d) {
    if (!U.square()) throw DimensionMismatch("tate_cohomology_cyclic");
    long digits = U.ref_digits();
    PMatrix L = U.pow(d) - PMatrix::identity(U.R, U.rows, digits);
    return tate_action(U, L, d);
}

}  // namespace ltx
