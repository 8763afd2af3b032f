#pragma once
// Dense matrices over the rings of padic.hpp.

#include <vector>

#include "ltx/padic.hpp"

namespace ltx {

struct PMatrix {
    RingPtr R = nullptr;
    int rows = 0, cols = 0;
    std::vector<Padic> a;

    PMatrix() = default;
    PMatrix(RingPtr ring, int r, int c) : R(ring), rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Padic(ring)) {}

    Padic& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Padic& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    bool square() const { return rows == cols; }

    static PMatrix identity(RingPtr R, int n, long digits);
    static PMatrix scalar(const Padic& s, int n);
    static PMatrix from_ints(RingPtr R, const std::vector<std::vector<long>>& m, long digits);
    static PMatrix from_mpz(RingPtr R, const std::vector<std::vector<mpz_class>>& m, long digits);

    PMatrix operator-() const;
    friend PMatrix operator+(const PMatrix& x, const PMatrix& y);
    friend PMatrix operator-(const PMatrix& x, const PMatrix& y);
    friend PMatrix operator*(const PMatrix& x, const PMatrix& y);
    friend PMatrix operator*(const Padic& s, const PMatrix& y);

    PMatrix transpose() const;
    PMatrix pow(long n) const;  // n < 0 uses inverse()
    PMatrix with_prec(long units) const;
    PMatrix block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const PMatrix& b);
    long min_prec() const;
    long ref_digits() const;  // digits for constants mixed with this matrix
    long min_val() const;  // over entries not zero at precision; kInf if all are
    bool is_zero() const;
    json to_json() const;
};

bool agree(const PMatrix& x, const PMatrix& y);
// every entry of x - y has valuation >= units
bool congruent(const PMatrix& x, const PMatrix& y, long units);

PMatrix frobenius(const PMatrix& m);
PMatrix frobenius_pow(const PMatrix& m, long n);
PMatrix embed(const PMatrix& m, RingPtr S);
// entrywise residue matrix over F_p (base ring)
fp::Mat residue_matrix(const PMatrix& m);

Padic det(const PMatrix& m);
Padic det_cofactor(const PMatrix& m);
Padic det_bareiss(const PMatrix& m);

// inverse when det(m) is a unit
PMatrix inverse(const PMatrix& m);
// inverse over the fraction field; PrecisionExhausted when singular at precision
PMatrix inverse_any(const PMatrix& m);

// least k >= 1 with u^k = 1 mod p, u over the base ring
long matrix_order_mod_p(const PMatrix& u);
long matrix_order_mod_p(const fp::Mat& u, long p);
// p^s * prod_{i<=r}(p^i - 1), s = r(r-1)/2: the order of GL_r(F_p)
mpz_class gl_order(long p, int r);

struct SmithProfile {
    std::vector<long> valuations;  // p-adic digits, sorted
    bool certified = true;
    long total() const;
    json to_json() const;
};

// elementary divisor valuations over Z_p (rectangular input allowed)
SmithProfile smith_valuations(const PMatrix& m);

struct QuotientStructure {
    SmithProfile divisors;  // of Z_p^r / A Z_p^r
    long omega = 0;
};
QuotientStructure finite_quotient_structure(const PMatrix& A);

struct BlockDet {
    Padic formula;    // det(1 + sum_i (-A)^i B_{n-i})
    Padic assembled;  // determinant of the nr x nr block matrix
    bool agree = false;
    PMatrix matrix;
};
// blocks B[0] = B_1, ..., B[n-1] = B_n
BlockDet block_det(const PMatrix& A, const std::vector<PMatrix>& B);

struct TateOrders {
    long h0 = 0;   // exponent of p in the order of H^0
    long hm1 = 0;  // exponent of p in the order of H^-1
};
// Tate cohomology of Z/d acting through X on M = Z_p^r / L Z_p^r (X L Z_p^r within L Z_p^r)
TateOrders tate_action(const PMatrix& X, const PMatrix& L, long d);
// M = Z_p^r / (U^d - 1), generator acting by U
TateOrders tate_cohomology_cyclic(const PMatrix& U, long d);

}  // namespace ltx
