#pragma once
// Fixed-precision elements of Z_p, Z_q = W(F_q) and Z_q[zeta_p].
//
// An element is p^shift * sum_{i<e, j<f} c[i*f+j] pi^i y^j with pi = zeta_p - 1
// and y a root of the unramified modulus. Precision and valuation are stored in
// units of 1/e, so v(p) = e units.

#include <gmpxx.h>

#include <boost/container/small_vector.hpp>
#include <json.hpp>

#include <climits>
#include <string>
#include <vector>

#include "ltx/fp.hpp"

namespace ltx {

using json = nlohmann::json;

enum class RingKind { base, unramified, cyclotomic };

struct Ring {
    long p = 0;
    RingKind kind = RingKind::base;
    int f = 1;       // residue degree
    int e = 1;       // ramification index
    long cap = 0;    // p-adic digits to which the Frobenius images are known
    std::vector<mpz_class> modulus;                  // monic, degree f
    std::vector<mpz_class> eis;                      // pi^e = -sum_j eis[j] pi^j
    std::vector<std::vector<mpz_class>> frob;        // frob[j] = phi(y^j) mod p^cap
    fp::Field residue;
    fp::Mat inv_frob;                                // x -> x^(1/p) on F_q

    int dim() const { return e * f; }
    const mpz_class& ppow(long n) const;
    std::string name() const;
    json to_json() const;

    std::vector<mpz_class> pp;  // p^0 .. p^(pp.size()-1)
};

using RingPtr = const Ring*;

bool is_prime(long n);

// Rings are interned: equal arguments give the same pointer.
RingPtr make_ring(long p, RingKind kind, int k);
RingPtr unramified_part(RingPtr R);  // Z_q inside Z_q[zeta_p]
RingPtr cyclotomic_over(RingPtr R);  // Z_q[zeta_p] over the unramified part of R

class Padic {
public:
    static constexpr long kInf = LONG_MAX / 4;
    using Coeffs = boost::container::small_vector<mpz_class, 1>;

    RingPtr R = nullptr;
    Coeffs c;          // empty: exact zero
    long shift = 0;
    long prec = kInf;  // units of 1/e
    long val = kInf;   // units; equals prec when zero at precision

    Padic() = default;
    explicit Padic(RingPtr ring) : R(ring) {}

    // constructors taking precision in p-adic digits
    static Padic zero(RingPtr R) { return Padic(R); }
    static Padic integer(RingPtr R, const mpz_class& z, long digits);
    static Padic rational(RingPtr R, const mpq_class& q, long digits);
    static Padic one(RingPtr R, long digits) { return integer(R, 1, digits); }
    static Padic uniformizer(RingPtr R, long digits);  // pi (or p when e = 1)
    static Padic generator(RingPtr R, long digits);    // y
    // raw constructor: coefficient vector of length dim(), precision in units
    static Padic from_coeffs(RingPtr R, std::vector<mpz_class> coeffs, long shift, long prec_units);

    bool exact_zero() const { return c.empty(); }
    bool is_zero() const { return c.empty() || val >= prec; }
    long digits() const;  // floor(prec / e)
    int e() const { return R->e; }

    Padic& normalize();
    Padic with_prec(long units) const;  // lower the precision to at most units
    // value p^shift * c[k] as a rational number
    mpq_class coeff(int k) const;

    Padic operator-() const;
    Padic& operator+=(const Padic& b);
    Padic& operator-=(const Padic& b);
    Padic& operator*=(const Padic& b) { return *this = *this * b; }
    friend Padic operator+(Padic a, const Padic& b) { return a += b; }
    friend Padic operator-(Padic a, const Padic& b) { return a -= b; }
    friend Padic operator*(const Padic& a, const Padic& b);
    friend Padic operator/(const Padic& a, const Padic& b);

    // this += a * b without normalizing; call normalize() afterwards (base ring only)
    void addmul_lazy(const Padic& a, const Padic& b);

    Padic inv() const;
    Padic pow(long n) const;
    Padic mul_p_power(long k) const;  // p^k * x, k may be negative

    json to_json() const;
    std::string str() const;
};

// a == b at the precision of a - b
bool agree(const Padic& a, const Padic& b);

Padic frobenius(const Padic& x);
Padic frobenius_pow(const Padic& x, long n);

struct Valuation {
    bool exact = true;
    mpq_class v;  // exact value, or the precision bound when !exact
};
Valuation valuation(const Padic& x);

// reduction mod pi for integral x, and the constant lift back
std::vector<long> residue(const Padic& x);
Padic lift_residue(RingPtr R, const std::vector<long>& r, long digits);

// the (q-1)-th root of unity above r (r = 0 gives 0)
Padic teichmuller(RingPtr R, const std::vector<long>& r, long digits);

// image of zeta_n^j under the fixed embedding zeta_n -> T(g) * (1 + pi)
// where T(g) is the Teichmuller lift of the canonical element of order n',
// n = n' p^a with a <= 1 (a = 1 requires the cyclotomic ring)
Padic root_of_unity(RingPtr R, long n, long j, long digits);

// move x into the ring S (base -> anything, Z_q -> Z_q[zeta_p] of the same f)
Padic embed(const Padic& x, RingPtr S);

}  // namespace ltx
