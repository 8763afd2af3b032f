#pragma once
// Exact arithmetic in Q(zeta_n), characters of finite abelian groups, Gauss sums.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "ltx/padic.hpp"
#include "ltx/report.hpp"

namespace ltx {

// element of Q(zeta_n) in the power basis of Q[x]/Phi_n
class CycloNumber {
public:
    long n = 1;
    std::vector<mpq_class> c{mpq_class(0)};

    CycloNumber() = default;
    static CycloNumber rational(long n, const mpq_class& q);
    static CycloNumber zeta(long n, long k);
    static const std::vector<mpz_class>& cyclotomic_poly(long n);
    static long totient(long n);

    CycloNumber lift(long m) const;  // n | m
    bool is_zero() const;
    bool is_rational() const;
    mpq_class rational_value() const;  // requires is_rational()

    CycloNumber operator-() const;
    friend CycloNumber operator+(const CycloNumber& a, const CycloNumber& b);
    friend CycloNumber operator-(const CycloNumber& a, const CycloNumber& b);
    friend CycloNumber operator*(const CycloNumber& a, const CycloNumber& b);
    friend CycloNumber operator*(const mpq_class& s, const CycloNumber& b);
    friend bool operator==(const CycloNumber& a, const CycloNumber& b);
    CycloNumber inverse() const;
    CycloNumber pow(long k) const;

    CycloNumber sigma(long j) const;  // zeta -> zeta^j, gcd(j, n) = 1
    CycloNumber conj() const { return sigma(-1); }

    json to_json() const;
    std::string str() const;
};

using GroupElement = std::vector<long>;

struct AbelianGroup {
    std::vector<long> factors;  // cyclic orders of the named generators
    std::vector<std::string> names;

    static AbelianGroup make(std::vector<long> factors, std::vector<std::string> names = {});
    long order() const;
    long exponent() const;
    std::vector<GroupElement> elements() const;
    GroupElement reduce(GroupElement g) const;
    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement neg(const GroupElement& a) const;
    json to_json() const;
};

struct Character {
    std::vector<long> exps;  // chi(g_i) = zeta_{n_i}^{exps[i]}
    // chi(g) = exp(2 pi i * angle), angle in [0, 1)
    mpq_class angle(const AbelianGroup& G, const GroupElement& g) const;
    CycloNumber value(const AbelianGroup& G, const GroupElement& g) const;
    bool trivial() const;
    Character conj(const AbelianGroup& G) const;
    json to_json() const;
};

std::vector<Character> characters_of(const AbelianGroup& G);
// sum_g chi(g) conj(chi'(g))
CycloNumber inner_sum(const AbelianGroup& G, const Character& a, const Character& b);

// H with generator images in G
struct Subgroup {
    AbelianGroup H;
    std::vector<GroupElement> images;
    std::size_t rank = 0;  // number of generators of G
    static Subgroup make(const AbelianGroup& G, AbelianGroup H, std::vector<GroupElement> images);
    GroupElement map(const GroupElement& h) const;
    long index(const AbelianGroup& G) const { return G.order() / H.order(); }
};

// <chi, Ind_H^G psi> = <chi|_H, psi>
int restriction_multiplicity(const AbelianGroup& G, const Subgroup& H, const Character& chi, const Character& psi);

struct ConductorData {
    std::vector<long> m_chi;  // by characters_of(G)
    std::vector<long> m_psi;  // by characters_of(H)
    long s_K = 0, s_L = 0, s_LK = 0;
    long d_K = 1, d_L = 1, d_LK = 1, e_LK = 1;
    std::vector<GroupElement> inertia;  // generators in G, optional
    json to_json() const;
};

// InconsistentConductorData on the first failing psi
AuditReport conductor_identity_check(const AbelianGroup& G, const Subgroup& H, const ConductorData& cond);

struct ConductorInstance {
    std::string name;
    AbelianGroup G;
    Subgroup H;
    ConductorData data;
};
// unramified, tame and weakly ramified patterns, p odd
std::vector<ConductorInstance> conductor_instances(long p);

// sum over x in F_q^* of omega(x)^j zeta_p^Tr(x), times factor, in Q(zeta_{(q-1)p})
CycloNumber gauss_sum(long p, int f, long j, const CycloNumber& factor = CycloNumber::rational(1, 1));

// zeta_n -> root_of_unity(S, n, 1)
Padic embed_local(const CycloNumber& x, RingPtr S, long digits);

}  // namespace ltx
