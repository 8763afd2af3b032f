#pragma once
// Character-indexed elements: U_cris, epsilon_D, the E matrix and the
// weakly ramified representatives.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ltx/characters.hpp"
#include "ltx/galois_rep.hpp"

namespace ltx {

struct CharacterVector {
    AbelianGroup G;
    std::vector<Character> chars;  // characters_of(G) order
    std::vector<Padic> values;
    bool star_normalized = false;

    // zero components replaced by 1
    CharacterVector star() const;
    json to_json() const;
};

// smallest ring holding the n-th roots of unity (n = n' p^a, a <= 1)
RingPtr character_ring(long p, long n);

struct UcrisOptions {
    long dK = 1;
    long dprime = 1;   // |G/I|
    long inertia = 1;  // |I|; components with chi|_I != 1 are 1
    RingPtr ring = nullptr;  // default character_ring(p, root_order)
    long root_order = 0;     // phi(F) taken as powers of zeta_root_order; 0 means d'
};

struct UcrisParts {
    CharacterVector num, den, value;
};

// num = det(1 - phi(F)(pu)^-dK), den = det(1 - u^dK phi(F)^-1) over G = Z/d' x Z/|I|
UcrisParts ucris_vector(const UnramifiedRep& rep, const UcrisOptions& opt);

// the dK r x dK r matrices of 1 - phi and 1 - phi^* against the closed forms
AuditReport ucris_block_audit(const UnramifiedRep& rep, long dK, long dprime);

// products over chi restricting to psi, H of order d'_H inside Z/d'_G
AuditReport ucris_restriction_check(const UnramifiedRep& rep, long dK, long dG, long dH);

// components at inflated characters against the quotient vector
AuditReport ucris_quotient_check(const UnramifiedRep& rep, long dK, long dG, long dQ);

// det(u)^(-dK (s_K + m_chi)) tau_chi^-r; MissingGaussSum when a tau is absent
struct EpsD {
    CharacterVector value;
    std::vector<mpq_class> valuations;
    AuditReport audit;
};
EpsD epsD_vector(const UnramifiedRep& rep, const AbelianGroup& G, const ConductorData& cond,
                 const std::vector<std::optional<CycloNumber>>& tau);

enum class WeakCase { I, T };
const char* to_string(WeakCase c);

struct WeakOptions {
    std::uint64_t seed = 1;
    long max_degree = 0;  // 0: the least admissible degree
};

struct WeakConfig {
    long p = 0, m = 1, d = 1;
    int r = 1;
    long mt = 1;  // m mt = 1 mod d
    WeakCase kase = WeakCase::I;
    UnramifiedRep rep;
    EpsilonMatrix eps;
    Padic Atheta2;  // trace one, normal basis of the degree-dm subring
    std::uint64_t seed = 1;

    RingPtr ring() const { return eps.twist.ring; }
    json to_json() const;
};

WeakConfig make_weak_config(const UnramifiedRep& rep, long m, long d, const WeakOptions& opt = {});

struct EMatrix {
    PMatrix E;
    AuditReport audit;
};
EMatrix build_E_matrix(const WeakConfig& cfg);

// c = eps u^-1 ut^(1 - m mt) eps^-1 over Z_p; ConjugatorNotRational when not Frobenius-fixed
PMatrix weak_conjugator(const WeakConfig& cfg, long* fixed_digits = nullptr);

// the mr x mr matrix under phi(b) = beta
PMatrix script_M(const WeakConfig& cfg, const PMatrix& c, const Padic& beta);

AuditReport script_M_det_audit(const WeakConfig& cfg);

struct WeakRepresentative {
    CharacterVector value;  // over <a> x <b> = Z/p x Z/d
    AuditReport audit;
};
WeakRepresentative weak_representative(const WeakConfig& cfg);

// the full matrix with the "*" blocks taken from fill (zero when null)
PMatrix big_matrix(const WeakConfig& cfg, const PMatrix& c, const Padic& alpha, const Padic& beta,
                   std::mt19937_64* fill);

AuditReport big_matrix_det_audit(const WeakConfig& cfg, int fillings = 20);

}  // namespace ltx
