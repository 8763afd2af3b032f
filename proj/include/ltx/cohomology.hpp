#pragma once
// H^1 and H^2 of Z_p^r(1) twisted by the unramified representation.

#include <random>

#include "ltx/galois_rep.hpp"
#include "ltx/lubin_tate.hpp"

namespace ltx {

struct ExtensionShape {
    long m = 1;    // [K : Q_p], K unramified
    long e = 1;    // e_{N/K}
    long d = 1;    // d_{N/K}
    bool tame = true;
    long dN = 1;   // m d
    long nN = 1;   // e d m

    static ExtensionShape make(long p, long m, long e, long d);
    json to_json() const;
};

enum class TrivialityReason { tame, wild_unit, wild_nontrivial };
const char* to_string(TrivialityReason r);

struct CohomologyProfile {
    SmithProfile h2_divisors;
    long omega = 0;
    long h1_rank = 0;
    bool coh_trivial = false;
    TrivialityReason reason = TrivialityReason::tame;
    json to_json() const;
};

CohomologyProfile cohomology_profile(const UnramifiedRep& rep, const ExtensionShape& shape);

// 1 - U_N = (1 + U_K + ... + U_K^(d-1))(1 - U_K) and the Tate groups of <U_K>
AuditReport tame_triviality_audit(const UnramifiedRep& rep, const ExtensionShape& shape);

// dim Hom(Z/p, H^2) against omega
AuditReport wild_nontriviality_witness(const UnramifiedRep& rep, const ExtensionShape& shape);

// [p] is injective on sampled points of F((p)^(r)) over S
AuditReport torsion_free_check(const FormalGroupLaw& F, RingPtr S, int samples, std::mt19937_64& rng);

}  // namespace ltx
