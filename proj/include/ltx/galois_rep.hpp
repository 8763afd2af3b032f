#pragma once
// The unramified representation sending Frobenius to u, and its twist matrix.

#include <cstdint>

#include "ltx/plinalg.hpp"
#include "ltx/report.hpp"

namespace ltx {

struct UnramifiedRep {
    long p = 0;
    int r = 0;
    PMatrix u;  // over Z_p
    long N = 20;

    static UnramifiedRep make(long p, const std::vector<std::vector<long>>& u, long N);
    static UnramifiedRep make(const PMatrix& u, long N);
    json to_json() const;
};

// Z_p for k = 1, otherwise the degree-k unramified ring
RingPtr unramified_ring(long p, int k);

struct RepProfile {
    long dN = 1;
    PMatrix UN;
    bool hyp_F = false, hyp_I = false, hyp_T = false, mixed = false;
    long omega = 0;
    long dtilde = 1;
    json to_json() const;
};

RepProfile rep_profile(const UnramifiedRep& rep, long dN);

struct TwistOptions {
    std::uint64_t seed = 1;
    long max_degree = 256;
    long min_degree = 1;        // k is kept a multiple of this
    bool allow_partial = false;  // return the best precision within max_degree
    bool commuting = false;      // draw T as a polynomial in u
};

struct TwistSolution {
    RingPtr ring = nullptr;
    PMatrix T;
    long residual_valuation = 0;  // digits to which phi(T) = u^-1 T holds
    long k_final = 1;
    long retries = 0;
    bool complete = false;
    std::uint64_t seed = 0;
    json to_json() const;
};

// digits of phi(T) - u^-1 T, capped at the precision of T
long twist_residual(const PMatrix& T, const PMatrix& u);

// least k with u^k = 1 mod p^n, or 0 when it exceeds limit
mpz_class matrix_order_mod_pn(const PMatrix& u, long n);

TwistSolution solve_twist_matrix(const UnramifiedRep& rep, const TwistOptions& opt = {});

AuditReport twist_det_class(const UnramifiedRep& rep, int runs, const TwistOptions& opt = {});

struct EpsilonMatrix {
    TwistSolution twist;
    PMatrix eps;          // T^-1
    long identity_digits = 0;  // digits of phi(eps^-1) eps - u^-1
};
EpsilonMatrix epsilon_matrix(const UnramifiedRep& rep, const TwistOptions& opt = {});
EpsilonMatrix epsilon_from_twist(const UnramifiedRep& rep, const TwistSolution& tw);

// digits to which phi(M) = M holds
long frobenius_fixed_digits(const PMatrix& M);
// the Z_p-part (constant coefficient) of each entry
PMatrix descend_to_base(const PMatrix& M);

}  // namespace ltx
