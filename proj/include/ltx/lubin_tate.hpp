#pragma once
// r-dimensional Lubin-Tate formal groups attached to p u^-1.

#include <memory>
#include <mutex>
#include <random>

#include "ltx/powerseries.hpp"
#include "ltx/report.hpp"

namespace ltx {

struct AxiomCertificate {
    bool integral = false;
    long min_valuation = 0;  // units; over coefficients nonzero at precision
    bool left_identity = false;
    bool right_identity = false;
    bool commutative = false;
    bool associative = false;
    bool associativity_checked = false;
    bool jacobian_identity = false;
    long guard_digits = 0;
    double seconds = 0;
    bool all() const;
    json to_json() const;
};

struct FormalGroupLaw {
    PMatrix u;
    int r = 0;
    long p = 0;
    int D = 0;
    long digits = 0;
    SeriesVec law;  // r components in 2r variables, X first
    SeriesVec log;  // r variables
    SeriesVec exp;
    AxiomCertificate cert;
    RingPtr ring() const { return u.R; }

    struct NegationCache {
        std::once_flag once;
        SeriesVec series;
    };
    std::shared_ptr<NegationCache> negation = std::make_shared<NegationCache>();
};

// f(X) = sum_{p^i <= D} p^-i u^i X^(p^i), coordinatewise powers
SeriesVec lt_logarithm(const PMatrix& u, int D, long digits);
// default degree: p^3 for r = 1, p^2 otherwise
int lt_default_degree(long p, int r);
FormalGroupLaw lt_group_law(const PMatrix& u, int D, long digits, bool check_associativity = true);
// recompute log and exp at degree Dp for point evaluation (the law keeps degree D)
void extend_point_series(FormalGroupLaw& F, int Dp);

// reversion of the logarithm; IntegralityFailure unless a * m_1! ... m_r! is integral
SeriesVec lt_exponential(const SeriesVec& log);
bool factorial_integral(const SeriesVec& exp);

// f^-1(p f(X)) with its checks; the classical comparison applies to r = 1, u = 1
struct PSeriesReport {
    SeriesVec series;
    bool linear_is_p = false;
    bool integral = false;
    bool classical_applicable = false;
    bool classical_match = false;       // equals pX + X^p through degree D
    bool congruent_to_frobenius = false;  // equals X^p mod p through degree D
    json to_json() const;
};
PSeriesReport p_series(const FormalGroupLaw& F);

// points of F(p^(r)) over a ring of padic.hpp
using FormalPoint = std::vector<Padic>;

FormalPoint point_add(const FormalGroupLaw& F, const FormalPoint& x, const FormalPoint& y);
FormalPoint point_negate(const FormalGroupLaw& F, const FormalPoint& x);
// series of Y -> F(X, Y) inverted in Y at Y = X; i(X) with F(X, i(X)) = 0
SeriesVec negation_series(const FormalGroupLaw& F);

// log and exp on F((p^n)^(r)), n in units of the point ring
FormalPoint log_point(const FormalGroupLaw& F, const FormalPoint& x, long n);
FormalPoint exp_point(const FormalGroupLaw& F, const FormalPoint& v, long n);
// least admissible level: n > e / (p - 1)
long log_threshold(long p, int e);

// F(x, y) = x + y mod p^(i+1) for sampled x, y in (p^i)^(r), i in units of S
AuditReport filtration_check(const FormalGroupLaw& F, RingPtr S, long i, int samples, std::mt19937_64& rng);

struct ThetaReport {
    SeriesVec theta;
    bool eps_relation = false;  // phi(eps^-1) eps = u^-1
    bool linear_part = false;   // = eps^-1
    bool multiplicative = false;
    bool integral = false;
    json to_json() const;
};
// theta = E(eps^-1 log X), E(z) = exp(z) - 1 coordinatewise
ThetaReport theta_series(const FormalGroupLaw& F, const PMatrix& eps, int D);

}  // namespace ltx
