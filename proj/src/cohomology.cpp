#include "ltx/cohomology.hpp"

#include <algorithm>
#include <numeric>

#include "ltx/errors.hpp"

namespace ltx {

namespace {

PMatrix frob_power(const UnramifiedRep& rep, long k) { return rep.u.pow(k); }

PMatrix h2_relations(const UnramifiedRep& rep, const ExtensionShape& shape) {
    PMatrix M = frob_power(rep, shape.dN) - PMatrix::identity(rep.u.R, rep.r, rep.N);
    Padic d = det(M);
    if (d.is_zero()) throw HypothesisFViolated("det(U_N - 1) = 0 to " + std::to_string(d.digits()) + " digits");
    return M;
}

}  // namespace

ExtensionShape ExtensionShape::make(long p, long m, long e, long d) {
    if (m < 1 || e < 1 || d < 1) throw InvalidInput("m, e and d must be positive");
    ExtensionShape s;
    s.m = m;
    s.e = e;
    s.d = d;
    s.tame = std::gcd(p, e) == 1;
    s.dN = m * d;
    s.nN = e * d * m;
    return s;
}

json ExtensionShape::to_json() const {
    return {{"m", m}, {"e", e}, {"d", d}, {"tame", tame}, {"d_N", dN}, {"n_N", nN}};
}

const char* to_string(TrivialityReason r) {
    switch (r) {
        case TrivialityReason::tame: return "tame";
        case TrivialityReason::wild_unit: return "wild_unit";
        case TrivialityReason::wild_nontrivial: return "wild_nontrivial";
    }
    return "?";
}

json CohomologyProfile::to_json() const {
    return {{"h2_divisors", h2_divisors.to_json()}, {"h2_order_exponent", omega}, {"h1_rank", h1_rank},
            {"coh_trivial", coh_trivial}, {"reason", to_string(reason)}};
}

CohomologyProfile cohomology_profile(const UnramifiedRep& rep, const ExtensionShape& shape) {
    PMatrix M = h2_relations(rep, shape);
    CohomologyProfile out;
    auto q = finite_quotient_structure(M);
    out.h2_divisors = q.divisors;
    out.omega = q.omega;
    out.h1_rank = rep.r * shape.nN;
    if (shape.tame) {
        out.coh_trivial = true;
        out.reason = TrivialityReason::tame;
    } else {
        out.coh_trivial = fp::mat_det(residue_matrix(M), rep.p) != 0;
        out.reason = out.coh_trivial ? TrivialityReason::wild_unit : TrivialityReason::wild_nontrivial;
    }
    return out;
}

AuditReport tame_triviality_audit(const UnramifiedRep& rep, const ExtensionShape& shape) {
    if (!shape.tame) throw HypothesisViolated("tame audit on a wild shape");
    PMatrix M = h2_relations(rep, shape);
    AuditReport out;
    out.identity = "tame_triviality";
    out.formula = "1 - U_N = (1 + U_K + ... + U_K^(d-1))(1 - U_K); kernel of the norm is trivial";
    out.precision = rep.N;
    out.witness = {{"shape", shape.to_json()}};

    PMatrix UK = frob_power(rep, shape.m);
    PMatrix I = PMatrix::identity(rep.u.R, rep.r, rep.N);
    PMatrix norm = I, P = I;
    for (long i = 1; i < shape.d; ++i) {
        P = P * UK;
        norm = norm + P;
    }
    PMatrix lhs = -M;
    PMatrix rhs = norm * (I - UK);
    out.add("factorization", agree(lhs, rhs), {{"lhs", lhs.to_json()}, {"rhs", rhs.to_json()}}, rep.N);

    Padic d1 = det(I - UK), d2 = det(norm);
    out.add("det(1 - U_K) != 0", !d1.is_zero(), {{"det", d1.to_json()}}, rep.N);
    out.add("det(norm) != 0", !d2.is_zero(), {{"det", d2.to_json()}}, rep.N);

    TateOrders t = tate_cohomology_cyclic(UK, shape.d);
    out.add("Tate H^0 and H^-1 trivial", t.h0 == 0 && t.hm1 == 0, {{"h0", t.h0}, {"h-1", t.hm1}}, rep.N);
    return out;
}

AuditReport wild_nontriviality_witness(const UnramifiedRep& rep, const ExtensionShape& shape) {
    if (shape.tame) throw HypothesisViolated("wild witness on a tame shape");
    PMatrix M = h2_relations(rep, shape);
    auto q = finite_quotient_structure(M);
    long dim = 0;
    for (long v : q.divisors.valuations) dim += v > 0;
    bool unit = fp::mat_det(residue_matrix(M), rep.p) != 0;
    AuditReport out;
    out.identity = "wild_nontriviality";
    out.formula = "H^1(P, M) = Hom(P, M) = 0 iff M = 0";
    out.precision = rep.N;
    out.witness = {{"omega", q.omega}, {"hom_dimension", dim}, {"divisors", q.divisors.to_json()}};
    out.add("Hom(Z/p, H^2) != 0 iff omega > 0", (dim > 0) == (q.omega > 0), {{"hom_dimension", dim}}, rep.N);
    out.add("U_N - 1 invertible mod p iff H^2 = 0", unit == (q.omega == 0), {}, rep.N);
    return out;
}

AuditReport torsion_free_check(const FormalGroupLaw& F, RingPtr S, int samples, std::mt19937_64& rng) {
    AuditReport out;
    out.identity = "torsion_free";
    out.formula = "[p] injective on F((p)^(r))";
    out.precision = F.digits;
    std::uniform_int_distribution<long> dist(0, F.p - 1);
    long digits = F.digits;
    bool ok = true;
    json counter;
    for (int s = 0; s < samples && ok; ++s) {
        FormalPoint x;
        bool nonzero = false;
        for (int k = 0; k < F.r; ++k) {
            std::vector<long> res(S->f);
            for (auto& a : res) a = dist(rng);
            nonzero = nonzero || std::any_of(res.begin(), res.end(), [](long a) { return a != 0; });
            x.push_back(lift_residue(S, res, digits).mul_p_power(1).with_prec(digits * S->e));
        }
        if (!nonzero) {
            --s;
            continue;
        }
        FormalPoint y = x;
        for (long i = 1; i < F.p; ++i) y = point_add(F, y, x);
        bool zero = std::all_of(y.begin(), y.end(), [](const Padic& c) { return c.is_zero(); });
        if (zero) {
            ok = false;
            counter = {{"x", json::array()}};
            for (auto& c : x) counter["x"].push_back(c.to_json());
        }
    }
    out.add("[p] x != 0 on samples", ok, counter);
    return out;
}

}  // namespace ltx
