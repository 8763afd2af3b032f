#include "ltx/galois_rep.hpp"

#include <numeric>
#include <random>

#include "ltx/errors.hpp"

namespace ltx {

namespace {

// min over entries of (valuation, or precision when zero), in digits
long matrix_digits(const PMatrix& m) {
    long best = Padic::kInf;
    for (auto& x : m.a) {
        if (x.exact_zero()) continue;
        best = std::min(best, x.is_zero() ? x.prec : x.val);
    }
    if (best == Padic::kInf) return best;
    long e = m.R->e;
    return best >= 0 ? best / e : -((-best + e - 1) / e);
}

long known_digits(const PMatrix& m) {
    long pr = m.min_prec();
    return pr >= Padic::kInf ? Padic::kInf : pr / m.R->e;
}

// r x r matrices over F_q, entries as coordinate vectors
using FMat = std::vector<std::vector<std::vector<long>>>;

FMat fm_zero(const fp::Field& F, int r) { return FMat(r, std::vector<std::vector<long>>(r, F.zero())); }

FMat fm_identity(const fp::Field& F, int r) {
    FMat m = fm_zero(F, r);
    for (int i = 0; i < r; ++i) m[i][i] = F.one();
    return m;
}

FMat fm_mul(const fp::Field& F, const FMat& a, const FMat& b) {
    int r = static_cast<int>(a.size());
    FMat c = fm_zero(F, r);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < r; ++k) {
            if (F.is_zero(a[i][k])) continue;
            for (int j = 0; j < r; ++j) c[i][j] = F.add(c[i][j], F.mul(a[i][k], b[k][j]));
        }
    return c;
}

FMat fm_add(const fp::Field& F, FMat a, const FMat& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) a[i][j] = F.add(a[i][j], b[i][j]);
    return a;
}

FMat fm_frob(const fp::Field& F, FMat a) {
    for (auto& row : a)
        for (auto& x : row) x = F.apply_frob(x);
    return a;
}

bool fm_invertible(const fp::Field& F, FMat a) {
    int r = static_cast<int>(a.size());
    for (int c = 0; c < r; ++c) {
        int piv = -1;
        for (int i = c; i < r; ++i)
            if (!F.is_zero(a[i][c])) {
                piv = i;
                break;
            }
        if (piv < 0) return false;
        std::swap(a[c], a[piv]);
        auto inv = *F.inv(a[c][c]);
        for (int i = c + 1; i < r; ++i) {
            if (F.is_zero(a[i][c])) continue;
            auto f = F.mul(a[i][c], inv);
            for (int j = c; j < r; ++j) a[i][j] = F.sub(a[i][j], F.mul(f, a[c][j]));
        }
    }
    return true;
}

std::vector<long> random_element(const fp::Field& F, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(0, F.p - 1);
    std::vector<long> v(F.k);
    for (auto& x : v) x = dist(rng);
    return v;
}

// sum_{i<k} ubar^i C^(p^i) with C random; det != 0
FMat residue_solution(const fp::Field& F, const FMat& ubar, bool commuting, std::mt19937_64& rng, long& retries,
                      bool& ok) {
    int r = static_cast<int>(ubar.size());
    for (int attempt = 0; attempt < 64; ++attempt) {
        FMat C = fm_zero(F, r);
        if (commuting) {
            FMat P = fm_identity(F, r);
            for (int j = 0; j < r; ++j) {
                auto c = random_element(F, rng);
                for (int a = 0; a < r; ++a)
                    for (int b = 0; b < r; ++b) C[a][b] = F.add(C[a][b], F.mul(c, P[a][b]));
                P = fm_mul(F, P, ubar);
            }
        } else {
            for (auto& row : C)
                for (auto& x : row) x = random_element(F, rng);
        }
        FMat T = fm_zero(F, r), P = fm_identity(F, r), Ci = C;
        for (int i = 0; i < F.k; ++i) {
            T = fm_add(F, T, fm_mul(F, P, Ci));
            P = fm_mul(F, P, ubar);
            Ci = fm_frob(F, Ci);
        }
        if (fm_invertible(F, T)) {
            ok = true;
            return T;
        }
        ++retries;
    }
    ok = false;
    return {};
}

struct Attempt {
    PMatrix T;
    bool obstructed = false;
    bool exhausted = false;
};

Attempt solve_in_degree(const UnramifiedRep& rep, int k, long target, bool commuting, std::mt19937_64& rng,
                        long& retries) {
    Attempt out;
    RingPtr S = unramified_ring(rep.p, k);
    const fp::Field& F = S->residue;
    long p = rep.p, N = rep.N;
    int r = rep.r;

    FMat ubar = fm_zero(F, r);
    fp::Mat ur = residue_matrix(rep.u);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) ubar[i][j] = F.canon(fp::Poly{ur[i][j]});

    bool ok = false;
    FMat Tbar = residue_solution(F, ubar, commuting, rng, retries, ok);
    if (!ok) {
        out.exhausted = true;
        return out;
    }
    PMatrix T(S, r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) T(i, j) = lift_residue(S, Tbar[i][j], N);

    PMatrix uS = embed(rep.u, S);
    PMatrix I = PMatrix::identity(S, r, N);
    fp::Mat L = F.frob;
    for (int i = 0; i < F.k; ++i)
        for (int j = 0; j < F.k; ++j) L[i][j] = fp::mod((i == j ? 1 : 0) - L[i][j], p);

    for (long n = 1; n < target; ++n) {
        PMatrix D = inverse(T) * uS * frobenius(T) - I;
        if (!congruent(D, PMatrix(S, r, r), n))
            throw std::logic_error("twist lift lost its congruence at level " + std::to_string(n));
        PMatrix Delta(S, r, r);
        bool any = false;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                auto e = residue(D(i, j).mul_p_power(-n));
                if (F.is_zero(e)) {
                    Delta(i, j) = Padic::integer(S, 0, N);
                    continue;
                }
                auto d = fp::mat_solve(L, e, p);
                if (!d) {
                    out.obstructed = true;
                    return out;
                }
                Delta(i, j) = lift_residue(S, *d, N);
                any = true;
            }
        if (any) T = T + Padic::integer(S, rep.p, N).pow(n) * (T * Delta);
    }
    out.T = T.with_prec(N);
    return out;
}

}  // namespace

RingPtr unramified_ring(long p, int k) {
    return k == 1 ? make_ring(p, RingKind::base, 1) : make_ring(p, RingKind::unramified, k);
}

UnramifiedRep UnramifiedRep::make(const PMatrix& u, long N) {
    if (!u.square() || u.rows < 1) throw DimensionMismatch("u must be a non-empty square matrix");
    if (u.R->dim() != 1) throw InvalidInput("u must have entries in Z_p");
    if (N < 1) throw InvalidInput("precision must be positive");
    Padic d = det(u);
    if (d.is_zero() || d.val != 0) throw NonInvertibleU("det(u) is not a unit");
    UnramifiedRep rep;
    rep.p = u.R->p;
    rep.r = u.rows;
    rep.u = u.with_prec(N);
    rep.N = N;
    return rep;
}

UnramifiedRep UnramifiedRep::make(long p, const std::vector<std::vector<long>>& u, long N) {
    for (auto& row : u)
        if (row.size() != u.size()) throw DimensionMismatch("u must be square");
    if (u.empty()) throw DimensionMismatch("u must be non-empty");
    return make(PMatrix::from_ints(make_ring(p, RingKind::base, 1), u, N), N);
}

json UnramifiedRep::to_json() const { return {{"p", p}, {"r", r}, {"u", u.to_json()}, {"precision", N}}; }

json RepProfile::to_json() const {
    return {{"d_N", dN},   {"U_N", UN.to_json()}, {"hyp_F", hyp_F}, {"hyp_I", hyp_I},      {"hyp_T", hyp_T},
            {"mixed", mixed}, {"omega", omega},   {"d_tilde", dtilde}};
}

RepProfile rep_profile(const UnramifiedRep& rep, long dN) {
    if (dN < 1) throw InvalidInput("d_N must be at least 1");
    RepProfile out;
    out.dN = dN;
    out.UN = rep.u.pow(dN);
    PMatrix M = out.UN - PMatrix::identity(rep.u.R, rep.r, rep.N);
    Padic d = det(M);
    if (d.is_zero()) throw PrecisionExhausted("det(U_N - 1) vanishes to " + std::to_string(d.digits()) + " digits");
    out.hyp_F = true;
    out.omega = d.val;
    fp::Mat Mb = residue_matrix(M);
    out.hyp_T = true;
    for (auto& row : Mb)
        for (long x : row)
            if (x != 0) out.hyp_T = false;
    out.hyp_I = fp::mat_det(Mb, rep.p) != 0;
    out.mixed = !out.hyp_I && !out.hyp_T;
    out.dtilde = matrix_order_mod_p(rep.u);
    return out;
}

mpz_class matrix_order_mod_pn(const PMatrix& u, long n) {
    long dt = matrix_order_mod_p(u);
    PMatrix V = u.pow(dt);
    PMatrix I = PMatrix::identity(u.R, u.rows, u.ref_digits());
    mpz_class k = dt;
    for (long s = 0; s <= n + 2; ++s) {
        if (std::min(matrix_digits(V - I), known_digits(V)) >= n) return k;
        V = V.pow(u.R->p);
        k *= u.R->p;
    }
    throw PrecisionExhausted("order of u modulo p^" + std::to_string(n) + " not reached");
}

long twist_residual(const PMatrix& T, const PMatrix& u) {
    PMatrix uS = embed(u, T.R);
    PMatrix D = frobenius(T) - inverse(uS) * T;
    return std::min(matrix_digits(D), known_digits(T));
}

TwistSolution solve_twist_matrix(const UnramifiedRep& rep, const TwistOptions& opt) {
    if (opt.min_degree < 1) throw InvalidInput("min_degree must be positive");
    long p = rep.p, N = rep.N;
    long dt = matrix_order_mod_p(rep.u);
    long k0 = std::lcm(dt, opt.min_degree);
    if (k0 > opt.max_degree)
        throw DegreeBudgetExceeded("base degree " + std::to_string(k0) + " exceeds " + std::to_string(opt.max_degree));

    // phi^k(T) = u^-k T forces u^k = 1 mod p^N; find the least admissible k = k0 p^s
    PMatrix I = PMatrix::identity(rep.u.R, rep.r, N);
    PMatrix V = rep.u.pow(k0);
    long k = k0, target = 0;
    for (;;) {
        long reach = std::min(N, matrix_digits(V - I));
        if (reach >= N) {
            target = N;
            break;
        }
        if (k * p > opt.max_degree) {
            if (!opt.allow_partial) {
                mpz_class need = k;
                PMatrix W = V;
                for (long s = 0; s <= N + 2 && std::min(N, matrix_digits(W - I)) < N; ++s) {
                    W = W.pow(p);
                    need *= p;
                }
                throw DegreeBudgetExceeded("u^k = 1 mod p^" + std::to_string(N) + " needs k = " + need.get_str() +
                                           " > " + std::to_string(opt.max_degree));
            }
            target = reach;
            break;
        }
        V = V.pow(p);
        k *= p;
    }

    std::mt19937_64 rng(opt.seed);
    TwistSolution out;
    out.seed = opt.seed;
    for (;;) {
        Attempt a = solve_in_degree(rep, static_cast<int>(k), target, opt.commuting, rng, out.retries);
        if (!a.obstructed && !a.exhausted) {
            out.ring = unramified_ring(p, static_cast<int>(k));
            out.T = a.T;
            break;
        }
        if (k * p > opt.max_degree) {
            if (a.exhausted) throw RandomnessExhausted("no invertible residue solution in degree " + std::to_string(k));
            throw DegreeBudgetExceeded("Artin-Schreier obstruction in degree " + std::to_string(k));
        }
        k *= p;
    }
    out.k_final = k;
    out.residual_valuation = std::min(N, twist_residual(out.T, rep.u));
    out.complete = out.residual_valuation >= N;
    if (!out.complete && !opt.allow_partial)
        throw DegreeBudgetExceeded("twist reached only " + std::to_string(out.residual_valuation) + " digits");
    return out;
}

json TwistSolution::to_json() const {
    return {{"ring", ring ? ring->to_json() : json(nullptr)},
            {"T", T.to_json()},
            {"residual_valuation", residual_valuation},
            {"k_final", k_final},
            {"retries", retries},
            {"complete", complete},
            {"seed", seed}};
}

long frobenius_fixed_digits(const PMatrix& M) {
    return std::min(matrix_digits(frobenius(M) - M), known_digits(M));
}

PMatrix descend_to_base(const PMatrix& M) {
    RingPtr B = make_ring(M.R->p, RingKind::base, 1);
    PMatrix out(B, M.rows, M.cols);
    for (std::size_t i = 0; i < M.a.size(); ++i) {
        const Padic& x = M.a[i];
        if (x.exact_zero()) continue;
        out.a[i] = Padic::from_coeffs(B, {x.c[0]}, x.shift, x.prec / M.R->e);
    }
    return out;
}

AuditReport twist_det_class(const UnramifiedRep& rep, int runs, const TwistOptions& opt) {
    if (runs < 2) throw InvalidInput("twist_det_class needs at least two runs");
    AuditReport rpt;
    rpt.identity = "twist_det_class";
    rpt.formula = "T' = T S with S in GL_r(Z_p): T^-1 T' Frobenius-fixed, det(T)/det(T') a unit of Z_p";
    std::vector<TwistSolution> sols;
    for (int i = 0; i < runs; ++i) {
        TwistOptions o = opt;
        o.seed = opt.seed + static_cast<std::uint64_t>(i);
        sols.push_back(solve_twist_matrix(rep, o));
    }
    rpt.precision = rep.N;
    rpt.witness = {{"seeds", json::array()}, {"k_final", sols[0].k_final}};
    for (auto& s : sols) rpt.witness["seeds"].push_back(s.seed);
    for (int i = 1; i < runs; ++i) {
        const auto &a = sols[0], &b = sols[i];
        std::string tag = "seed " + std::to_string(a.seed) + " vs " + std::to_string(b.seed);
        if (a.ring != b.ring) {
            rpt.add(tag + ": common ring", false, {{"k", {a.k_final, b.k_final}}});
            continue;
        }
        long n = std::min(a.residual_valuation, b.residual_valuation);
        PMatrix S = inverse(a.T) * b.T;
        long fixed = std::min(n, frobenius_fixed_digits(S));
        rpt.add(tag + ": T^-1 T' Frobenius-fixed", fixed >= n, {{"digits", fixed}}, n);
        Padic ratio = det(a.T) / det(b.T);
        bool unit = !ratio.is_zero() && ratio.val == 0;
        Padic dr = frobenius(ratio) - ratio;
        long rd = std::min(n, dr.is_zero() ? dr.prec : dr.val);
        rpt.add(tag + ": det ratio unit", unit, {{"valuation", ratio.is_zero() ? json(nullptr) : json(ratio.val)}}, n);
        rpt.add(tag + ": det ratio Frobenius-fixed", rd >= n, {{"digits", rd}}, n);
    }
    return rpt;
}

EpsilonMatrix epsilon_from_twist(const UnramifiedRep& rep, const TwistSolution& tw) {
    EpsilonMatrix out;
    out.twist = tw;
    out.eps = inverse(tw.T);
    PMatrix lhs = frobenius(inverse(out.eps)) * out.eps;
    PMatrix rhs = inverse(embed(rep.u, tw.ring));
    out.identity_digits = std::min({rep.N, matrix_digits(lhs - rhs), known_digits(lhs)});
    return out;
}

EpsilonMatrix epsilon_matrix(const UnramifiedRep& rep, const TwistOptions& opt) {
    return epsilon_from_twist(rep, solve_twist_matrix(rep, opt));
}

}  // namespace ltx
