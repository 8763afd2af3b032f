#include "ltx/epsilon_elements.hpp"

#include <algorithm>
#include <numeric>

#include "ltx/errors.hpp"

namespace ltx {

namespace {

long mult_order_mod(long p, long n) {
    if (n == 1) return 1;
    long x = p % n, k = 1;
    while (x != 1) {
        x = x * p % n;
        ++k;
    }
    return k;
}

long prime_to_p(long n, long p, long* a = nullptr) {
    long k = 0;
    while (n % p == 0) {
        n /= p;
        ++k;
    }
    if (a) *a = k;
    return n;
}

long inverse_mod(long m, long d) {
    if (d == 1) return 1;
    for (long t = 1; t < d; ++t)
        if (m * t % d == 1) return t;
    throw InvalidInput("m has no inverse modulo d");
}

Padic sign(RingPtr S, long e, long digits) { return Padic::integer(S, e % 2 ? -1 : 1, digits); }

PMatrix scaled(const Padic& s, const PMatrix& m) { return s * m; }

PMatrix I_of(RingPtr S, int n, long digits) { return PMatrix::identity(S, n, digits); }

PMatrix zeros(RingPtr S, int r, int c, long digits) {
    PMatrix z(S, r, c);
    for (auto& x : z.a) x = Padic::integer(S, 0, digits);
    return z;
}

// digits to which two values agree, capped by the known digits of both
long agree_digits(const Padic& a, const Padic& b) {
    Padic d = a - b;
    long units = d.is_zero() ? d.prec : d.val;
    return units >= Padic::kInf ? Padic::kInf : units / a.R->e;
}

json valuation_json(const Padic& x) {
    Valuation v = valuation(x);
    return {{"value", v.v.get_str()}, {"exact", v.exact}};
}

AbelianGroup cyclic_with_inertia(long dprime, long inertia) {
    if (inertia == 1) return AbelianGroup::make({dprime}, {"F"});
    return AbelianGroup::make({dprime, inertia}, {"F", "I"});
}

void require_hyp_F(const UnramifiedRep& rep, long dN) {
    PMatrix I = PMatrix::identity(rep.u.R, rep.r, rep.N);
    Padic d = det(rep.u.pow(dN) - I);
    if (d.is_zero()) throw HypothesisFViolated("det(u^" + std::to_string(dN) + " - 1) = 0 at precision");
}

}  // namespace

// ---------------------------------------------------------- CharacterVector

CharacterVector CharacterVector::star() const {
    CharacterVector out = *this;
    for (auto& v : out.values)
        if (v.is_zero()) v = Padic::one(v.R, std::max<long>(1, v.prec / v.R->e));
    out.star_normalized = true;
    return out;
}

json CharacterVector::to_json() const {
    json comps = json::array();
    for (std::size_t i = 0; i < values.size(); ++i)
        comps.push_back({{"character", chars[i].to_json()},
                         {"value", values[i].to_json()},
                         {"valuation", valuation_json(values[i])}});
    return {{"group", G.to_json()}, {"star_normalized", star_normalized}, {"components", comps}};
}

RingPtr character_ring(long p, long n) {
    if (n < 1) throw InvalidInput("character order must be positive");
    long a = 0, np = prime_to_p(n, p, &a);
    if (a > 1) throw IncompatibleResidueDegree("p^2 divides " + std::to_string(n));
    int k = static_cast<int>(mult_order_mod(p, np));
    return a ? make_ring(p, RingKind::cyclotomic, k) : unramified_ring(p, k);
}

// ---------------------------------------------------------------- U_cris

UcrisParts ucris_vector(const UnramifiedRep& rep, const UcrisOptions& opt) {
    if (opt.dK < 1 || opt.dprime < 1 || opt.inertia < 1) throw InvalidInput("d_K, d' and |I| must be positive");
    long root = opt.root_order ? opt.root_order : opt.dprime;
    if (root % opt.dprime) throw InvalidInput("root_order must be a multiple of d'");
    require_hyp_F(rep, opt.dK * opt.dprime);

    RingPtr S = opt.ring ? opt.ring : character_ring(rep.p, root);
    long N = rep.N;
    int r = rep.r;
    PMatrix u = embed(rep.u, S);
    PMatrix I = I_of(S, r, N);
    PMatrix uinvK = inverse(u).pow(opt.dK);
    PMatrix uK = u.pow(opt.dK);
    Padic pK = Padic::integer(S, 1, N).mul_p_power(opt.dK);

    UcrisParts out;
    AbelianGroup G = cyclic_with_inertia(opt.dprime, opt.inertia);
    auto chars = characters_of(G);
    for (CharacterVector* v : {&out.num, &out.den, &out.value}) {
        v->G = G;
        v->chars = chars;
    }
    for (auto& chi : chars) {
        bool ramified = opt.inertia > 1 && chi.exps[1] != 0;
        if (ramified) {
            out.num.values.push_back(Padic::integer(S, 0, N));
            out.den.values.push_back(Padic::integer(S, 0, N));
            continue;
        }
        Padic z = root_of_unity(S, root, chi.exps[0] * (root / opt.dprime), N);
        // det(1 - z (pu)^-dK) = p^(-r dK) det(p^dK - z u^-dK)
        Padic num = det(scaled(pK, I) - scaled(z, uinvK)).mul_p_power(-r * opt.dK);
        Padic den = det(I - scaled(z.inv(), uK));
        out.num.values.push_back(num);
        out.den.values.push_back(den);
    }
    out.num = out.num.star();
    out.den = out.den.star();
    out.value = out.num;
    for (std::size_t i = 0; i < chars.size(); ++i) out.value.values[i] = out.num.values[i] / out.den.values[i];
    return out;
}

AuditReport ucris_block_audit(const UnramifiedRep& rep, long dK, long dprime) {
    if (dK < 1 || dprime < 1) throw InvalidInput("d_K and d' must be positive");
    require_hyp_F(rep, dK * dprime);
    RingPtr S = character_ring(rep.p, dprime);
    long N = rep.N;
    int r = rep.r;
    PMatrix u = embed(rep.u, S);
    PMatrix uinv = inverse(u);
    PMatrix I = I_of(S, r, N);
    PMatrix O = zeros(S, r, r, N);
    Padic pinv = Padic::integer(S, 1, N).mul_p_power(-1);

    AuditReport out;
    out.identity = "ucris_block";
    out.formula = "det(1 - phi^*) = det(1 - F^-1 u^dK), det(1 - phi) = det(1 - F (pu)^-dK), "
                  "(1 - F^-1 u^dK)(1 + F^-1 u^dK + ... ) = 1 - U_N";
    out.precision = N;
    out.witness = {{"d_K", dK}, {"d'", dprime}};

    for (long j = 0; j < dprime; ++j) {
        std::string tag = "phi=" + std::to_string(j);
        Padic z = root_of_unity(S, dprime, j, N);
        Padic zi = z.inv();

        // 1 - phi^*: subdiagonal -u, corner -F^-1 u
        std::vector<PMatrix> B(dK, O);
        B[0] = -scaled(zi, u);
        BlockDet dual = block_det(-u, B);
        Padic closed_dual = det(I - scaled(zi, u.pow(dK)));
        out.add(tag + ": dual block formula", dual.agree,
                {{"formula", dual.formula.to_json()}, {"assembled", dual.assembled.to_json()}});
        out.add(tag + ": det(1 - F^-1 u^dK)", agree(dual.assembled, closed_dual),
                {{"assembled", dual.assembled.to_json()}, {"closed", closed_dual.to_json()}},
                agree_digits(dual.assembled, closed_dual));

        // 1 - phi: subdiagonal -(pu)^-1, corner -F (pu)^-1
        PMatrix pu_inv = scaled(pinv, uinv);
        std::vector<PMatrix> C(dK, O);
        C[0] = -scaled(z, pu_inv);
        BlockDet prim = block_det(-pu_inv, C);
        Padic closed_prim = det(I - scaled(z, pu_inv.pow(dK)));
        out.add(tag + ": block formula", prim.agree,
                {{"formula", prim.formula.to_json()}, {"assembled", prim.assembled.to_json()}});
        out.add(tag + ": det(1 - F (pu)^-dK)", agree(prim.assembled, closed_prim),
                {{"assembled", prim.assembled.to_json()}, {"closed", closed_prim.to_json()}},
                agree_digits(prim.assembled, closed_prim));

        PMatrix X = scaled(zi, u.pow(dK));
        PMatrix sum = I, P = I;
        for (long i = 1; i < dprime; ++i) {
            P = P * X;
            sum = sum + P;
        }
        PMatrix lhs = (I - X) * sum;
        PMatrix rhs = I - u.pow(dK * dprime);
        out.add(tag + ": telescope", agree(lhs, rhs), {});
        out.add(tag + ": det(1 - U_N) != 0", !det(rhs).is_zero(), {{"det", det(rhs).to_json()}});
    }
    return out;
}

AuditReport ucris_restriction_check(const UnramifiedRep& rep, long dK, long dG, long dH) {
    if (dH < 1 || dG % dH) throw InvalidInput("d'_H must divide d'_G");
    long dLK = dG / dH;
    RingPtr S = character_ring(rep.p, dG);
    UcrisParts big = ucris_vector(rep, {dK, dG, 1, S, dG});
    UcrisParts small = ucris_vector(rep, {dK * dLK, dH, 1, S, dG});

    AbelianGroup G = AbelianGroup::make({dG}, {"F_K"});
    Subgroup H = Subgroup::make(G, AbelianGroup::make({dH}, {"F_L"}), {{dLK}});

    AuditReport out;
    out.identity = "ucris_restriction";
    out.formula = "prod_{chi|_H = psi} (X - chi(F_K)) = X^d_{L/K} - psi(F_L) applied to num and den";
    out.precision = rep.N;
    out.witness = {{"d_K", dK}, {"d'_G", dG}, {"d'_H", dH}, {"d_L/K", dLK}};

    auto gchars = characters_of(G);
    auto hchars = characters_of(H.H);
    for (std::size_t j = 0; j < hchars.size(); ++j) {
        Padic pn = Padic::one(S, rep.N), pd = pn, pv = pn;
        long count = 0;
        for (std::size_t i = 0; i < gchars.size(); ++i) {
            int mult = restriction_multiplicity(G, H, gchars[i], hchars[j]);
            if (!mult) continue;
            ++count;
            pn = pn * big.num.values[i];
            pd = pd * big.den.values[i];
            pv = pv * big.value.values[i];
        }
        std::string tag = "psi=" + std::to_string(j);
        out.add(tag + ": count", count == dLK, {{"count", count}});
        out.add(tag + ": numerator", agree(pn, small.num.values[j]),
                {{"product", pn.to_json()}, {"closed", small.num.values[j].to_json()}},
                agree_digits(pn, small.num.values[j]));
        out.add(tag + ": denominator", agree(pd, small.den.values[j]),
                {{"product", pd.to_json()}, {"closed", small.den.values[j].to_json()}},
                agree_digits(pd, small.den.values[j]));
        out.add(tag + ": value", agree(pv, small.value.values[j]), {}, agree_digits(pv, small.value.values[j]));
    }
    return out;
}

AuditReport ucris_quotient_check(const UnramifiedRep& rep, long dK, long dG, long dQ) {
    if (dQ < 1 || dG % dQ) throw InvalidInput("d'_Q must divide d'_G");
    RingPtr S = character_ring(rep.p, dG);
    UcrisParts full = ucris_vector(rep, {dK, dG, 1, S, dG});
    UcrisParts quot = ucris_vector(rep, {dK, dQ, 1, S, dG});
    AbelianGroup G = AbelianGroup::make({dG});
    GroupElement h{dQ};  // generator of the kernel

    AuditReport out;
    out.identity = "ucris_quotient";
    out.formula = "q_{G/H}(u_cris,N/K)_psi = (u_cris,N/K)_infl(psi)";
    out.precision = rep.N;
    out.witness = {{"d_K", dK}, {"d'_G", dG}, {"d'_Q", dQ}};

    auto gchars = characters_of(G);
    long inflated = 0;
    for (std::size_t i = 0; i < gchars.size(); ++i)
        if (gchars[i].angle(G, h) == 0) ++inflated;
    out.add("characters trivial on H", inflated == dQ, {{"count", inflated}});
    for (long j = 0; j < dQ; ++j) {
        long i = j * (dG / dQ);
        bool trivial_on_h = gchars[i].angle(G, h) == 0;
        bool same = agree(full.value.values[i], quot.value.values[j]);
        out.add("psi=" + std::to_string(j), trivial_on_h && same, {{"inflated_index", i}},
                agree_digits(full.value.values[i], quot.value.values[j]));
    }
    return out;
}

// -------------------------------------------------------------- epsilon_D

EpsD epsD_vector(const UnramifiedRep& rep, const AbelianGroup& G, const ConductorData& cond,
                 const std::vector<std::optional<CycloNumber>>& tau) {
    auto chars = characters_of(G);
    if (cond.m_chi.size() != chars.size()) throw DimensionMismatch("one conductor exponent per character");
    if (tau.size() != chars.size()) throw MissingGaussSum("one Gauss sum per character expected");
    long n = 1;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!tau[i]) throw MissingGaussSum("no Gauss sum for character " + chars[i].to_json().dump());
        if (tau[i]->is_zero()) throw InvalidInput("Gauss sum is zero");
        n = std::lcm(n, tau[i]->n);
    }
    RingPtr S = character_ring(rep.p, n);
    long N = rep.N;
    Padic du = embed(det(rep.u), S);

    EpsD out;
    out.value.G = G;
    out.value.chars = chars;
    out.audit.identity = "eps_D";
    out.audit.formula = "det(u)^(-d_K (s_K chi(1) + m_chi)) tau(Ind chi)^-r";
    out.audit.precision = N;
    for (std::size_t i = 0; i < chars.size(); ++i) {
        long ex = -cond.d_K * (cond.s_K + cond.m_chi[i]);
        Padic t = embed_local(tau[i]->lift(n), S, N);
        Padic v = du.pow(ex) * t.pow(-rep.r);
        Valuation vt = valuation(t), vv = valuation(v);
        mpq_class expect = -rep.r * vt.v;
        out.valuations.push_back(vv.v);
        out.value.values.push_back(v);
        out.audit.add("chi=" + std::to_string(i) + ": v = -r v(tau)", vv.exact && vt.exact && vv.v == expect,
                      {{"valuation", vv.v.get_str()}, {"expected", expect.get_str()}});
    }
    out.value.star_normalized = std::none_of(out.value.values.begin(), out.value.values.end(),
                                             [](const Padic& x) { return x.is_zero(); });
    return out;
}

// ---------------------------------------------------------- weak configs

const char* to_string(WeakCase c) { return c == WeakCase::I ? "I" : "T"; }

json WeakConfig::to_json() const {
    return {{"p", p},
            {"m", m},
            {"d", d},
            {"r", r},
            {"m_tilde", mt},
            {"case", to_string(kase)},
            {"seed", seed},
            {"twist", {{"k", eps.twist.k_final}, {"residual", eps.twist.residual_valuation}, {"complete", eps.twist.complete}}},
            {"A_theta2", Atheta2.to_json()}};
}

namespace {

Padic trace_down(const Padic& z, long k, long step) {
    Padic t = z;
    for (long i = 1; i < k / step; ++i) t = t + frobenius_pow(z, i * step);
    return t;
}

Padic absolute_trace(const Padic& z, long deg) {
    Padic t = z;
    for (long i = 1; i < deg; ++i) t = t + frobenius_pow(z, i);
    return t;
}

Padic trace_one_normal(RingPtr R, long dm, long N, std::mt19937_64& rng) {
    long k = R->f;
    std::uniform_int_distribution<long> dist(0, R->p - 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<long> res(k);
        for (auto& a : res) a = dist(rng);
        Padic t = trace_down(lift_residue(R, res, N), k, dm);
        Padic tr = absolute_trace(t, dm);
        if (tr.is_zero() || tr.val != 0) continue;
        Padic A = t / tr;
        fp::Mat rows;
        for (long i = 0; i < dm; ++i) rows.push_back(residue(frobenius_pow(A, i)));
        if (static_cast<long>(fp::mat_rank(rows, R->p)) == dm) return A;
    }
    throw RandomnessExhausted("no trace-one normal basis element found");
}

PMatrix ut_power(const WeakConfig& cfg, const PMatrix& u, long e) {
    if (cfg.kase == WeakCase::I) return PMatrix::identity(u.R, cfg.r, cfg.rep.N);
    return u.pow(e);
}

}  // namespace

WeakConfig make_weak_config(const UnramifiedRep& rep, long m, long d, const WeakOptions& opt) {
    if (m < 1 || d < 1) throw InvalidInput("m and d must be positive");
    if (std::gcd(m, d) != 1) throw InvalidInput("m and d must be coprime");
    if (d % (rep.p * rep.p) == 0) throw IncompatibleResidueDegree("p^2 divides d");
    WeakConfig cfg;
    cfg.p = rep.p;
    cfg.m = m;
    cfg.d = d;
    cfg.r = rep.r;
    cfg.mt = inverse_mod(m % d, d);
    cfg.rep = rep;
    cfg.seed = opt.seed;

    RepProfile prof = rep_profile(rep, m * d);
    if (prof.hyp_I) {
        cfg.kase = WeakCase::I;
    } else if (prof.hyp_T) {
        if (!prof.hyp_F) throw HypothesisFViolated("case T needs det(U_N - 1) != 0");
        cfg.kase = WeakCase::T;
    } else {
        throw HypothesisViolated("U_N - 1 is neither invertible nor zero mod p");
    }

    TwistOptions t;
    t.seed = opt.seed;
    t.min_degree = std::lcm(m * d, mult_order_mod(rep.p, prime_to_p(d, rep.p)));
    long base = std::lcm(prof.dtilde, t.min_degree);
    t.max_degree = opt.max_degree ? opt.max_degree : base;
    t.allow_partial = true;
    t.commuting = cfg.kase == WeakCase::T;
    cfg.eps = epsilon_matrix(rep, t);

    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    cfg.Atheta2 = trace_one_normal(cfg.ring(), m * d, rep.N, rng);
    return cfg;
}

EMatrix build_E_matrix(const WeakConfig& cfg) {
    RingPtr R = cfg.ring();
    long N = cfg.rep.N, dm = cfg.d * cfg.m;
    if (cfg.Atheta2.R != R) throw InvalidInput("A theta_2 must live in the twist ring");
    Padic tr = absolute_trace(cfg.Atheta2, dm);
    if (!agree(tr, Padic::one(R, N))) throw TraceNotOne("sum of the conjugates of A theta_2 is not 1");

    PMatrix u = embed(cfg.rep.u, R);
    PMatrix uinv = inverse(u);
    PMatrix I = PMatrix::identity(R, cfg.r, N);
    EMatrix out;
    if (cfg.kase == WeakCase::I) {
        out.E = I;
    } else {
        out.E = PMatrix(R, cfg.r, cfg.r);
        for (auto& x : out.E.a) x = Padic::integer(R, 0, N);
        PMatrix P = I;
        for (long i = 0; i < dm; ++i) {
            out.E = out.E + frobenius_pow(cfg.Atheta2, i) * P;
            P = P * uinv;
        }
    }
    PMatrix ut = ut_power(cfg, u, 1);
    PMatrix T = cfg.eps.twist.T;
    long e = R->e;

    AuditReport& a = out.audit;
    a.identity = "E_matrix";
    a.formula = "E = sum_{i<dm} (A theta_2)^(phi^i) u^-i; E in GL_r(O); phi(E) = ut E = E ut mod p; "
                "phi(eps^-1 E) = u^-1 ut eps^-1 E mod p";
    a.precision = N;
    a.witness = {{"config", cfg.to_json()}, {"E", out.E.to_json()}};
    Padic dE = det(out.E);
    a.add("(a) det E is a unit", !dE.is_zero() && dE.val == 0, {{"det", dE.to_json()}});
    PMatrix phiE = frobenius(out.E);
    a.add("(b) phi(E) = ut E mod p", congruent(phiE, ut * out.E, e), {}, 1);
    a.add("(b) ut E = E ut mod p", congruent(ut * out.E, out.E * ut, e), {}, 1);
    PMatrix TE = T * out.E;
    a.add("(c) phi(eps^-1 E) = u^-1 ut eps^-1 E mod p", congruent(frobenius(TE), uinv * ut * TE, e), {}, 1);
    return out;
}

PMatrix weak_conjugator(const WeakConfig& cfg, long* fixed_digits) {
    RingPtr R = cfg.ring();
    PMatrix u = embed(cfg.rep.u, R);
    PMatrix X = inverse(u) * ut_power(cfg, u, 1 - cfg.m * cfg.mt);
    const PMatrix& T = cfg.eps.twist.T;
    PMatrix c = inverse(T) * X * T;
    long fixed = std::min(frobenius_fixed_digits(c), cfg.rep.N);
    if (fixed < 1) throw ConjugatorNotRational("eps u^-1 ut^(1 - m mt) eps^-1 is not Frobenius-fixed mod p");
    if (fixed_digits) *fixed_digits = fixed;
    return descend_to_base(c).with_prec(fixed);
}

PMatrix script_M(const WeakConfig& cfg, const PMatrix& c, const Padic& beta) {
    RingPtr S = beta.R;
    long N = cfg.rep.N;
    int r = cfg.r, m = static_cast<int>(cfg.m);
    PMatrix X = beta.pow(-cfg.mt) * embed(c, S);
    PMatrix I = I_of(S, r, N);
    PMatrix M = zeros(S, m * r, m * r, N);
    if (cfg.kase == WeakCase::I) {
        if (m == 1) return X - I;
        M.set_block(0, 0, X - I);
    } else {
        if (m == 1) return -I;
        M.set_block(r, 0, -I);
    }
    for (int k = 1; k + 1 < m; ++k) {
        M.set_block(k * r, k * r, -I);
        M.set_block((k + 1) * r, k * r, X);
    }
    int last = (m - 1) * r;
    M.set_block(0, last, X);
    for (int k = 1; k + 1 < m; ++k) M.set_block(k * r, last, -X);
    M.set_block(last, last, -I - X);
    return M;
}

namespace {

Padic script_M_closed(const WeakConfig& cfg, const PMatrix& u, const Padic& beta) {
    RingPtr S = beta.R;
    long N = cfg.rep.N, m = cfg.m;
    int r = cfg.r;
    if (cfg.kase == WeakCase::I) {
        PMatrix I = I_of(S, r, N);
        Padic d = det(scaled(beta.inv(), inverse(u).pow(m)) - I);
        return sign(S, r * (m - 1), N) * d;
    }
    Padic base = det(u).pow(m) * beta.pow(r);
    return sign(S, m * r, N) * base.pow(-cfg.mt * (m - 1));
}

}  // namespace

AuditReport script_M_det_audit(const WeakConfig& cfg) {
    long fixed = 0;
    PMatrix c = weak_conjugator(cfg, &fixed);
    RingPtr S = cfg.d % cfg.p ? cfg.ring() : cyclotomic_over(cfg.ring());
    long N = cfg.rep.N;
    PMatrix u = embed(cfg.rep.u, S);

    AuditReport out;
    out.identity = "script_M_det";
    out.formula = cfg.kase == WeakCase::I ? "det M = (-1)^(r(m-1)) det(u^-m b^-1 - 1)"
                                          : "det M = (-1)^(mr) (det(u)^m b^r)^(-mt(m-1))";
    out.precision = std::min(N, fixed);
    out.witness = {{"config", cfg.to_json()}, {"conjugator", c.to_json()}, {"fixed_digits", fixed}};
    for (long j = 0; j < cfg.d; ++j) {
        Padic beta = root_of_unity(S, cfg.d, j, N);
        Padic direct = det(script_M(cfg, c, beta));
        Padic closed = script_M_closed(cfg, u, beta);
        out.add("phi(b)=zeta_" + std::to_string(cfg.d) + "^" + std::to_string(j), agree(direct, closed),
                {{"direct", direct.to_json()}, {"closed", closed.to_json()}}, agree_digits(direct, closed));
    }
    return out;
}

namespace {

Padic weak_value(const WeakConfig& cfg, const PMatrix& u, const Padic& alpha, const Padic& beta, bool chi0) {
    RingPtr S = alpha.R;
    long N = cfg.rep.N, m = cfg.m, p = cfg.p;
    int r = cfg.r;
    PMatrix I = I_of(S, r, N);
    Padic pmr = Padic::integer(S, 1, N).mul_p_power(m * r);
    Padic ram = (alpha - Padic::one(S, N)).pow(m * r * (p - 1));
    if (cfg.kase == WeakCase::I) {
        if (chi0) return pmr;
        Padic d = det(scaled(beta.inv(), inverse(u).pow(m)) - I);
        return sign(S, r * (m - 1), N) * d * ram;
    }
    Padic du = det(u);
    if (chi0) {
        Padic den = det(scaled(beta, u.pow(m)) - I);
        if (den.is_zero()) throw HypothesisFViolated("det(u^m phi(b) - 1) = 0");
        return sign(S, r, N) * du.pow(m * cfg.mt) * beta.pow(r * cfg.mt) * pmr / den;
    }
    return sign(S, (m - 1) * r, N) * (du.pow(m) * beta.pow(r)).pow(-cfg.mt * (m - 1)) * ram;
}

}  // namespace

WeakRepresentative weak_representative(const WeakConfig& cfg) {
    RingPtr S = cyclotomic_over(cfg.ring());
    long N = cfg.rep.N;
    PMatrix u = embed(cfg.rep.u, S);
    WeakRepresentative out;
    out.value.G = AbelianGroup::make({cfg.p, cfg.d}, {"a", "b"});
    out.value.chars = characters_of(out.value.G);
    AuditReport& a = out.audit;
    a.identity = "weak_representative";
    a.formula = cfg.kase == WeakCase::I
                    ? "eps = p^(mr) at chi_0, (-1)^(r(m-1)) det(u^-m phi(b)^-1 - 1)(chi(a)-1)^(mr(p-1)) otherwise"
                    : "eps = (-1)^r det(u)^(m mt) phi(b)^(r mt) p^(rm) / det(u^m phi(b) - 1) at chi_0, "
                      "(-1)^((m-1)r)(det(u)^m phi(b)^r)^(-mt(m-1))(chi(a)-1)^(rm(p-1)) otherwise";
    a.precision = N;
    a.witness = {{"config", cfg.to_json()}};
    mpq_class mr(cfg.m * cfg.r);
    for (auto& chi : out.value.chars) {
        Padic alpha = root_of_unity(S, cfg.p, chi.exps[0], N);
        Padic beta = root_of_unity(S, cfg.d, chi.exps[1], N);
        Padic v = weak_value(cfg, u, alpha, beta, chi.exps[0] == 0);
        out.value.values.push_back(v);
        Valuation val = valuation(v);
        std::string tag = "chi=" + std::to_string(chi.exps[0]) + ",phi=" + std::to_string(chi.exps[1]);
        a.add(tag + ": nonzero", !v.is_zero(), {{"valuation", val.v.get_str()}});
        if (cfg.kase == WeakCase::I)
            a.add(tag + ": valuation m r", val.exact && val.v == mr, {{"valuation", val.v.get_str()}});
    }
    out.value.star_normalized = true;
    return out;
}

PMatrix big_matrix(const WeakConfig& cfg, const PMatrix& c, const Padic& alpha, const Padic& beta,
                   std::mt19937_64* fill) {
    RingPtr S = alpha.R;
    long N = cfg.rep.N, p = cfg.p, m = cfg.m;
    int r = cfg.r;
    int n = static_cast<int>(m) * r;
    Padic one = Padic::one(S, N);
    Padic am1 = alpha - one;
    Padic Ta = Padic::integer(S, 0, N), ap = one;
    for (long i = 0; i < p; ++i) {
        Ta = Ta + ap;
        ap = ap * alpha;
    }
    std::uniform_int_distribution<long> dist(-50, 50);
    auto star = [&](int rows, int cols) {
        PMatrix z = zeros(S, rows, cols, N);
        if (fill)
            for (auto& x : z.a) x = Padic::integer(S, dist(*fill), N);
        return z;
    };
    PMatrix In = I_of(S, n, N);
    PMatrix Mm = script_M(cfg, c, beta);

    int off = 0, size = static_cast<int>(p) * n;
    if (cfg.kase == WeakCase::T) {
        off = 2 * r;
        size += off;
    }
    PMatrix B = zeros(S, size, size, N);
    auto R_ = [&](long j) { return off + static_cast<int>(j) * n; };

    // cascade over the rm blocks R_0..R_{p-1}, C_0..C_{p-1}
    if (cfg.kase == WeakCase::I) {
        B.set_block(R_(0), R_(0), Ta * In);
    } else {
        PMatrix D = zeros(S, n, n, N);
        for (int i = r; i < n; ++i) D(i, i) = Ta;
        B.set_block(R_(0), R_(0), D);
    }
    B.set_block(R_(0), R_(1), am1 * In);
    for (long j = 1; j < p; ++j) {
        B.set_block(R_(j), R_(j), -In);
        if (j + 1 < p) B.set_block(R_(j), R_(j + 1), am1 * In);
        for (long i = 1; i < j; ++i) B.set_block(R_(j), R_(i), star(n, n));
    }
    B.set_block(R_(p - 1), R_(0), Mm);

    if (cfg.kase == WeakCase::T) {
        PMatrix u = embed(cfg.rep.u, S);
        PMatrix Ir = I_of(S, r, N);
        PMatrix umb = scaled(beta, u.pow(m));
        PMatrix sum = Ir, P = Ir;
        for (long i = 1; i < cfg.d; ++i) {
            P = P * umb;
            sum = sum + P;
        }
        B.set_block(0, 0, sum * inverse_any(u.pow(cfg.d * m) - Ir));
        B.set_block(0, r, am1 * Ir);
        B.set_block(r, r, Ir - umb);
        B.set_block(r, R_(0), Ta * Ir);
        PMatrix v = star(n, r);
        v.set_block(0, 0, umb.pow(cfg.mt));
        B.set_block(R_(0), r, v);
        for (long j = 1; j < p; ++j) B.set_block(R_(j), r, star(n, r));
    }
    return B;
}

AuditReport big_matrix_det_audit(const WeakConfig& cfg, int fillings) {
    long fixed = 0;
    PMatrix c = weak_conjugator(cfg, &fixed);
    WeakRepresentative rep = weak_representative(cfg);
    RingPtr S = rep.value.values.front().R;
    long N = cfg.rep.N;

    AuditReport out;
    out.identity = "big_matrix_det";
    out.formula = cfg.kase == WeakCase::I ? "det chi phi(frak M) = eps_{chi phi}, frak M of size pmr"
                                          : "det chi phi((w, frak M)) = eps_{chi phi}, bordered of size r(pm + 2)";
    out.precision = std::min(N, fixed);
    out.witness = {{"config", cfg.to_json()}, {"fillings", fillings}, {"fixed_digits", fixed}};
    std::mt19937_64 rng(cfg.seed * 7919 + 17);
    for (std::size_t k = 0; k < rep.value.chars.size(); ++k) {
        const Character& chi = rep.value.chars[k];
        Padic alpha = root_of_unity(S, cfg.p, chi.exps[0], N);
        Padic beta = root_of_unity(S, cfg.d, chi.exps[1], N);
        Padic d0 = det(big_matrix(cfg, c, alpha, beta, nullptr));
        const Padic& want = rep.value.values[k];
        std::string tag = "chi=" + std::to_string(chi.exps[0]) + ",phi=" + std::to_string(chi.exps[1]);
        bool same = agree(d0, want);
        bool negated = !same && agree(d0, -want);
        out.add(tag + ": det = closed form", same,
                {{"det", d0.to_json()}, {"closed", want.to_json()}, {"sign_flip", negated}},
                agree_digits(d0, want));
        bool stable = true;
        json bad;
        for (int f = 0; f < fillings && stable; ++f) {
            Padic df = det(big_matrix(cfg, c, alpha, beta, &rng));
            if (!agree(df, d0)) {
                stable = false;
                bad = {{"filling", f}, {"det", df.to_json()}};
            }
        }
        out.add(tag + ": invariant under * fillings", stable, bad);
    }
    return out;
}

}  // namespace ltx
