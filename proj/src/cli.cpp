#include "ltx/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <thread>

#include "ltx/characters.hpp"
#include "ltx/cohomology.hpp"
#include "ltx/epsilon_elements.hpp"
#include "ltx/errors.hpp"
#include "ltx/galois_rep.hpp"
#include "ltx/lubin_tate.hpp"

namespace ltx {

namespace {

constexpr long kMaxPrecision = 120;

using IMat = std::vector<std::vector<long>>;
using ZMat = std::vector<std::vector<mpz_class>>;

// exact integer oracle for det(u^k - 1)

ZMat zmat(const IMat& u) {
    ZMat z(u.size(), std::vector<mpz_class>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j) z[i][j] = u[i][j];
    return z;
}

ZMat zmul(const ZMat& a, const ZMat& b) {
    std::size_t n = a.size();
    ZMat c(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// Bareiss
mpz_class zdet(ZMat a) {
    std::size_t n = a.size();
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[s], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

mpz_class det_power_minus_one(const IMat& u, long k) {
    ZMat b = zmat(u), x = zmat(u);
    for (long i = 1; i < k; ++i) x = zmul(x, b);
    for (std::size_t i = 0; i < u.size(); ++i) x[i][i] -= 1;
    return zdet(x);
}

long vp(mpz_class x, long p) {
    long v = 0;
    while (x != 0 && x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

long vp_rational(const mpq_class& q, long p) { return vp(q.get_num(), p) - vp(q.get_den(), p); }

mpz_class random_below(std::mt19937_64& g, const mpz_class& m) {
    mpz_class x = 0;
    for (int i = 0; i < 8; ++i) {
        x <<= 60;
        x += static_cast<unsigned long>(g() >> 4);
    }
    return x % m;
}

// valuation >= level digits, known to `digits`
Padic random_element(RingPtr S, long digits, long level, std::mt19937_64& g) {
    std::vector<mpz_class> v(S->dim());
    for (auto& x : v) x = random_below(g, S->ppow(digits + 2));
    return Padic::from_coeffs(S, v, level, digits * S->e);
}

long uniform(std::mt19937_64& g, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }

// option access

long opt_long(const RunConfig& c, const char* key, long dflt) {
    auto it = c.options.find(key);
    if (it == c.options.end()) return dflt;
    if (!it->is_number_integer()) throw InvalidInput(std::string(key) + " must be an integer");
    return it->get<long>();
}

bool opt_bool(const RunConfig& c, const char* key, bool dflt) {
    auto it = c.options.find(key);
    if (it == c.options.end()) return dflt;
    if (!it->is_boolean()) throw InvalidInput(std::string(key) + " must be a boolean");
    return it->get<bool>();
}

std::string opt_str(const RunConfig& c, const char* key, const std::string& dflt) {
    auto it = c.options.find(key);
    if (it == c.options.end()) return dflt;
    if (!it->is_string()) throw InvalidInput(std::string(key) + " must be a string");
    return it->get<std::string>();
}

long positive(long v, const char* key) {
    if (v < 1) throw InvalidInput(std::string(key) + " must be positive");
    return v;
}

UnramifiedRep rep_of(const RunConfig& c) {
    if (c.u.empty()) throw InvalidInput(c.command + " needs u");
    return UnramifiedRep::make(c.p, c.u, c.N);
}

// exact zero is a hypothesis failure, a determinant below the working precision is not
void require_hyp_F(const RunConfig& c, long dN) {
    mpz_class d = det_power_minus_one(c.u, dN);
    if (d == 0) throw HypothesisFViolated("det(u^" + std::to_string(dN) + " - 1) = 0");
    if (vp(d, c.p) >= c.N)
        throw PrecisionExhausted("v_p(det(u^" + std::to_string(dN) + " - 1)) = " + std::to_string(vp(d, c.p)) +
                                 " is not below the precision " + std::to_string(c.N));
}

ExtensionShape shape_of(const RunConfig& c, long e_default) {
    long m = c.m, d = c.d;
    if (c.dN > 0 && c.dN != m * d) {
        if (m != 1 || d != 1) throw InvalidInput("d_N must equal m d");
        m = c.dN;
    }
    return ExtensionShape::make(c.p, m, c.e ? c.e : e_default, d);
}

AuditReport start(const RunConfig& c, const std::string& formula) {
    AuditReport r;
    r.identity = c.command;
    r.formula = formula;
    r.precision = c.N;
    return r;
}

// commands

AuditReport cmd_ring(const RunConfig& c) {
    std::string kind = opt_str(c, "kind", "unramified");
    RingKind k;
    if (kind == "base")
        k = RingKind::base;
    else if (kind == "unramified")
        k = RingKind::unramified;
    else if (kind == "cyclotomic")
        k = RingKind::cyclotomic;
    else
        throw InvalidInput("kind must be base, unramified or cyclotomic");
    long f = positive(opt_long(c, "f", k == RingKind::base ? 1 : 2), "f");
    RingPtr R = make_ring(c.p, k, static_cast<int>(f));
    AuditReport rpt = start(c, "Z_q = W(F_q), phi(y) = y^p mod p; Z_q[zeta_p] with pi = zeta_p - 1");
    rpt.witness = {{"ring", R->to_json()}, {"name", R->name()}};
    long N = c.N;
    Padic y = Padic::generator(R, N);
    rpt.add("phi^f(y) = y", agree(frobenius_pow(y, R->f), y));
    Padic fy = frobenius(y) - y.pow(c.p);
    rpt.add("phi(y) = y^p mod p", fy.is_zero() || fy.val >= R->e);
    std::vector<long> res(R->f, 0);
    if (R->f > 1)
        res[1] = 1;
    else
        res[0] = 2;
    mpz_class q = 1;
    for (int i = 0; i < R->f; ++i) q *= c.p;
    Padic t = teichmuller(R, res, N);
    rpt.add("Teichmuller lift is a (q-1)-th root of unity", agree(t.pow(q.get_si() - 1), Padic::one(R, N)));
    if (k == RingKind::cyclotomic) {
        Padic pi = Padic::uniformizer(R, N);
        rpt.add("(1 + pi)^p = 1", agree((Padic::one(R, N) + pi).pow(c.p), Padic::one(R, N)));
        rpt.add("v(pi) = 1/(p-1)", valuation(pi).v == mpq_class(1, c.p - 1));
    }
    return rpt;
}

FormalGroupLaw law_of(const RunConfig& c, int D, bool assoc) {
    UnramifiedRep rep = rep_of(c);
    return lt_group_law(PMatrix::from_ints(rep.u.R, c.u, 200), D, c.N, assoc);
}

AuditReport cmd_group_law(const RunConfig& c) {
    int r = static_cast<int>(c.u.size());
    int D = c.degree ? c.degree : lt_default_degree(c.p, r);
    FormalGroupLaw F = law_of(c, D, opt_bool(c, "check_associativity", true));
    AuditReport rpt = start(c, "F(X,Y) = f^-1(f(X) + f(Y)), f(X) = sum_i p^-i u^i X^(p^i)");
    const AxiomCertificate& k = F.cert;
    rpt.witness = {{"degree", D}, {"certificate", k.to_json()}};
    rpt.witness["certificate"].erase("seconds");
    rpt.add("coefficients integral", k.integral, {{"min_valuation", k.min_valuation}});
    rpt.add("F(X, 0) = X", k.left_identity);
    rpt.add("F(0, Y) = Y", k.right_identity);
    rpt.add("F(X, Y) = F(Y, X)", k.commutative);
    if (k.associativity_checked) rpt.add("F(F(X, Y), Z) = F(X, F(Y, Z))", k.associative);
    rpt.add("J_log(X) J_F(X, .)(0) = 1", k.jacobian_identity);
    return rpt;
}

AuditReport cmd_p_series(const RunConfig& c) {
    int r = static_cast<int>(c.u.size());
    int D = c.degree ? c.degree : lt_default_degree(c.p, r);
    FormalGroupLaw F = law_of(c, D, false);
    PSeriesReport ps = p_series(F);
    AuditReport rpt = start(c, "[p](X) = f^-1(p f(X))");
    rpt.witness = {{"degree", D}, {"series", ps.to_json()}};
    rpt.add("linear term p", ps.linear_is_p);
    rpt.add("coefficients integral", ps.integral);
    rpt.add("[p](X) = X^p mod p", ps.congruent_to_frobenius);
    if (ps.classical_applicable) rpt.add("[p](X) = pX + X^p", ps.classical_match);
    return rpt;
}

AuditReport cmd_log_exp(const RunConfig& c) {
    int D = c.degree ? c.degree : 9;
    int Dp = static_cast<int>(positive(opt_long(c, "point_degree", 27), "point_degree"));
    long samples = opt_long(c, "samples", 50);
    long f = positive(opt_long(c, "f", 1), "f");
    long want = opt_long(c, "min_digits", 10);
    FormalGroupLaw F = law_of(c, D, false);
    if (Dp > D) extend_point_series(F, Dp);
    RingPtr S = unramified_ring(c.p, static_cast<int>(f));
    std::mt19937_64 g(c.seed);
    int r = F.r;
    auto point = [&] {
        FormalPoint x;
        for (int k = 0; k < r; ++k) x.push_back(random_element(S, c.N, 1, g));
        return x;
    };
    auto same = [](const FormalPoint& a, const FormalPoint& b) {
        for (std::size_t k = 0; k < a.size(); ++k)
            if (!agree(a[k], b[k])) return false;
        return true;
    };
    auto certified = [](const FormalPoint& a) {
        long m = Padic::kInf;
        for (auto& x : a) m = std::min(m, x.prec / x.R->e);
        return m;
    };
    long round_bad = 0, hom_bad = 0, least = Padic::kInf;
    for (long t = 0; t < samples; ++t) {
        FormalPoint x = point(), y = point();
        FormalPoint lx = log_point(F, x, 1), ly = log_point(F, y, 1);
        FormalPoint back = exp_point(F, lx, 1);
        if (!same(back, x)) ++round_bad;
        FormalPoint lxy = log_point(F, point_add(F, x, y), 1);
        FormalPoint sum;
        for (int k = 0; k < r; ++k) sum.push_back(lx[k] + ly[k]);
        if (!same(lxy, sum)) ++hom_bad;
        least = std::min({least, certified(back), certified(lxy)});
    }
    if (samples == 0) least = c.N;
    AuditReport rpt = start(c, "exp(log x) = x and log F(x, y) = log x + log y on F((p)^(r))");
    rpt.precision = least;
    rpt.witness = {{"samples", samples}, {"point_ring", S->name()}, {"degree", D}, {"point_degree", Dp}};
    rpt.add("exp(log x) = x", round_bad == 0, {{"failures", round_bad}});
    rpt.add("log F(x, y) = log x + log y", hom_bad == 0, {{"failures", hom_bad}});
    rpt.add("certified digits >= " + std::to_string(want), least >= want, {{"certified", least}});
    return rpt;
}

void omega_oracle(AuditReport& rpt, const RunConfig& c, long dN, long omega) {
    mpz_class d = det_power_minus_one(c.u, dN);
    long v = vp(d, c.p);
    rpt.add("omega = v_p(det(U_N - 1))", v == omega, {{"det", d.get_str()}, {"v_p", v}, {"omega", omega}});
}

AuditReport cmd_rep_info(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    long dN = c.dN ? c.dN : c.m * c.d;
    require_hyp_F(c, dN);
    RepProfile prof = rep_profile(rep, dN);
    AuditReport rpt = start(c, "U_N = u^(d_N); hypotheses F, I, T on U_N - 1");
    rpt.witness = {{"rep", rep.to_json()}, {"profile", prof.to_json()}};
    omega_oracle(rpt, c, dN, prof.omega);
    PMatrix M = prof.UN - PMatrix::identity(rep.u.R, rep.r, rep.N);
    rpt.add("omega = sum of Smith valuations", smith_valuations(M).total() == prof.omega);
    return rpt;
}

AuditReport cmd_twist(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    TwistOptions o;
    o.seed = c.seed;
    o.max_degree = positive(opt_long(c, "max_degree", 256), "max_degree");
    o.allow_partial = opt_bool(c, "allow_partial", false);
    o.commuting = opt_bool(c, "commuting", false);
    long runs = opt_long(c, "runs", 2);
    TwistSolution s = solve_twist_matrix(rep, o);
    AuditReport rpt = start(c, "phi(T) = u^-1 T with T in GL_r(W(F_q))");
    rpt.witness = s.to_json();
    rpt.add("phi(T) - u^-1 T = 0 mod p^N", s.residual_valuation >= c.N, {{"digits", s.residual_valuation}},
            s.residual_valuation);
    Padic dt = det(s.T);
    rpt.add("det(T) is a unit", !dt.is_zero() && dt.val == 0);
    if (runs >= 2) rpt.absorb(twist_det_class(rep, static_cast<int>(runs), o), "seeds");
    return rpt;
}

AuditReport cmd_h2(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    ExtensionShape shape = shape_of(c, 1);
    require_hyp_F(c, shape.dN);
    CohomologyProfile prof = cohomology_profile(rep, shape);
    AuditReport rpt = start(c, "H^2 = Z_p^r / (U_N - 1), H^1 free of rank n_N r");
    rpt.witness = {{"shape", shape.to_json()}, {"profile", prof.to_json()}, {"omega", prof.omega}};
    omega_oracle(rpt, c, shape.dN, prof.omega);
    rpt.add("length of H^2 = omega", prof.h2_divisors.total() == prof.omega);
    return rpt;
}

AuditReport cmd_audit_tame(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    ExtensionShape shape = shape_of(c, 1);
    require_hyp_F(c, shape.dN);
    AuditReport rpt = tame_triviality_audit(rep, shape);
    rpt.identity = c.command;
    return rpt;
}

AuditReport cmd_audit_wild(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    ExtensionShape shape = shape_of(c, c.p);
    require_hyp_F(c, shape.dN);
    AuditReport rpt = wild_nontriviality_witness(rep, shape);
    rpt.identity = c.command;
    omega_oracle(rpt, c, shape.dN, rpt.witness["omega"].get<long>());
    return rpt;
}

AuditReport cmd_ucris(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    UcrisOptions o;
    o.dK = positive(opt_long(c, "dK", 1), "dK");
    o.dprime = positive(opt_long(c, "dprime", 1), "dprime");
    o.inertia = positive(opt_long(c, "inertia", 1), "inertia");
    UcrisParts parts = ucris_vector(rep, o);
    AuditReport rpt = start(c, "U_cris = det(1 - phi(F)(pu)^-dK) / det(1 - u^dK phi(F)^-1), per character");
    rpt.witness = {{"num", parts.num.to_json()}, {"den", parts.den.to_json()}, {"value", parts.value.to_json()}};
    rpt.absorb(ucris_block_audit(rep, o.dK, o.dprime), "blocks");
    return rpt;
}

AuditReport cmd_ucris_funct(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    long dK = positive(opt_long(c, "dK", 1), "dK");
    long dG = positive(opt_long(c, "dG", 6), "dG");
    long dH = positive(opt_long(c, "dH", 2), "dH");
    long dQ = positive(opt_long(c, "dQ", dG / dH), "dQ");
    AuditReport rpt = start(c, "U_cris under restriction and inflation");
    rpt.witness = {{"dK", dK}, {"dG", dG}, {"dH", dH}, {"dQ", dQ}};
    rpt.absorb(ucris_restriction_check(rep, dK, dG, dH), "restriction");
    rpt.absorb(ucris_quotient_check(rep, dK, dG, dQ), "quotient");
    return rpt;
}

AuditReport cmd_gauss_sum(const RunConfig& c) {
    long f = positive(opt_long(c, "f", 1), "f");
    long q = 1;
    for (long i = 0; i < f; ++i) q *= c.p;
    AuditReport rpt = start(c, "g(chi) = sum_x chi(x) zeta_p^Tr(x) in Q(zeta_{(q-1)p})");
    rpt.precision = 0;
    rpt.witness = {{"q", q}};
    CycloNumber qq = CycloNumber::rational(1, q);
    for (long j = 1; j < q - 1; ++j) {
        CycloNumber g = gauss_sum(c.p, static_cast<int>(f), j);
        CycloNumber gbar = gauss_sum(c.p, static_cast<int>(f), q - 1 - j);
        CycloNumber sq = CycloNumber::rational(1, j % 2 ? -q : q);  // chi(-1) q
        std::string tag = "j=" + std::to_string(j) + ": ";
        rpt.add(tag + "g(chi) g(chi-bar) = chi(-1) q", g * gbar == sq, {{"g", g.str()}}, 0);
        rpt.add(tag + "g(chi) conj(g(chi)) = q", g * g.conj() == qq, {}, 0);
        if (2 * j == q - 1) rpt.add(tag + "g(chi)^2 = chi(-1) q", g * g == sq, {}, 0);
    }
    return rpt;
}

AuditReport cmd_conductor(const RunConfig& c) {
    AuditReport rpt = start(c, "conductor bookkeeping under restriction to H");
    rpt.precision = 0;
    rpt.witness = {{"instances", json::array()}};
    for (auto& inst : conductor_instances(c.p)) {
        rpt.witness["instances"].push_back(inst.name);
        rpt.absorb(conductor_identity_check(inst.G, inst.H, inst.data), inst.name);
    }
    return rpt;
}

AuditReport cmd_block_det(const RunConfig& c) {
    long count = opt_long(c, "count", 50);
    long rmax = positive(opt_long(c, "rmax", 3), "rmax"), nmax = positive(opt_long(c, "nmax", 4), "nmax");
    RingPtr R = make_ring(c.p, RingKind::base, 1);
    std::mt19937_64 g(c.seed);
    AuditReport rpt = start(c, "det of the companion-type block matrix = det(1 + sum_i (-A)^i B_(n-i))");
    rpt.witness = {{"count", count}};
    for (long t = 0; t < count; ++t) {
        int r = static_cast<int>(uniform(g, 1, rmax)), n = static_cast<int>(uniform(g, 1, nmax));
        auto random_matrix = [&] {
            PMatrix m(R, r, r);
            for (auto& v : m.a) v = random_element(R, c.N, 0, g);
            return m;
        };
        PMatrix A = random_matrix();
        std::vector<PMatrix> B;
        for (int i = 0; i < n; ++i) B.push_back(random_matrix());
        BlockDet bd = block_det(A, B);
        bool ok = bd.agree && agree(det_bareiss(bd.matrix), bd.formula);
        rpt.add("instance " + std::to_string(t) + ": formula = assembled", ok, {{"r", r}, {"n", n}},
                std::min(bd.formula.digits(), bd.assembled.digits()));
    }
    return rpt;
}

AuditReport cmd_eps_d(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    long n = c.p - 1;
    AbelianGroup G = AbelianGroup::make({n}, {"g"});
    ConductorData cond;
    cond.m_chi.assign(n, 1);
    cond.m_chi[0] = 0;
    cond.s_K = opt_long(c, "s_K", 1);
    cond.d_K = positive(opt_long(c, "dK", 1), "dK");
    std::vector<std::optional<CycloNumber>> tau(n);
    tau[0] = CycloNumber::rational(1, 1);
    for (long j = 1; j < n; ++j) tau[j] = gauss_sum(c.p, 1, j);
    EpsD e = epsD_vector(rep, G, cond, tau);
    AuditReport rpt = start(c, "epsilon_D(chi) = det(u)^(-d_K(s_K + m_chi)) tau_chi^-r");
    rpt.witness = {{"value", e.value.to_json()}, {"conductor", cond.to_json()}};
    rpt.witness["valuations"] = json::array();
    for (auto& v : e.valuations) rpt.witness["valuations"].push_back(v.get_str());
    rpt.absorb(e.audit, "components");
    for (long j = 1; j < n; ++j) {
        mpq_class s = e.valuations[j] + e.valuations[n - j];
        rpt.add("j=" + std::to_string(j) + ": v(chi) + v(chi-bar) = -r", s == -rep.r, {{"sum", s.get_str()}});
    }
    return rpt;
}

WeakConfig weak_of(const RunConfig& c) {
    UnramifiedRep rep = rep_of(c);
    WeakOptions o;
    o.seed = c.seed;
    o.max_degree = opt_long(c, "max_degree", 0);
    WeakConfig w = make_weak_config(rep, c.m, c.d, o);
    if (!c.kase.empty() && c.kase != to_string(w.kase))
        throw HypothesisViolated("case " + c.kase + " requested but u gives case " + to_string(w.kase));
    return w;
}

AuditReport cmd_e_matrix(const RunConfig& c) {
    WeakConfig w = weak_of(c);
    EMatrix E = build_E_matrix(w);
    AuditReport rpt = E.audit;
    rpt.identity = c.command;
    rpt.witness = {{"config", w.to_json()}, {"E", E.E.to_json()}, {"audit", E.audit.witness}};
    return rpt;
}

AuditReport cmd_weak_rep(const RunConfig& c) {
    WeakConfig w = weak_of(c);
    WeakRepresentative wr = weak_representative(w);
    AuditReport rpt = wr.audit;
    rpt.identity = c.command;
    rpt.witness = {{"config", w.to_json()}, {"value", wr.value.to_json()}, {"audit", wr.audit.witness}};
    return rpt;
}

AuditReport cmd_weak_audit(const RunConfig& c) {
    WeakConfig w = weak_of(c);
    long fillings = opt_long(c, "fillings", 20);
    AuditReport rpt = start(c, "weakly ramified representatives: E matrix, script M and the full determinant");
    rpt.witness = {{"config", w.to_json()}};
    rpt.absorb(build_E_matrix(w).audit, "E");
    rpt.absorb(script_M_det_audit(w), "M");
    rpt.absorb(big_matrix_det_audit(w, static_cast<int>(fillings)), "full");
    WeakRepresentative wr = weak_representative(w);
    rpt.witness["value"] = wr.value.to_json();
    rpt.absorb(wr.audit, "representative");
    return rpt;
}

AuditReport cmd_audit_all(const RunConfig& c) {
    std::vector<RunConfig> suite = c.suite.empty() ? canonical_suite(c.N) : c.suite;
    long threads = opt_long(c, "threads", 0);
    if (threads < 0) throw InvalidInput("threads must be non-negative");
    AuditReport rpt = audit_all(suite, static_cast<unsigned>(threads));
    rpt.identity = c.command;
    return rpt;
}

using Handler = std::function<AuditReport(const RunConfig&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"ring", cmd_ring},
        {"group-law", cmd_group_law},
        {"p-series", cmd_p_series},
        {"log-exp-check", cmd_log_exp},
        {"rep-info", cmd_rep_info},
        {"twist-solve", cmd_twist},
        {"h2", cmd_h2},
        {"audit-tame", cmd_audit_tame},
        {"audit-wild", cmd_audit_wild},
        {"ucris", cmd_ucris},
        {"ucris-funct", cmd_ucris_funct},
        {"gauss-sum", cmd_gauss_sum},
        {"conductor", cmd_conductor},
        {"block-det", cmd_block_det},
        {"eps-d", cmd_eps_d},
        {"e-matrix", cmd_e_matrix},
        {"weak-rep", cmd_weak_rep},
        {"weak-audit", cmd_weak_audit},
        {"audit-all", cmd_audit_all},
    };
    return h;
}

const std::set<std::string> kOptionKeys = {
    "samples", "f", "kind", "dK", "dprime", "inertia", "dG", "dH", "dQ", "s_K", "runs", "count", "fillings",
    "max_degree", "rmax", "nmax", "threads", "allow_partial", "commuting", "check_associativity", "point_degree",
    "min_digits"};

const std::set<std::string> kTopKeys = {"command", "p", "r",  "u",   "precision", "N",    "degree", "D",   "m",
                                        "d",       "e", "dN", "d_N", "case",      "seed", "out",    "suite"};

long get_int(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw InvalidInput(key + " must be an integer");
    return v.get<long>();
}

std::optional<long> find_int(const json& j, std::initializer_list<const char*> keys) {
    std::optional<long> out;
    for (const char* k : keys)
        if (j.contains(k)) {
            long v = get_int(j, k);
            if (out && *out != v) throw InvalidInput(std::string("conflicting values for ") + k);
            out = v;
        }
    return out;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (auto& [k, h] : handlers()) v.push_back(k);
        return v;
    }();
    return names;
}

long default_precision() {
    const char* s = std::getenv("LTX_PRECISION");
    if (!s || !*s) return 20;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (*end != '\0' || v < 1 || v > kMaxPrecision)
        throw InvalidInput("LTX_PRECISION must be an integer in [1, " + std::to_string(kMaxPrecision) + "]");
    return v;
}

RunConfig RunConfig::from_json(const json& j) {
    try {
        if (!j.is_object()) throw InvalidInput("config must be a JSON object");
        RunConfig c;
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!kTopKeys.count(it.key()) && !kOptionKeys.count(it.key()))
                throw InvalidInput("unknown key " + it.key());

        if (!j.contains("command") || !j["command"].is_string()) throw InvalidInput("command is required");
        c.command = j["command"].get<std::string>();
        if (!handlers().count(c.command)) throw InvalidInput("unknown command " + c.command);

        if (j.contains("p")) c.p = get_int(j, "p");
        if (c.p == 2) throw InvalidInput("p = 2 is excluded");
        if (c.p < 3 || !is_prime(c.p)) throw InvalidInput("p must be an odd prime");

        if (j.contains("u")) {
            const json& u = j["u"];
            if (!u.is_array() || u.empty()) throw InvalidInput("u must be a non-empty array of rows");
            for (auto& row : u) {
                if (!row.is_array() || row.size() != u.size()) throw InvalidInput("u must be a square matrix");
                std::vector<long> r;
                for (auto& x : row) {
                    if (!x.is_number_integer()) throw InvalidInput("entries of u must be integers");
                    r.push_back(x.get<long>());
                }
                c.u.push_back(r);
            }
            mpz_class dt = zdet(zmat(c.u));
            if (dt % c.p == 0) throw NonInvertibleU("det(u) = " + dt.get_str() + " is divisible by p");
        }
        if (j.contains("r")) {
            c.r = static_cast<int>(get_int(j, "r"));
            if (c.r < 1) throw InvalidInput("r must be positive");
            if (!c.u.empty() && static_cast<std::size_t>(c.r) != c.u.size())
                throw DimensionMismatch("r does not match the size of u");
        } else {
            c.r = static_cast<int>(c.u.size());
        }

        c.N = find_int(j, {"precision", "N"}).value_or(default_precision());
        if (c.N < 1 || c.N > kMaxPrecision)
            throw InvalidInput("precision must be in [1, " + std::to_string(kMaxPrecision) + "]");
        c.degree = static_cast<int>(find_int(j, {"degree", "D"}).value_or(0));
        if (c.degree < 0) throw InvalidInput("degree must be non-negative");
        c.m = positive(find_int(j, {"m"}).value_or(1), "m");
        c.d = positive(find_int(j, {"d"}).value_or(1), "d");
        c.e = find_int(j, {"e"}).value_or(0);
        if (c.e < 0) throw InvalidInput("e must be positive");
        c.dN = find_int(j, {"dN", "d_N"}).value_or(0);
        if (c.dN < 0) throw InvalidInput("d_N must be positive");

        if (j.contains("case")) {
            if (!j["case"].is_string()) throw InvalidInput("case must be \"I\" or \"T\"");
            c.kase = j["case"].get<std::string>();
            if (c.kase != "I" && c.kase != "T") throw InvalidInput("case must be \"I\" or \"T\"");
        }
        if (j.contains("seed")) {
            const json& s = j["seed"];
            if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
                throw InvalidInput("seed must be a non-negative integer");
            c.seed = s.get<std::uint64_t>();
        }
        if (j.contains("out")) {
            if (!j["out"].is_string()) throw InvalidInput("out must be a path");
            c.out = j["out"].get<std::string>();
        }
        for (auto& k : kOptionKeys)
            if (j.contains(k)) c.options[k] = j[k];

        if (j.contains("suite")) {
            if (c.command != "audit-all") throw InvalidInput("suite is only read by audit-all");
            if (!j["suite"].is_array()) throw InvalidInput("suite must be an array of configs");
            for (auto& s : j["suite"]) {
                json child = s;
                if (child.is_object() && !child.contains("precision") && !child.contains("N")) child["precision"] = c.N;
                RunConfig rc = from_json(child);
                if (rc.command == "audit-all") throw InvalidInput("audit-all cannot be nested");
                c.suite.push_back(std::move(rc));
            }
        }
        return c;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed config: ") + e.what());
    }
}

json RunConfig::to_json() const {
    json j;
    j["command"] = command;
    j["p"] = p;
    if (!u.empty()) {
        j["r"] = r;
        j["u"] = u;
    }
    j["precision"] = N;
    if (degree) j["degree"] = degree;
    j["m"] = m;
    j["d"] = d;
    if (e) j["e"] = e;
    if (dN) j["dN"] = dN;
    if (!kase.empty()) j["case"] = kase;
    j["seed"] = seed;
    for (auto it = options.begin(); it != options.end(); ++it) j[it.key()] = it.value();
    if (!suite.empty()) {
        j["suite"] = json::array();
        for (auto& s : suite) j["suite"].push_back(s.to_json());
    }
    return j;
}

AuditReport run(const RunConfig& cfg) {
    auto it = handlers().find(cfg.command);
    if (it == handlers().end()) throw InvalidInput("unknown command " + cfg.command);
    return it->second(cfg);
}

namespace {

std::string label(std::size_t i, const RunConfig& c) {
    std::string s = "[" + std::to_string(i) + "] " + c.command + " p=" + std::to_string(c.p);
    if (!c.u.empty()) s += " u=" + json(c.u).dump();
    return s;
}

void random_unit_u(std::mt19937_64& g, int r, long p, long bound, IMat& out) {
    do {
        out.assign(r, std::vector<long>(r));
        for (auto& row : out)
            for (auto& x : row) x = uniform(g, -bound, bound);
    } while (zdet(zmat(out)) % p == 0);
}

RunConfig make(const std::string& command, long p, IMat u, long N) {
    RunConfig c;
    c.command = command;
    c.p = p;
    c.r = static_cast<int>(u.size());
    c.u = std::move(u);
    c.N = N;
    return c;
}

}  // namespace

std::vector<SuiteGroup> canonical_groups(long N) {
    std::mt19937_64 g(20240611);
    std::vector<SuiteGroup> out;

    SuiteGroup laws{1, "group laws", {}};
    struct LawCase {
        long p;
        int r, D;
    };
    for (auto lc : {LawCase{3, 1, 27}, LawCase{3, 2, 9}, LawCase{5, 2, 10}})
        for (int t = 0; t < 5; ++t) {
            IMat u;
            random_unit_u(g, lc.r, lc.p, 20, u);
            RunConfig c = make("group-law", lc.p, u, N);
            c.degree = lc.D;
            laws.configs.push_back(c);
        }
    RunConfig ps = make("p-series", 3, {{1}}, N);
    ps.degree = 27;
    laws.configs.push_back(ps);
    out.push_back(laws);

    SuiteGroup logs{2, "log/exp round trip", {}};
    for (const IMat& u : {IMat{{1}}, IMat{{0, 1}, {1, 1}}})
        for (long f : {1, 2}) {
            RunConfig c = make("log-exp-check", 3, u, N);
            c.options["f"] = f;
            c.seed = static_cast<std::uint64_t>(10 + f);
            logs.configs.push_back(c);
        }
    out.push_back(logs);

    SuiteGroup coh{3, "cohomology", {}};
    for (int r = 1; r <= 3; ++r)
        for (long dN = 1; dN <= 3; ++dN)
            for (int t = 0; t < 20;) {
                IMat u;
                random_unit_u(g, r, 3, 12, u);
                mpz_class dt = det_power_minus_one(u, dN);
                if (dt == 0 || vp(dt, 3) >= 10) continue;
                ++t;
                RunConfig h = make("h2", 3, u, N);
                h.d = dN;
                RunConfig tame = h, wild = h;
                tame.command = "audit-tame";
                wild.command = "audit-wild";
                wild.e = 3;
                coh.configs.insert(coh.configs.end(), {h, tame, wild});
            }
    out.push_back(coh);

    SuiteGroup blocks{4, "block determinants", {}};
    RunConfig bd = make("block-det", 3, {}, N);
    bd.seed = 4;
    blocks.configs.push_back(bd);
    out.push_back(blocks);

    SuiteGroup twists{5, "twist matrices", {}};
    twists.configs.push_back(make("twist-solve", 3, {{2}}, N));
    twists.configs.push_back(make("twist-solve", 3, {{0, 1}, {1, 0}}, N));
    while (true) {
        IMat u;
        random_unit_u(g, 2, 5, 20, u);
        if (det_power_minus_one(u, 1) % 5 == 0) continue;
        twists.configs.push_back(make("twist-solve", 5, u, N));
        break;
    }
    out.push_back(twists);

    SuiteGroup ucris{6, "U_cris", {}};
    struct UCase {
        long p;
        IMat u;
    };
    for (auto& uc : {UCase{3, {{2}}}, UCase{5, {{2, 1}, {1, 1}}}, UCase{3, {{1, 1}, {1, 2}}}}) {
        for (long dK = 1; dK <= 3; ++dK) {
            RunConfig c = make("ucris", uc.p, uc.u, N);
            c.options["dK"] = dK;
            ucris.configs.push_back(c);
        }
        for (auto [dG, dH, dQ] : {std::tuple<long, long, long>{2, 1, 2}, {3, 1, 3}, {4, 2, 2}, {6, 2, 3}}) {
            RunConfig c = make("ucris-funct", uc.p, uc.u, N);
            c.options["dG"] = dG;
            c.options["dH"] = dH;
            c.options["dQ"] = dQ;
            ucris.configs.push_back(c);
        }
    }
    out.push_back(ucris);

    SuiteGroup gauss{7, "Gauss sums", {}};
    for (auto [p, f] : {std::pair<long, long>{3, 1}, {5, 1}, {7, 1}, {3, 2}}) {
        RunConfig c = make("gauss-sum", p, {}, N);
        c.options["f"] = f;
        gauss.configs.push_back(c);
    }
    out.push_back(gauss);

    SuiteGroup cond{8, "conductor bookkeeping", {}};
    cond.configs.push_back(make("conductor", 3, {}, N));
    out.push_back(cond);

    SuiteGroup weak{9, "weakly ramified determinants", {}};
    struct WCase {
        IMat u;
        long m, d;
        const char* kase;
    };
    for (auto& wc : {WCase{{{2}}, 1, 2, "T"}, WCase{{{2}}, 2, 1, "T"}, WCase{{{0, -1}, {1, 0}}, 1, 2, "I"},
                     WCase{{{2, 0}, {0, 4}}, 1, 2, "T"}}) {
        RunConfig c = make("weak-audit", 3, wc.u, N);
        c.m = wc.m;
        c.d = wc.d;
        c.kase = wc.kase;
        weak.configs.push_back(c);
    }
    out.push_back(weak);

    SuiteGroup misc{0, "other commands", {}};
    RunConfig ring = make("ring", 3, {}, N);
    ring.options["kind"] = "cyclotomic";
    ring.options["f"] = 2;
    misc.configs.push_back(ring);
    RunConfig info = make("rep-info", 3, {{4}}, N);
    misc.configs.push_back(info);
    misc.configs.push_back(make("eps-d", 5, {{2, 1}, {1, 1}}, N));
    out.push_back(misc);
    return out;
}

std::vector<RunConfig> canonical_suite(long N) {
    std::vector<RunConfig> all;
    for (auto& grp : canonical_groups(N)) all.insert(all.end(), grp.configs.begin(), grp.configs.end());
    return all;
}

AuditReport audit_all(const std::vector<RunConfig>& suite, unsigned threads) {
    std::size_t n = suite.size();
    std::vector<std::optional<AuditReport>> results(n);
    std::vector<json> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                results[i] = run(suite[i]);
            } catch (const Error& e) {
                errors[i] = {{"error", e.kind()}, {"message", e.what()}, {"exit_code", exit_code(e)}};
            } catch (const std::exception& e) {
                errors[i] = {{"error", "exception"}, {"message", e.what()}, {"exit_code", exit_code(e)}};
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    AuditReport rpt;
    rpt.identity = "audit-all";
    rpt.formula = "every configuration of the suite";
    long least = 0;
    json configs = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        std::string tag = label(i, suite[i]);
        json entry = {{"config", suite[i].to_json()}};
        if (results[i]) {
            const AuditReport& r = *results[i];
            rpt.absorb(r, tag);
            if (r.precision > 0) least = least ? std::min(least, r.precision) : r.precision;
            entry["status"] = r.pass() ? "pass" : "fail";
            entry["witness"] = r.witness;
        } else {
            rpt.add(tag + "/completed", false, errors[i], 0);
            entry["status"] = "error";
            entry["error"] = errors[i];
        }
        configs.push_back(entry);
    }
    rpt.precision = least;
    rpt.witness = {{"configs", configs}};
    return rpt;
}

json report_json(const RunConfig& cfg, const AuditReport& rpt, double seconds) {
    json j = rpt.to_json();
    j["command"] = cfg.to_json();
    j["seconds"] = seconds;
    return j;
}

int exit_code(const AuditReport& rpt) { return rpt.pass() ? 0 : 1; }

int exit_code(const std::exception& e) {
    if (dynamic_cast<const json::exception*>(&e)) return 2;
    auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return 1;
    static const std::set<std::string> invalid = {
        "InvalidInput", "DimensionMismatch", "NonInvertibleU", "ConstantTermNonzero", "SingularLinearPart",
        "ConvergenceViolation", "ThresholdViolation", "NonUnitDeterminant", "NotInvertibleModP", "InfiniteModule",
        "IncompatibleResidueDegree", "MissingGaussSum", "TraceNotOne", "HypothesisFViolated", "HypothesisViolated"};
    static const std::set<std::string> resource = {"PrecisionExhausted", "DegreeBudgetExceeded", "TailTooWeak"};
    if (invalid.count(err->kind())) return 2;
    if (resource.count(err->kind())) return 3;
    return 1;
}

namespace {

// witness fields that track precision rather than value
const std::set<std::string> kUnclaimedKeys = {
    "seconds", "precision", "prec", "digits", "guard_digits", "certified", "residual", "residual_valuation",
    "fixed_digits", "identity_digits", "valuation", "message"};

const std::regex kRational("-?[0-9]+(/[0-9]+)?");

long claimed_digits(const json& padic) {
    const json& pr = padic["prec"];
    if (pr.is_string()) {
        if (pr.get<std::string>() == "exact") return Padic::kInf;
        mpq_class q(pr.get<std::string>());
        return mpz_class(q.get_num() / q.get_den()).get_si();
    }
    return pr.get<long>();
}

bool close(const std::string& a, const std::string& b, long p, long digits) {
    if (a == b) return true;
    mpq_class d = mpq_class(a) - mpq_class(b);
    return d == 0 || vp_rational(d, p) >= digits;
}

void compare_json(const json& a, const json& b, long p, long digits, const std::string& path,
                  std::vector<std::string>& out) {
    if (a.type() != b.type()) {
        out.push_back(path);
        return;
    }
    if (a.is_object()) {
        if (a.contains("coeffs") && a.contains("prec") && a.contains("ring") && b.contains("prec")) {
            long n = std::min(claimed_digits(a), claimed_digits(b));
            const json &ca = a["coeffs"], &cb = b["coeffs"];
            if (ca.size() != cb.size()) {
                out.push_back(path);
                return;
            }
            for (std::size_t k = 0; k < ca.size(); ++k)
                if (!close(ca[k].get<std::string>(), cb[k].get<std::string>(), a["ring"]["p"].get<long>(), n)) {
                    out.push_back(path + "/coeffs");
                    return;
                }
            return;
        }
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (kUnclaimedKeys.count(it.key())) continue;
            if (!b.contains(it.key())) {
                out.push_back(path + "/" + it.key());
                continue;
            }
            compare_json(it.value(), b[it.key()], p, digits, path + "/" + it.key(), out);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!kUnclaimedKeys.count(it.key()) && !a.contains(it.key())) out.push_back(path + "/" + it.key());
        return;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) {
            out.push_back(path);
            return;
        }
        for (std::size_t k = 0; k < a.size(); ++k) compare_json(a[k], b[k], p, digits, path, out);
        return;
    }
    if (a.is_string()) {
        const std::string &sa = a.get<std::string>(), &sb = b.get<std::string>();
        bool numeric = std::regex_match(sa, kRational) && std::regex_match(sb, kRational);
        if (numeric ? !close(sa, sb, p, digits) : sa != sb) out.push_back(path);
        return;
    }
    if (a != b) out.push_back(path);
}

void compare_checks(const std::vector<CheckEntry>& a, const std::vector<CheckEntry>& b,
                    const std::function<long(std::size_t)>& p_of, long fallback, std::vector<std::string>& out) {
    if (a.size() != b.size()) {
        out.push_back("check count " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
        return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const CheckEntry &x = a[i], &y = b[i];
        if (x.name != y.name || x.pass != y.pass) {
            out.push_back(x.name);
            continue;
        }
        long digits = std::min(x.precision, y.precision);
        if (digits <= 0) digits = fallback;
        std::vector<std::string> diff;
        compare_json(x.witness, y.witness, p_of(i), digits, "", diff);
        if (!diff.empty()) out.push_back(x.name + " (witness" + diff.front() + ")");
    }
}

}  // namespace

std::vector<std::string> compare_reports(const AuditReport& a, const AuditReport& b, long p) {
    std::vector<std::string> out;
    long fallback = std::min(a.precision, b.precision);
    compare_checks(a.checks, b.checks, [p](std::size_t) { return p; }, fallback, out);
    std::vector<std::string> diff;
    compare_json(a.witness, b.witness, p, fallback, "", diff);
    if (!diff.empty()) out.push_back("report witness" + diff.front());
    return out;
}

std::vector<std::string> compare_suite_reports(const std::vector<RunConfig>& suite, const AuditReport& a,
                                               const AuditReport& b) {
    std::vector<std::string> out;
    auto p_of = [&](std::size_t i) {
        const std::string& name = a.checks[i].name;
        std::size_t k = std::stoul(name.substr(1, name.find(']') - 1));
        return k < suite.size() ? suite[k].p : 0;
    };
    compare_checks(a.checks, b.checks, p_of, std::min(a.precision, b.precision), out);
    const json &ca = a.witness["configs"], &cb = b.witness["configs"];
    if (ca.size() != cb.size()) {
        out.push_back("config count");
        return out;
    }
    for (std::size_t i = 0; i < ca.size() && i < suite.size(); ++i) {
        json wa = ca[i], wb = cb[i];
        wa.erase("config");
        wb.erase("config");
        std::vector<std::string> diff;
        compare_json(wa, wb, suite[i].p, std::min(a.precision, b.precision), "", diff);
        if (!diff.empty()) out.push_back(label(i, suite[i]) + " (witness" + diff.front() + ")");
    }
    return out;
}

}  // namespace ltx
