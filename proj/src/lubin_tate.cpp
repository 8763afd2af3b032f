#include "ltx/lubin_tate.hpp"

#include <chrono>
#include <cmath>

#include "ltx/errors.hpp"

namespace ltx {

namespace {

long log_p_ceil(long p, long n) {
    long k = 0, q = 1;
    while (q < n) {
        q *= p;
        ++k;
    }
    return k;
}

// v_p(m!) by Legendre
long vp_factorial(long p, long m) {
    long v = 0;
    for (long q = p; q <= m; q *= p) v += m / q;
    return v;
}

void require_unit_u(const PMatrix& u) {
    if (!u.square()) throw DimensionMismatch("u must be square");
    if (u.R->kind != RingKind::base) throw InvalidInput("u must have entries in Z_p");
    Padic d = det(u);
    if (d.is_zero() || d.val > 0) throw NonInvertibleU("det(u) is not a unit");
}

std::vector<int> offset_map(int r, int offset) {
    std::vector<int> m(r);
    for (int j = 0; j < r; ++j) m[j] = offset + j;
    return m;
}

bool coefficients_integral(const SeriesVec& v, long* minval) {
    long mv = Padic::kInf;
    for (auto& s : v)
        for (auto& c : s.coef)
            if (!c.is_zero()) mv = std::min(mv, c.val);
    if (minval) *minval = mv;
    return mv >= 0;
}

long min_prec(const SeriesVec& v) {
    long m = Padic::kInf;
    for (auto& s : v) m = std::min(m, s.min_prec());
    return m;
}

SeriesVec with_prec(const SeriesVec& v, long units) {
    SeriesVec out;
    for (auto& s : v) out.push_back(s.with_prec(units));
    return out;
}

// F(X, 0) = X or F(0, Y) = Y: the monomials free of the other block
bool identity_axiom(const SeriesVec& F, int r, bool left) {
    const MonomialIndex* I = F[0].idx;
    for (int k = 0; k < r; ++k)
        for (int q = 0; q < I->size(); ++q) {
            const auto& e = I->exps(q);
            bool other = false;
            for (int j = 0; j < r; ++j) other |= e[left ? r + j : j] != 0;
            if (other) continue;
            const Padic& c = F[k].coef[q];
            bool is_var = I->degree(q) == 1 && e[left ? k : r + k] == 1;
            if (is_var) {
                if (c.exact_zero() || !agree(c, Padic::one(c.R, c.digits() + 1))) return false;
            } else if (!c.is_zero()) {
                return false;
            }
        }
    return true;
}

// M(i, j) = dF_i/dY_j at Y = 0, as series in X of cap D - 1
std::vector<SeriesVec> y_jacobian_at_zero(const SeriesVec& F, int r) {
    const MonomialIndex* I = F[0].idx;
    int D = std::max(0, F[0].cap() - 1);
    std::vector<SeriesVec> M(r, SeriesVec(r, TruncSeries(F[0].R, r, D)));
    std::vector<int> x(r);
    for (int i = 0; i < r; ++i)
        for (int q = 0; q < I->size(); ++q) {
            const auto& e = I->exps(q);
            int ydeg = 0, yj = -1;
            for (int j = 0; j < r; ++j)
                if (e[r + j]) {
                    ydeg += e[r + j];
                    yj = j;
                }
            if (ydeg != 1 || F[i].coef[q].exact_zero() || I->degree(q) - 1 > D) continue;
            for (int j = 0; j < r; ++j) x[j] = e[j];
            M[i][yj][x] = F[i].coef[q];
        }
    return M;
}

bool is_identity_matrix(const std::vector<SeriesVec>& P) {
    int r = static_cast<int>(P.size());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const TruncSeries& s = P[i][j];
            for (int q = 0; q < s.idx->size(); ++q) {
                const Padic& c = s.coef[q];
                if (q == 0 && i == j) {
                    if (c.exact_zero() || !agree(c, Padic::one(c.R, c.digits() + 1))) return false;
                } else if (!c.is_zero()) {
                    return false;
                }
            }
        }
    return true;
}

}  // namespace

bool AxiomCertificate::all() const {
    return integral && left_identity && right_identity && commutative && jacobian_identity &&
           (!associativity_checked || associative);
}

json AxiomCertificate::to_json() const {
    json j;
    j["integral"] = integral;
    j["min_valuation"] = min_valuation >= Padic::kInf ? json("inf") : json(min_valuation);
    j["left_identity"] = left_identity;
    j["right_identity"] = right_identity;
    j["commutative"] = commutative;
    j["associative"] = associativity_checked ? json(associative) : json("skipped");
    j["jacobian_identity"] = jacobian_identity;
    j["guard_digits"] = guard_digits;
    j["seconds"] = seconds;
    return j;
}

int lt_default_degree(long p, int r) {
    return static_cast<int>(r == 1 ? p * p * p : p * p);
}

SeriesVec lt_logarithm(const PMatrix& u, int D, long digits) {
    require_unit_u(u);
    long p = u.R->p;
    if (D < p) throw InvalidInput("degree must be at least p");
    int r = u.rows;
    SeriesVec f(r, TruncSeries(u.R, r, D));
    PMatrix A = PMatrix::identity(u.R, r, digits);
    PMatrix uw = u.with_prec(digits * u.R->e);
    long i = 0;
    for (long pi = 1; pi <= D; pi *= p, ++i) {
        for (int k = 0; k < r; ++k)
            for (int j = 0; j < r; ++j) {
                std::vector<int> e(r, 0);
                e[j] = static_cast<int>(pi);
                f[k][e] = A(k, j).mul_p_power(-i);
            }
        A = A * uw;
    }
    return f;
}

bool factorial_integral(const SeriesVec& g) {
    for (auto& s : g) {
        long p = s.R->p;
        for (int q = 0; q < s.idx->size(); ++q) {
            const Padic& c = s.coef[q];
            if (c.is_zero()) continue;
            long v = c.val;
            for (int m : s.idx->exps(q)) v += s.R->e * vp_factorial(p, m);
            if (v < 0) return false;
        }
    }
    return true;
}

SeriesVec lt_exponential(const SeriesVec& log) {
    SeriesVec g = reversion(log);
    if (!factorial_integral(g)) throw IntegralityFailure("exponential coefficient times factorials is not integral");
    return g;
}

FormalGroupLaw lt_group_law(const PMatrix& u, int D, long digits, bool check_associativity) {
    auto t0 = std::chrono::steady_clock::now();
    require_unit_u(u);
    long p = u.R->p;
    int r = u.rows;
    if (digits < 1) throw InvalidInput("precision must be positive");
    FormalGroupLaw F;
    F.r = r;
    F.p = p;
    F.D = D;
    F.digits = digits;
    long guard = (D + p - 2) / (p - 1) + 2 * log_p_ceil(p, D + 1) + 4;
    for (int attempt = 0;; ++attempt) {
        long W = digits + guard;
        F.u = u.with_prec(W * u.R->e);
        F.log = lt_logarithm(F.u, D, W);
        F.exp = lt_exponential(F.log);
        SeriesVec fx = rename_vars(F.log, 2 * r, offset_map(r, 0));
        SeriesVec fy = rename_vars(F.log, 2 * r, offset_map(r, r));
        SeriesVec law = compose(F.exp, add(fx, fy));
        if (min_prec(law) >= digits * u.R->e) {
            F.law = with_prec(law, digits * u.R->e);
            break;
        }
        if (attempt == 3) throw PrecisionExhausted("group law lost more than the guard digits");
        guard *= 2;
    }
    F.cert.guard_digits = guard;

    AxiomCertificate& c = F.cert;
    c.integral = coefficients_integral(F.law, &c.min_valuation);
    if (!c.integral) throw IntegralityFailure("group law has a coefficient of negative valuation");
    c.left_identity = identity_axiom(F.law, r, true);
    c.right_identity = identity_axiom(F.law, r, false);
    std::vector<int> swap(2 * r);
    for (int j = 0; j < r; ++j) {
        swap[j] = r + j;
        swap[r + j] = j;
    }
    c.commutative = agree(rename_vars(F.law, 2 * r, swap), F.law);

    auto Jlog = jacobian(F.log);
    c.jacobian_identity = is_identity_matrix(matmul(Jlog, y_jacobian_at_zero(F.law, r)));

    if (check_associativity) {
        c.associativity_checked = true;
        std::vector<int> xy(2 * r), yz(2 * r);
        for (int j = 0; j < 2 * r; ++j) {
            xy[j] = j;
            yz[j] = r + j;
        }
        SeriesVec Fxy = rename_vars(F.law, 3 * r, xy);
        SeriesVec Fyz = rename_vars(F.law, 3 * r, yz);
        SeriesVec lhs_in = Fxy, rhs_in;
        for (int j = 0; j < r; ++j) lhs_in.push_back(TruncSeries::variable(u.R, 3 * r, D, 2 * r + j, digits));
        for (int j = 0; j < r; ++j) rhs_in.push_back(TruncSeries::variable(u.R, 3 * r, D, j, digits));
        for (auto& s : Fyz) rhs_in.push_back(s);
        c.associative = agree(compose(F.law, lhs_in), compose(F.law, rhs_in));
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return F;
}

void extend_point_series(FormalGroupLaw& F, int Dp) {
    if (Dp <= F.log[0].cap()) return;
    long W = F.digits + (Dp + F.p - 2) / (F.p - 1) + 2 * log_p_ceil(F.p, Dp + 1) + 4;
    F.log = lt_logarithm(F.u.with_prec(W * F.ring()->e), Dp, W);
    F.exp = lt_exponential(F.log);
}

json PSeriesReport::to_json() const {
    json j;
    j["linear_is_p"] = linear_is_p;
    j["integral"] = integral;
    if (classical_applicable) {
        j["equals_pX_plus_Xp"] = classical_match;
        j["congruent_to_Xp_mod_p"] = congruent_to_frobenius;
    }
    if (!series.empty()) {
        const TruncSeries& s = series[0];
        json low = json::array();
        for (int q = 0; q < s.idx->size() && s.idx->degree(q) <= std::min(s.cap(), 2 * static_cast<int>(s.R->p)); ++q) {
            if (s.coef[q].is_zero()) continue;
            mpz_class m = s.R->ppow(s.coef[q].digits());
            mpz_class c = s.coef[q].coeff(0).get_num() % m;
            if (c > m / 2) c -= m;
            low.push_back({{"exp", s.idx->exps(q)}, {"coeff", c.get_str()}});
        }
        j["first_component_low_terms"] = low;
    }
    return j;
}

PSeriesReport p_series(const FormalGroupLaw& F) {
    RingPtr R = F.ring();
    long W = F.digits + F.cert.guard_digits;
    Padic pz = Padic::integer(R, F.p, W);
    SeriesVec inner;
    for (auto& s : F.log) inner.push_back(pz * s);
    PSeriesReport rep;
    rep.series = with_prec(compose(F.exp, inner), F.digits * R->e);
    PMatrix L = linear_part(rep.series);
    rep.linear_is_p = agree(L, PMatrix::scalar(Padic::integer(R, F.p, F.digits + 1), F.r));
    rep.integral = coefficients_integral(rep.series, nullptr);
    rep.classical_applicable = F.r == 1 && agree(F.u(0, 0), Padic::one(R, F.digits + 1));
    if (rep.classical_applicable) {
        const TruncSeries& s = rep.series[0];
        rep.classical_match = true;
        rep.congruent_to_frobenius = true;
        for (int q = 0; q < s.idx->size(); ++q) {
            int d = s.idx->degree(q);
            long want = d == 1 ? F.p : (d == F.p ? 1 : 0);
            Padic diff = s.coef[q] - Padic::integer(R, want, F.digits);
            if (!diff.is_zero()) rep.classical_match = false;
            Padic dmod = s.coef[q] - Padic::integer(R, d == F.p ? 1 : 0, F.digits);
            if (!dmod.is_zero() && dmod.val < R->e) rep.congruent_to_frobenius = false;
        }
    }
    return rep;
}

// ------------------------------------------------------------ points

namespace {

void require_point(const FormalGroupLaw& F, const FormalPoint& x) {
    if (static_cast<int>(x.size()) != F.r) throw DimensionMismatch("point has the wrong number of coordinates");
}

FormalPoint concat(const FormalPoint& a, const FormalPoint& b) {
    FormalPoint c = a;
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

void require_level(const FormalPoint& x, long n, long p) {
    int e = x[0].R->e;
    if (n < log_threshold(p, e))
        throw ThresholdViolation("level " + std::to_string(n) + " not above e/(p-1) = " + mpq_class(e, p - 1).get_str());
    for (auto& c : x)
        if (!c.is_zero() && c.val < n) throw ThresholdViolation("coordinate below the filtration level");
}

}  // namespace

long log_threshold(long p, int e) { return e / (p - 1) + 1; }

FormalPoint point_add(const FormalGroupLaw& F, const FormalPoint& x, const FormalPoint& y) {
    require_point(F, x);
    require_point(F, y);
    return evaluate(F.law, concat(x, y), TailModel::integral, 0).value;
}

SeriesVec negation_series(const FormalGroupLaw& F) {
    int r = F.r;
    RingPtr R = F.ring();
    // G(X, Y) = (X, F(X, Y)) is invertible; its inverse at Z = 0 gives i(X)
    SeriesVec G;
    for (int j = 0; j < r; ++j) G.push_back(TruncSeries::variable(R, 2 * r, F.D, j, F.digits));
    for (auto& s : F.law) G.push_back(s);
    SeriesVec H = reversion(G);
    SeriesVec out;
    for (int k = 0; k < r; ++k) {
        TruncSeries s(R, r, F.D);
        const TruncSeries& h = H[r + k];
        for (int q = 0; q < h.idx->size(); ++q) {
            const auto& e = h.idx->exps(q);
            bool z = false;
            for (int j = 0; j < r; ++j) z |= e[r + j] != 0;
            if (z || h.coef[q].exact_zero()) continue;
            s[std::vector<int>(e.begin(), e.begin() + r)] = h.coef[q];
        }
        out.push_back(s.with_prec(F.digits * R->e));
    }
    return out;
}

FormalPoint point_negate(const FormalGroupLaw& F, const FormalPoint& x) {
    require_point(F, x);
    std::call_once(F.negation->once, [&] { F.negation->series = negation_series(F); });
    return evaluate(F.negation->series, x, TailModel::integral, 0).value;
}

FormalPoint log_point(const FormalGroupLaw& F, const FormalPoint& x, long n) {
    require_point(F, x);
    require_level(x, n, F.p);
    return evaluate(F.log, x, TailModel::logarithm, 0).value;
}

FormalPoint exp_point(const FormalGroupLaw& F, const FormalPoint& v, long n) {
    require_point(F, v);
    require_level(v, n, F.p);
    return evaluate(F.exp, v, TailModel::exponential, mpq_class(1, F.p - 1)).value;
}

AuditReport filtration_check(const FormalGroupLaw& F, RingPtr S, long i, int samples, std::mt19937_64& rng) {
    if (i < 1) throw InvalidInput("filtration level must be at least 1");
    AuditReport rep;
    rep.identity = "filtration";
    rep.formula = "F((p^i)^(r)) / F((p^(i+1))^(r)) = (p^i)^(r) / (p^(i+1))^(r)";
    rep.precision = F.digits;
    rep.witness["level"] = i;
    rep.witness["samples"] = samples;
    long digits = F.digits;
    Padic pi_i = Padic::uniformizer(S, digits + i + 2).pow(i);
    auto random_coord = [&]() {
        std::vector<mpz_class> v(S->dim());
        const mpz_class& mod = S->ppow(digits + 2);
        for (auto& a : v) {
            mpz_class z = 0;
            for (int k = 0; k < 4; ++k) z = (z << 60) + mpz_class(std::to_string(rng() >> 4));
            a = z % mod;
        }
        return pi_i * Padic::from_coeffs(S, v, 0, (digits + 2) * S->e);
    };
    bool ok = true;
    json counter;
    for (int s = 0; s < samples && ok; ++s) {
        FormalPoint x, y;
        for (int k = 0; k < F.r; ++k) {
            x.push_back(random_coord());
            y.push_back(random_coord());
        }
        FormalPoint z = point_add(F, x, y);
        for (int k = 0; k < F.r; ++k) {
            Padic d = z[k] - (x[k] + y[k]);
            if (d.prec < i + 1) throw PrecisionExhausted("filtration check below the certified precision");
            if (!d.is_zero() && d.val < i + 1) {
                ok = false;
                counter = {{"x", x[k].to_json()}, {"y", y[k].to_json()}, {"coordinate", k}};
            }
        }
    }
    rep.add("F(x,y) = x + y mod p^(i+1)", ok, counter);
    return rep;
}

// ------------------------------------------------------------ theta

json ThetaReport::to_json() const {
    return {{"eps_relation", eps_relation},
            {"linear_part", linear_part},
            {"multiplicative", multiplicative},
            {"integral", integral}};
}

ThetaReport theta_series(const FormalGroupLaw& F, const PMatrix& eps, int D) {
    if (eps.rows != F.r || !eps.square()) throw DimensionMismatch("eps must be r x r");
    RingPtr S = eps.R;
    int r = F.r;
    D = std::min(D, F.D);
    long W = F.digits + F.cert.guard_digits;
    ThetaReport rep;
    PMatrix einv = inverse(eps);
    PMatrix uS = embed(F.u, S);
    rep.eps_relation = agree(frobenius(einv) * eps, inverse(uS));

    SeriesVec logS;
    for (auto& s : embed(F.log, S)) logS.push_back(s.recap(D));
    SeriesVec z = apply_matrix(einv, logS);
    SeriesVec E;
    mpz_class fact = 1;
    for (int k = 0; k < r; ++k) {
        TruncSeries s(S, r, D);
        fact = 1;
        for (int n = 1; n <= D; ++n) {
            fact *= n;
            std::vector<int> e(r, 0);
            e[k] = n;
            s[e] = Padic::rational(S, mpq_class(1, fact), W);
        }
        E.push_back(s);
    }
    rep.theta = with_prec(compose(E, z), F.digits * S->e);
    rep.linear_part = agree(linear_part(rep.theta), einv);
    rep.integral = coefficients_integral(rep.theta, nullptr);

    SeriesVec lawS = embed(F.law, S);
    for (auto& s : lawS) s = s.recap(D);
    SeriesVec lhs = compose(rep.theta, lawS);
    SeriesVec tx = rename_vars(rep.theta, 2 * r, offset_map(r, 0));
    SeriesVec ty = rename_vars(rep.theta, 2 * r, offset_map(r, r));
    SeriesVec rhs;
    for (int k = 0; k < r; ++k) rhs.push_back(tx[k] + ty[k] + tx[k] * ty[k]);
    rep.multiplicative = agree(lhs, rhs);
    return rep;
}

}  // namespace ltx
