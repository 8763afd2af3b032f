#include "ltx/characters.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "ltx/errors.hpp"

namespace ltx {

namespace {

long pmod(long a, long n) { return ((a % n) + n) % n; }

// reduce a polynomial with rational coefficients modulo Phi_n
std::vector<mpq_class> reduce_mod(std::vector<mpq_class> a, long n) {
    const auto& g = CycloNumber::cyclotomic_poly(n);
    long deg = static_cast<long>(g.size()) - 1;
    for (long k = static_cast<long>(a.size()) - 1; k >= deg; --k) {
        if (a[k] == 0) continue;
        mpq_class t = a[k];
        for (long i = 0; i <= deg; ++i) a[k - deg + i] -= t * g[i];
    }
    a.resize(deg, mpq_class(0));
    if (a.empty()) a.assign(1, mpq_class(0));
    return a;
}

CycloNumber make(long n, std::vector<mpq_class> poly) {
    CycloNumber x;
    x.n = n;
    x.c = reduce_mod(std::move(poly), n);
    return x;
}

// substitute x -> x^j with exponents taken mod n
CycloNumber substitute(const CycloNumber& a, long j, long m) {
    std::vector<mpq_class> poly(m, mpq_class(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        if (a.c[i] != 0) poly[pmod(static_cast<long>(i) * j, m)] += a.c[i];
    return make(m, std::move(poly));
}

}  // namespace

const std::vector<mpz_class>& CycloNumber::cyclotomic_poly(long n) {
    if (n < 1) throw InvalidInput("cyclotomic index must be positive");
    static std::mutex mu;
    static std::map<long, std::vector<mpz_class>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    std::vector<mpz_class> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (long d = 1; d < n; ++d) {
        if (n % d) continue;
        const auto& g = cyclotomic_poly(d);
        long dg = static_cast<long>(g.size()) - 1, dn = static_cast<long>(num.size()) - 1;
        std::vector<mpz_class> q(dn - dg + 1, 0);
        for (long k = dn; k >= dg; --k) {
            mpz_class t = num[k];
            q[k - dg] = t;
            if (t == 0) continue;
            for (long i = 0; i <= dg; ++i) num[k - dg + i] -= t * g[i];
        }
        num = q;
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(n, num).first->second;
}

long CycloNumber::totient(long n) { return static_cast<long>(cyclotomic_poly(n).size()) - 1; }

CycloNumber CycloNumber::rational(long n, const mpq_class& q) {
    std::vector<mpq_class> v{q};
    return make(n, v);
}

CycloNumber CycloNumber::zeta(long n, long k) {
    if (n < 1) throw InvalidInput("zeta order must be positive");
    std::vector<mpq_class> poly(n, mpq_class(0));
    poly[pmod(k, n)] = 1;
    return make(n, std::move(poly));
}

CycloNumber CycloNumber::lift(long m) const {
    if (m % n) throw InvalidInput("cannot lift Q(zeta_" + std::to_string(n) + ") to Q(zeta_" + std::to_string(m) + ")");
    if (m == n) return *this;
    return substitute(*this, m / n, m);
}

bool CycloNumber::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](const mpq_class& a) { return a == 0; });
}

bool CycloNumber::is_rational() const {
    return std::all_of(c.begin() + 1, c.end(), [](const mpq_class& a) { return a == 0; });
}

mpq_class CycloNumber::rational_value() const {
    if (!is_rational()) throw InvalidInput("cyclotomic number is not rational");
    return c[0];
}

CycloNumber CycloNumber::operator-() const {
    CycloNumber r = *this;
    for (auto& a : r.c) a = -a;
    return r;
}

CycloNumber operator+(const CycloNumber& a, const CycloNumber& b) {
    long m = std::lcm(a.n, b.n);
    CycloNumber x = a.lift(m), y = b.lift(m);
    for (std::size_t i = 0; i < x.c.size(); ++i) x.c[i] += y.c[i];
    return x;
}

CycloNumber operator-(const CycloNumber& a, const CycloNumber& b) { return a + (-b); }

CycloNumber operator*(const CycloNumber& a, const CycloNumber& b) {
    long m = std::lcm(a.n, b.n);
    CycloNumber x = a.lift(m), y = b.lift(m);
    std::vector<mpq_class> poly(x.c.size() + y.c.size(), mpq_class(0));
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        if (x.c[i] == 0) continue;
        for (std::size_t j = 0; j < y.c.size(); ++j) poly[i + j] += x.c[i] * y.c[j];
    }
    return make(m, std::move(poly));
}

CycloNumber operator*(const mpq_class& s, const CycloNumber& b) {
    CycloNumber r = b;
    for (auto& a : r.c) a *= s;
    return r;
}

bool operator==(const CycloNumber& a, const CycloNumber& b) { return (a - b).is_zero(); }

CycloNumber CycloNumber::inverse() const {
    if (is_zero()) throw InvalidInput("inverse of zero");
    long d = static_cast<long>(c.size());
    // columns: coordinates of this * x^i
    std::vector<std::vector<mpq_class>> M(d, std::vector<mpq_class>(d + 1, mpq_class(0)));
    for (long i = 0; i < d; ++i) {
        CycloNumber col = *this * zeta(n, i);
        for (long r = 0; r < d; ++r) M[r][i] = col.c[r];
    }
    M[0][d] = 1;
    for (long col = 0; col < d; ++col) {
        long piv = col;
        while (M[piv][col] == 0) ++piv;
        std::swap(M[piv], M[col]);
        for (long r = 0; r < d; ++r) {
            if (r == col || M[r][col] == 0) continue;
            mpq_class f = M[r][col] / M[col][col];
            for (long k = col; k <= d; ++k) M[r][k] -= f * M[col][k];
        }
    }
    CycloNumber out;
    out.n = n;
    out.c.resize(d);
    for (long r = 0; r < d; ++r) out.c[r] = M[r][d] / M[r][r];
    return out;
}

CycloNumber CycloNumber::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    CycloNumber result = rational(n, 1), base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    return result;
}

CycloNumber CycloNumber::sigma(long j) const {
    if (std::gcd(pmod(j, n), n) != 1 && n > 1) throw InvalidInput("sigma_j needs gcd(j, n) = 1");
    return substitute(*this, pmod(j, n), n);
}

json CycloNumber::to_json() const {
    json coeffs = json::array();
    for (auto& a : c) coeffs.push_back(a.get_str());
    return {{"n", n}, {"coeffs", coeffs}};
}

std::string CycloNumber::str() const {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        if (!s.empty()) s += " + ";
        s += c[i].get_str();
        if (i > 0) s += "*z^" + std::to_string(i);
    }
    return (s.empty() ? "0" : s) + " [n=" + std::to_string(n) + "]";
}

// ------------------------------------------------------------ groups

AbelianGroup AbelianGroup::make(std::vector<long> factors, std::vector<std::string> names) {
    for (long f : factors)
        if (f < 1) throw InvalidInput("invariant factors must be positive");
    AbelianGroup G;
    G.factors = std::move(factors);
    if (names.empty())
        for (std::size_t i = 0; i < G.factors.size(); ++i) names.push_back("g" + std::to_string(i + 1));
    if (names.size() != G.factors.size()) throw DimensionMismatch("one name per generator");
    G.names = std::move(names);
    return G;
}

long AbelianGroup::order() const {
    long o = 1;
    for (long f : factors) o *= f;
    return o;
}

long AbelianGroup::exponent() const {
    long e = 1;
    for (long f : factors) e = std::lcm(e, f);
    return e;
}

std::vector<GroupElement> AbelianGroup::elements() const {
    std::vector<GroupElement> out;
    GroupElement g(factors.size(), 0);
    for (long t = 0; t < order(); ++t) {
        out.push_back(g);
        for (long i = static_cast<long>(factors.size()) - 1; i >= 0; --i) {
            if (++g[i] < factors[i]) break;
            g[i] = 0;
        }
    }
    return out;
}

GroupElement AbelianGroup::reduce(GroupElement g) const {
    if (g.size() != factors.size()) throw DimensionMismatch("group element length");
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = pmod(g[i], factors[i]);
    return g;
}

GroupElement AbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
    GroupElement s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
    return reduce(s);
}

GroupElement AbelianGroup::neg(const GroupElement& a) const {
    GroupElement s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = -a[i];
    return reduce(s);
}

json AbelianGroup::to_json() const { return {{"factors", factors}, {"generators", names}}; }

mpq_class Character::angle(const AbelianGroup& G, const GroupElement& g) const {
    mpq_class a = 0;
    for (std::size_t i = 0; i < exps.size(); ++i) a += mpq_class(exps[i] * g[i], G.factors[i]);
    a.canonicalize();
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
    a -= fl;
    return a;
}

CycloNumber Character::value(const AbelianGroup& G, const GroupElement& g) const {
    long M = G.exponent();
    mpq_class k = angle(G, g) * M;
    return CycloNumber::zeta(M, k.get_num().get_si());
}

bool Character::trivial() const {
    return std::all_of(exps.begin(), exps.end(), [](long e) { return e == 0; });
}

Character Character::conj(const AbelianGroup& G) const {
    Character c;
    c.exps = G.neg(exps);
    return c;
}

json Character::to_json() const { return {{"exponents", exps}}; }

std::vector<Character> characters_of(const AbelianGroup& G) {
    std::vector<Character> out;
    for (auto& e : G.elements()) out.push_back(Character{e});
    return out;
}

CycloNumber inner_sum(const AbelianGroup& G, const Character& a, const Character& b) {
    CycloNumber s = CycloNumber::rational(G.exponent(), 0);
    for (auto& g : G.elements()) s = s + a.value(G, g) * b.value(G, g).conj();
    return s;
}

Subgroup Subgroup::make(const AbelianGroup& G, AbelianGroup H, std::vector<GroupElement> images) {
    if (images.size() != H.factors.size()) throw DimensionMismatch("one image per generator of H");
    Subgroup S;
    S.rank = G.factors.size();
    for (std::size_t i = 0; i < images.size(); ++i) {
        images[i] = G.reduce(images[i]);
        GroupElement m(images[i].size());
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = images[i][k] * H.factors[i];
        if (G.reduce(m) != GroupElement(m.size(), 0)) throw InvalidInput("generator image order does not divide");
    }
    S.H = std::move(H);
    S.images = std::move(images);
    std::set<GroupElement> seen;
    for (auto& h : S.H.elements()) seen.insert(G.reduce(S.map(h)));
    if (static_cast<long>(seen.size()) != S.H.order()) throw InvalidInput("subgroup map is not injective");
    return S;
}

GroupElement Subgroup::map(const GroupElement& h) const {
    GroupElement g(rank, 0);
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += h[i] * images[i][k];
    return g;
}

int restriction_multiplicity(const AbelianGroup& G, const Subgroup& H, const Character& chi, const Character& psi) {
    for (std::size_t i = 0; i < H.images.size(); ++i) {
        GroupElement e(H.images.size(), 0);
        e[i] = 1;
        if (chi.angle(G, G.reduce(H.images[i])) != psi.angle(H.H, e)) return 0;
    }
    return 1;
}

// ------------------------------------------------------------ conductors

json ConductorData::to_json() const {
    return {{"m_chi", m_chi}, {"m_psi", m_psi}, {"s_K", s_K},   {"s_L", s_L},   {"s_LK", s_LK},
            {"d_K", d_K},     {"d_L", d_L},     {"d_LK", d_LK}, {"e_LK", e_LK}, {"inertia", inertia}};
}

AuditReport conductor_identity_check(const AbelianGroup& G, const Subgroup& H, const ConductorData& cond) {
    auto chis = characters_of(G);
    auto psis = characters_of(H.H);
    if (cond.m_chi.size() != chis.size() || cond.m_psi.size() != psis.size())
        throw InconsistentConductorData("one conductor exponent per character is required");
    for (long m : cond.m_chi)
        if (m < 0) throw InconsistentConductorData("negative conductor exponent");
    AuditReport out;
    out.identity = "conductor_identity";
    out.formula = "sum_chi m_chi <chi, Ind psi> = d_{L/K} s_{L/K} psi(1) + d_{L/K} m_psi; "
                  "sum_chi d_K (s_K chi(1) + m_chi) <chi, Ind psi> = d_L psi(1) s_L + d_L m_psi";
    out.witness = {{"data", cond.to_json()}, {"G", G.to_json()}, {"H", H.H.to_json()}};
    auto fail = [](const std::string& what) { throw InconsistentConductorData(what); };

    long index = H.index(G);
    if (index != cond.e_LK * cond.d_LK) fail("[G:H] != e_{L/K} d_{L/K}");
    if (cond.d_L != cond.d_K * cond.d_LK) fail("d_L != d_K d_{L/K}");
    if (cond.s_L != cond.e_LK * cond.s_K + cond.s_LK) fail("s_L != e_{L/K} s_K + s_{L/K}");
    out.add("degree bookkeeping", true, {{"index", index}});

    if (!cond.inertia.empty()) {
        for (std::size_t i = 0; i < chis.size(); ++i) {
            bool triv = true;
            for (auto& g : cond.inertia) triv = triv && chis[i].angle(G, G.reduce(g)) == 0;
            if (triv != (cond.m_chi[i] == 0))
                fail("m_chi = 0 must hold exactly on inertia-trivial chi; offending chi " +
                     chis[i].to_json().dump());
        }
        out.add("m_chi = 0 iff chi trivial on inertia", true);
    }

    for (std::size_t j = 0; j < psis.size(); ++j) {
        long s1 = 0, s2 = 0, s3 = 0;
        for (std::size_t i = 0; i < chis.size(); ++i) {
            int mult = restriction_multiplicity(G, H, chis[i], psis[j]);
            s1 += cond.m_chi[i] * mult;
            s2 += mult;
            s3 += cond.d_K * (cond.s_K + cond.m_chi[i]) * mult;
        }
        long r1 = cond.d_LK * cond.s_LK + cond.d_LK * cond.m_psi[j];
        long r3 = cond.d_L * cond.s_L + cond.d_L * cond.m_psi[j];
        std::string tag = "psi " + psis[j].to_json()["exponents"].dump();
        if (s1 != r1) fail(tag + ": relative identity " + std::to_string(s1) + " != " + std::to_string(r1));
        if (s2 != index) fail(tag + ": (Ind psi)(1) " + std::to_string(s2) + " != " + std::to_string(index));
        if (s3 != r3) fail(tag + ": absolute identity " + std::to_string(s3) + " != " + std::to_string(r3));
        out.add(tag, true, {{"relative", s1}, {"degree", s2}, {"absolute", s3}});
    }
    return out;
}

std::vector<ConductorInstance> conductor_instances(long p) {
    if (p < 3) throw InvalidInput("p must be odd");
    std::vector<ConductorInstance> out;
    auto exps_of = [](const AbelianGroup& G) { return characters_of(G); };

    {
        // unramified: Z/4 with L the quadratic subextension
        ConductorInstance I;
        I.name = "unramified";
        I.G = AbelianGroup::make({4}, {"b"});
        I.H = Subgroup::make(I.G, AbelianGroup::make({2}, {"b2"}), {{2}});
        I.data.m_chi.assign(4, 0);
        I.data.m_psi.assign(2, 0);
        I.data.d_K = 1;
        I.data.d_LK = 2;
        I.data.d_L = 2;
        I.data.e_LK = 1;
        out.push_back(I);
    }
    {
        // tame: inertia <a> of order 2, L the unramified quadratic subextension
        ConductorInstance I;
        I.name = "tame";
        I.G = AbelianGroup::make({2, 2}, {"a", "b"});
        I.H = Subgroup::make(I.G, AbelianGroup::make({2}, {"a"}), {{1, 0}});
        for (auto& chi : exps_of(I.G)) I.data.m_chi.push_back(chi.exps[0] != 0 ? 1 : 0);
        for (auto& psi : exps_of(I.H.H)) I.data.m_psi.push_back(psi.exps[0] != 0 ? 1 : 0);
        I.data.d_K = 1;
        I.data.d_LK = 2;
        I.data.d_L = 2;
        I.data.e_LK = 1;
        I.data.inertia = {{1, 0}};
        out.push_back(I);
    }
    {
        // weakly ramified: G = <a> x <b>, a of order p generating inertia; L fixed by <b>
        ConductorInstance I;
        I.name = "weakly_ramified";
        I.G = AbelianGroup::make({p, 2}, {"a", "b"});
        I.H = Subgroup::make(I.G, AbelianGroup::make({2}, {"b"}), {{0, 1}});
        for (auto& chi : exps_of(I.G)) I.data.m_chi.push_back(chi.exps[0] != 0 ? 2 : 0);
        I.data.m_psi.assign(2, 0);
        I.data.s_LK = 2 * (p - 1);
        I.data.s_L = 2 * (p - 1);
        I.data.d_K = 1;
        I.data.d_LK = 1;
        I.data.d_L = 1;
        I.data.e_LK = p;
        I.data.inertia = {{1, 0}};
        out.push_back(I);
    }
    {
        // weakly ramified, trivial H
        ConductorInstance I;
        I.name = "weakly_ramified_full";
        I.G = AbelianGroup::make({p, 2}, {"a", "b"});
        I.H = Subgroup::make(I.G, AbelianGroup::make({}, {}), {});
        for (auto& chi : exps_of(I.G)) I.data.m_chi.push_back(chi.exps[0] != 0 ? 2 : 0);
        I.data.m_psi.assign(1, 0);
        I.data.s_LK = 2 * (p - 1);
        I.data.s_L = 2 * (p - 1);
        I.data.d_K = 1;
        I.data.d_LK = 2;
        I.data.d_L = 2;
        I.data.e_LK = p;
        I.data.inertia = {{1, 0}};
        out.push_back(I);
    }
    return out;
}

// ------------------------------------------------------------ Gauss sums

CycloNumber gauss_sum(long p, int f, long j, const CycloNumber& factor) {
    if (!is_prime(p) || p == 2) throw InvalidInput("p must be an odd prime");
    if (f < 1) throw InvalidInput("f must be positive");
    fp::Field F(p, fp::least_irreducible(p, f));
    long q = F.order().get_si();
    if (j < 0 || j >= q - 1) throw InvalidInput("character exponent must lie in [0, q - 1)");
    long n = (q - 1) * p;
    auto g = F.element_of_order(q - 1);
    std::vector<mpq_class> poly(n, mpq_class(0));
    auto x = F.one();
    for (long i = 0; i < q - 1; ++i) {
        long e = pmod(p * i * j + (q - 1) * F.trace(x), n);
        poly[e] += 1;
        x = F.mul(x, g);
    }
    return factor * make(n, std::move(poly));
}

Padic embed_local(const CycloNumber& x, RingPtr S, long digits) {
    Padic z = root_of_unity(S, x.n, 1, digits);
    Padic acc = Padic::integer(S, 0, digits);
    for (long i = static_cast<long>(x.c.size()) - 1; i >= 0; --i)
        acc = acc * z + Padic::rational(S, x.c[i], digits);
    return acc;
}

}  // namespace ltx
