#include "ltx/padic.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include "ltx/errors.hpp"

namespace ltx {

namespace {

constexpr long kFrobDigits = 160;
constexpr long kPowCache = 400;

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
long ceil_div(long a, long b) { return -floor_div(-a, b); }

using ZPoly = std::vector<mpz_class>;

// a mod (g, p^M) with g monic integer of degree f, a of any length
void reduce_poly(ZPoly& a, const ZPoly& g, const mpz_class& pm) {
    std::size_t f = g.size() - 1;
    for (std::size_t d = a.size(); d-- > f;) {
        if (a[d] == 0) continue;
        mpz_class t = a[d];
        for (std::size_t j = 0; j <= f; ++j) a[d - f + j] -= t * g[j];
    }
    a.resize(f);
    for (auto& x : a) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), pm.get_mpz_t());
}

ZPoly mul_poly(const ZPoly& a, const ZPoly& b, const ZPoly& g, const mpz_class& pm) {
    ZPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    reduce_poly(c, g, pm);
    return c;
}

ZPoly eval_poly(const ZPoly& g, const ZPoly& Y, const ZPoly& mod, const mpz_class& pm) {
    // Horner over the coefficients of g
    std::size_t f = mod.size() - 1;
    ZPoly acc(f, 0);
    for (std::size_t d = g.size(); d-- > 0;) {
        acc = mul_poly(acc, Y, mod, pm);
        acc[0] += g[d];
        mpz_fdiv_r(acc[0].get_mpz_t(), acc[0].get_mpz_t(), pm.get_mpz_t());
    }
    return acc;
}

bool all_zero(const ZPoly& a) {
    return std::all_of(a.begin(), a.end(), [](const mpz_class& x) { return x == 0; });
}

void build_frobenius(Ring& R) {
    const long p = R.p;
    const int f = R.f;
    R.frob.assign(f, ZPoly(f, 0));
    if (f == 1) {
        R.frob[0][0] = 1;
        return;
    }
    mpz_class pm = R.ppow(R.cap);
    ZPoly g = R.modulus;
    ZPoly dg(f, 0);
    for (int j = 1; j <= f; ++j) dg[j - 1] = g[j] * j;
    // start from y^p mod (g, p)
    fp::Poly gp(f + 1);
    for (int j = 0; j <= f; ++j) gp[j] = mpz_class(g[j] % p).get_si();
    fp::Poly yp = fp::powmod(fp::Poly{0, 1}, mpz_class(p), gp, p);
    ZPoly Y(f, 0);
    for (std::size_t j = 0; j < yp.size(); ++j) Y[j] = yp[j];
    // Z ~ g'(Y)^{-1}
    ZPoly dY = eval_poly(dg, Y, g, pm);
    fp::Poly dYp(f);
    for (int j = 0; j < f; ++j) dYp[j] = mpz_class(dY[j] % p).get_si();
    fp::trim(dYp);
    auto zi = fp::invmod(dYp, gp, p);
    if (!zi) throw std::logic_error("build_frobenius: modulus not separable");
    ZPoly Z(f, 0);
    for (std::size_t j = 0; j < zi->size(); ++j) Z[j] = (*zi)[j];
    for (int it = 0; it < 64; ++it) {
        ZPoly gy = eval_poly(g, Y, g, pm);
        if (all_zero(gy)) break;
        ZPoly step = mul_poly(gy, Z, g, pm);
        for (int j = 0; j < f; ++j) {
            Y[j] -= step[j];
            mpz_fdiv_r(Y[j].get_mpz_t(), Y[j].get_mpz_t(), pm.get_mpz_t());
        }
        ZPoly d = eval_poly(dg, Y, g, pm);
        ZPoly dz = mul_poly(d, Z, g, pm);
        for (auto& x : dz) x = -x;
        dz[0] += 2;
        Z = mul_poly(Z, dz, g, pm);
    }
    ZPoly pw(f, 0);
    pw[0] = 1;
    for (int j = 0; j < f; ++j) {
        R.frob[j] = pw;
        pw = mul_poly(pw, Y, g, pm);
    }
}

}  // namespace

const mpz_class& Ring::ppow(long n) const {
    if (n >= 0 && n < static_cast<long>(pp.size())) return pp[n];
    thread_local std::map<std::pair<long, long>, mpz_class> extra;
    auto key = std::make_pair(p, n);
    auto it = extra.find(key);
    if (it != extra.end()) return it->second;
    mpz_class v;
    mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
    return extra.emplace(key, v).first->second;
}

std::string Ring::name() const {
    std::ostringstream os;
    switch (kind) {
        case RingKind::base: os << "Z_" << p; break;
        case RingKind::unramified: os << "Z_" << p << "^" << f; break;
        case RingKind::cyclotomic: os << "Z_" << p << "^" << f << "[zeta_" << p << "]"; break;
    }
    return os.str();
}

json Ring::to_json() const {
    json j;
    j["p"] = p;
    j["kind"] = kind == RingKind::base ? "base" : kind == RingKind::unramified ? "unramified" : "cyclotomic_p";
    j["f"] = f;
    j["e"] = e;
    std::vector<std::string> m;
    for (auto& x : modulus) m.push_back(x.get_str());
    j["modulus"] = m;
    return j;
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

RingPtr make_ring(long p, RingKind kind, int k) {
    if (!is_prime(p)) throw InvalidInput("p = " + std::to_string(p) + " is not prime");
    if (p == 2) throw InvalidInput("p = 2 is not supported");
    if (k < 1) throw InvalidInput("ring degree must be at least 1");
    if (kind == RingKind::base && k != 1) throw InvalidInput("base ring has degree 1");

    static std::mutex mu;
    static std::map<std::tuple<long, int, int>, std::unique_ptr<Ring>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(p, static_cast<int>(kind), k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();

    auto R = std::make_unique<Ring>();
    R->p = p;
    R->kind = kind;
    R->f = k;
    R->e = kind == RingKind::cyclotomic ? static_cast<int>(p - 1) : 1;
    R->cap = kFrobDigits;
    R->pp.resize(kPowCache);
    R->pp[0] = 1;
    for (long i = 1; i < kPowCache; ++i) R->pp[i] = R->pp[i - 1] * p;

    fp::Poly g = fp::least_irreducible(p, k);
    R->modulus.assign(g.begin(), g.end());
    R->residue = fp::Field(p, g);
    auto inv = fp::mat_inverse(R->residue.frob, p);
    if (!inv) throw std::logic_error("make_ring: Frobenius not invertible on residue field");
    R->inv_frob = *inv;

    R->eis.assign(R->e, 0);
    if (R->e > 1) {
        for (int j = 0; j < R->e; ++j) {
            mpz_class b;
            mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(j + 1));
            R->eis[j] = b;
        }
    }
    build_frobenius(*R);
    RingPtr out = R.get();
    cache.emplace(key, std::move(R));
    return out;
}

RingPtr unramified_part(RingPtr R) {
    if (R->kind != RingKind::cyclotomic) return R;
    return R->f == 1 ? make_ring(R->p, RingKind::base, 1) : make_ring(R->p, RingKind::unramified, R->f);
}

RingPtr cyclotomic_over(RingPtr R) { return make_ring(R->p, RingKind::cyclotomic, R->f); }

// ---------------------------------------------------------------- Padic

Padic Padic::from_coeffs(RingPtr R, std::vector<mpz_class> coeffs, long shift, long prec_units) {
    if (static_cast<int>(coeffs.size()) != R->dim()) throw DimensionMismatch("coefficient vector length");
    Padic x(R);
    x.c.assign(coeffs.begin(), coeffs.end());
    x.shift = shift;
    x.prec = prec_units;
    x.normalize();
    return x;
}

Padic Padic::integer(RingPtr R, const mpz_class& z, long digits) {
    Padic x(R);
    x.c.assign(R->dim(), mpz_class(0));
    x.c[0] = z;
    x.prec = digits * R->e;
    x.normalize();
    return x;
}

Padic Padic::rational(RingPtr R, const mpq_class& q, long digits) {
    mpz_class num = q.get_num(), den = q.get_den();
    if (num == 0) return integer(R, 0, digits);
    mpz_class pz = R->p;
    long v = static_cast<long>(mpz_remove(num.get_mpz_t(), num.get_mpz_t(), pz.get_mpz_t())) -
             static_cast<long>(mpz_remove(den.get_mpz_t(), den.get_mpz_t(), pz.get_mpz_t()));
    long rel = std::max<long>(1, digits - v);
    const mpz_class& m = R->ppow(rel);
    mpz_class di;
    mpz_invert(di.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    Padic x(R);
    x.c.assign(R->dim(), mpz_class(0));
    x.c[0] = num * di;
    x.shift = v;
    x.prec = digits * R->e;
    x.normalize();
    return x;
}

Padic Padic::uniformizer(RingPtr R, long digits) {
    if (R->e == 1) return integer(R, R->p, digits);
    std::vector<mpz_class> v(R->dim(), 0);
    v[R->f] = 1;
    return from_coeffs(R, std::move(v), 0, digits * R->e);
}

Padic Padic::generator(RingPtr R, long digits) {
    std::vector<mpz_class> v(R->dim(), 0);
    if (R->f == 1)
        v[0] = -R->modulus[0];
    else
        v[1] = 1;
    return from_coeffs(R, std::move(v), 0, digits * R->e);
}

long Padic::digits() const {
    if (prec >= kInf) return kInf;
    return floor_div(prec, R->e);
}

Padic& Padic::normalize() {
    if (c.empty()) {
        shift = 0;
        prec = val = kInf;
        return *this;
    }
    const int e = R->e, f = R->f;
    const long p = R->p;
    bool any = false;
    for (int i = 0; i < e; ++i) {
        long M = ceil_div(prec - i, e) - shift;
        for (int j = 0; j < f; ++j) {
            mpz_class& x = c[i * f + j];
            if (M <= 0) {
                x = 0;
                continue;
            }
            if (x == 0) continue;
            const mpz_class& m = R->ppow(M);
            if (x < 0 || x >= m) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
            if (x != 0) any = true;
        }
    }
    if (!any) {
        shift = 0;
        val = prec;
        return *this;
    }
    while (true) {
        bool div = true;
        for (auto& x : c)
            if (x != 0 && !mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(p))) {
                div = false;
                break;
            }
        if (!div) break;
        for (auto& x : c)
            if (x != 0) mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p));
        ++shift;
    }
    if (e == 1) {
        val = shift;
        return *this;
    }
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < f; ++j) {
            const mpz_class& x = c[i * f + j];
            if (x != 0 && !mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(p))) {
                val = static_cast<long>(e) * shift + i;
                return *this;
            }
        }
    throw std::logic_error("normalize: no unit coefficient after factoring p");
}

Padic Padic::with_prec(long units) const {
    if (c.empty() || units >= prec) return *this;
    Padic x = *this;
    x.prec = units;
    return x.normalize();
}

mpq_class Padic::coeff(int k) const {
    if (c.empty()) return 0;
    mpq_class v(c[k]);
    if (shift >= 0)
        v *= R->ppow(shift);
    else
        v /= R->ppow(-shift);
    v.canonicalize();
    return v;
}

Padic Padic::operator-() const {
    Padic x = *this;
    for (auto& a : x.c) a = -a;
    return x.normalize();
}

Padic& Padic::operator+=(const Padic& b) {
    if (b.c.empty()) return *this;
    if (c.empty()) return *this = b;
    if (R != b.R) throw InvalidInput("ring mismatch in addition");
    long s = std::min(shift, b.shift);
    if (shift > s) {
        const mpz_class& m = R->ppow(shift - s);
        for (auto& a : c) a *= m;
    }
    if (b.shift > s) {
        const mpz_class& m = R->ppow(b.shift - s);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += b.c[k] * m;
    } else {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += b.c[k];
    }
    shift = s;
    prec = std::min(prec, b.prec);
    return normalize();
}

Padic& Padic::operator-=(const Padic& b) { return *this += -b; }

Padic operator*(const Padic& a, const Padic& b) {
    if (a.c.empty()) return a;
    if (b.c.empty()) return b;
    if (a.R != b.R) throw InvalidInput("ring mismatch in multiplication");
    RingPtr R = a.R;
    Padic x(R);
    x.prec = std::min(a.prec + b.val, b.prec + a.val);
    x.shift = a.shift + b.shift;
    if (a.is_zero() || b.is_zero()) {
        x.c.assign(R->dim(), mpz_class(0));
        x.shift = 0;
        return x.normalize();
    }
    const int e = R->e, f = R->f;
    if (e * f == 1) {
        x.c.assign(1, mpz_class(0));
        mpz_mul(x.c[0].get_mpz_t(), a.c[0].get_mpz_t(), b.c[0].get_mpz_t());
        return x.normalize();
    }
    // product in (Z[y]/g)[pi] before reduction: (2e-1) rows of (2f-1)
    const int F2 = 2 * f - 1;
    std::vector<mpz_class> t((2 * e - 1) * F2, 0);
    for (int i1 = 0; i1 < e; ++i1)
        for (int j1 = 0; j1 < f; ++j1) {
            const mpz_class& u = a.c[i1 * f + j1];
            if (u == 0) continue;
            for (int i2 = 0; i2 < e; ++i2)
                for (int j2 = 0; j2 < f; ++j2) {
                    const mpz_class& w = b.c[i2 * f + j2];
                    if (w == 0) continue;
                    mpz_addmul(t[(i1 + i2) * F2 + j1 + j2].get_mpz_t(), u.get_mpz_t(), w.get_mpz_t());
                }
        }
    const auto& g = R->modulus;
    for (int i = 0; i < 2 * e - 1; ++i)
        for (int d = F2 - 1; d >= f; --d) {
            mpz_class& top = t[i * F2 + d];
            if (top == 0) continue;
            mpz_class s = top;
            for (int j = 0; j <= f; ++j) t[i * F2 + d - f + j] -= s * g[j];
        }
    for (int i = 2 * e - 2; i >= e; --i)
        for (int j = 0; j < f; ++j) {
            mpz_class& top = t[i * F2 + j];
            if (top == 0) continue;
            mpz_class s = top;
            top = 0;
            for (int l = 0; l < e; ++l) t[(i - e + l) * F2 + j] -= s * R->eis[l];
        }
    x.c.assign(e * f, mpz_class(0));
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < f; ++j) x.c[i * f + j] = std::move(t[i * F2 + j]);
    return x.normalize();
}

void Padic::addmul_lazy(const Padic& a, const Padic& b) {
    if (a.c.empty() || b.c.empty()) return;
    long pr = std::min(a.prec + b.val, b.prec + a.val);
    if (c.empty()) {
        R = a.R;
        c.assign(1, mpz_class(0));
        shift = a.shift + b.shift;
        prec = pr;
    }
    prec = std::min(prec, pr);
    if (a.is_zero() || b.is_zero()) return;
    long s = a.shift + b.shift;
    if (s >= shift) {
        mpz_class t = a.c[0] * b.c[0];
        if (s > shift) t *= R->ppow(s - shift);
        c[0] += t;
    } else {
        c[0] *= R->ppow(shift - s);
        mpz_addmul(c[0].get_mpz_t(), a.c[0].get_mpz_t(), b.c[0].get_mpz_t());
        shift = s;
    }
}

Padic operator/(const Padic& a, const Padic& b) { return a * b.inv(); }

namespace {

// inverse of an element of valuation 0
Padic unit_inverse(const Padic& u) {
    RingPtr R = u.R;
    const long P = u.prec;
    std::vector<long> r0 = residue(u);
    std::vector<long> ri;
    if (R->f == 1) {
        ri = {fp::inv(r0[0], R->p)};
    } else {
        auto inv = R->residue.inv(r0);
        if (!inv) throw std::logic_error("unit_inverse: residue not invertible");
        ri = *inv;
    }
    std::vector<mpz_class> v(R->dim(), 0);
    for (int j = 0; j < R->f; ++j) v[j] = ri[j];
    Padic x = Padic::from_coeffs(R, v, 0, P);
    std::vector<mpz_class> one(R->dim(), 0);
    one[0] = 1;
    Padic I = Padic::from_coeffs(R, one, 0, P);
    for (int it = 0; it < 256; ++it) {
        Padic d = I - u * x;
        if (d.is_zero()) return x.with_prec(P);
        x += x * d;
    }
    throw std::logic_error("unit_inverse: Newton iteration did not converge");
}

}  // namespace

Padic Padic::inv() const {
    if (is_zero()) throw PrecisionExhausted("inverse of an element indistinguishable from 0");
    const int e = R->e;
    if (R->dim() == 1) {
        long rel = prec - val;
        Padic x(R);
        x.c.assign(1, mpz_class(0));
        mpz_invert(x.c[0].get_mpz_t(), c[0].get_mpz_t(), R->ppow(rel).get_mpz_t());
        x.shift = -shift;
        x.prec = prec - 2 * val;
        return x.normalize();
    }
    long j = val - static_cast<long>(e) * shift;
    Padic w = *this;
    w.shift = 0;
    w.prec = prec - static_cast<long>(e) * shift;
    w.val = j;
    if (j == 0) return unit_inverse(w).mul_p_power(-shift);
    std::vector<mpz_class> pv(R->dim(), 0);
    pv[R->f] = 1;
    Padic pi = from_coeffs(R, pv, 0, w.prec + e);
    Padic pk = pi.pow(e - j);
    Padic z = (w * pk).mul_p_power(-1);
    Padic zi = unit_inverse(z);
    return (zi * pk).mul_p_power(-shift - 1);
}

Padic Padic::pow(long n) const {
    if (n < 0) return inv().pow(-n);
    std::vector<mpz_class> v(R->dim(), 0);
    v[0] = 1;
    Padic result = from_coeffs(R, std::move(v), 0, c.empty() ? R->e * 64L : prec);
    if (n == 0) return result;
    Padic base = *this;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : result * base;
            first = false;
        }
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Padic Padic::mul_p_power(long k) const {
    if (c.empty()) return *this;
    Padic x = *this;
    x.shift += k;
    x.prec += k * R->e;
    x.val += k * R->e;
    return x;
}

std::string Padic::str() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    os << "[";
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? ", " : "") << coeff(static_cast<int>(k)).get_str();
    os << "] + O(p^" << mpq_class(prec, R->e).get_str() << ")";
    return os.str();
}

json Padic::to_json() const {
    json j;
    j["ring"] = R ? R->to_json() : json();
    std::vector<std::string> cs;
    if (R) {
        for (int k = 0; k < R->dim(); ++k) cs.push_back(c.empty() ? "0" : coeff(k).get_str());
    }
    j["coeffs"] = cs;
    if (c.empty()) {
        j["prec"] = "exact";
        j["valuation"] = "inf";
    } else {
        j["prec"] = R->e == 1 ? json(prec) : json(mpq_class(prec, R->e).get_str());
        Valuation v = valuation(*this);
        j["valuation"] = v.exact ? v.v.get_str() : ">= " + v.v.get_str();
    }
    return j;
}

bool agree(const Padic& a, const Padic& b) { return (a - b).is_zero(); }

Padic frobenius(const Padic& x) {
    if (x.c.empty() || x.R->f == 1) return x;
    RingPtr R = x.R;
    const int e = R->e, f = R->f;
    Padic y(R);
    y.c.assign(e * f, mpz_class(0));
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < f; ++j) {
            const mpz_class& a = x.c[i * f + j];
            if (a == 0) continue;
            for (int l = 0; l < f; ++l) mpz_addmul(y.c[i * f + l].get_mpz_t(), a.get_mpz_t(), R->frob[j][l].get_mpz_t());
        }
    y.shift = x.shift;
    y.prec = std::min(x.prec, static_cast<long>(e) * (x.shift + R->cap));
    return y.normalize();
}

Padic frobenius_pow(const Padic& x, long n) {
    int f = x.R ? x.R->f : 1;
    n %= f;
    if (n < 0) n += f;
    Padic y = x;
    for (long i = 0; i < n; ++i) y = frobenius(y);
    return y;
}

Valuation valuation(const Padic& x) {
    if (x.c.empty()) return {false, mpq_class(Padic::kInf)};
    if (x.is_zero()) {
        mpq_class v(x.prec, x.R->e);
        v.canonicalize();
        return {false, v};
    }
    mpq_class v(x.val, x.R->e);
    v.canonicalize();
    return {true, v};
}

std::vector<long> residue(const Padic& x) {
    RingPtr R = x.R;
    std::vector<long> r(R->f, 0);
    if (x.c.empty()) return r;
    if (x.prec < 1) throw PrecisionExhausted("residue of an element known to less than one unit");
    if (x.is_zero()) return r;
    if (x.val < 0) throw InvalidInput("residue of a non-integral element");
    if (x.shift > 0) return r;
    const mpz_class& d = R->ppow(-x.shift);
    for (int j = 0; j < R->f; ++j) {
        mpz_class t = x.c[j];
        if (x.shift < 0) mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), d.get_mpz_t());
        r[j] = mpz_fdiv_ui(t.get_mpz_t(), static_cast<unsigned long>(R->p));
    }
    return r;
}

Padic lift_residue(RingPtr R, const std::vector<long>& r, long digits) {
    std::vector<mpz_class> v(R->dim(), 0);
    for (int j = 0; j < R->f && j < static_cast<int>(r.size()); ++j) v[j] = fp::mod(r[j], R->p);
    return Padic::from_coeffs(R, std::move(v), 0, digits * R->e);
}

namespace {

Padic pow_mpz(const Padic& x, const mpz_class& n) {
    std::vector<mpz_class> v(x.R->dim(), 0);
    v[0] = 1;
    Padic result = Padic::from_coeffs(x.R, std::move(v), 0, x.prec);
    std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    if (n == 0) return result;
    for (std::size_t i = bits; i-- > 0;) {
        result = result * result;
        if (mpz_tstbit(n.get_mpz_t(), i)) result = result * x;
    }
    return result;
}

}  // namespace

Padic teichmuller(RingPtr R, const std::vector<long>& r, long digits) {
    if (R->kind == RingKind::cyclotomic) return embed(teichmuller(unramified_part(R), r, digits), R);
    bool zero = std::all_of(r.begin(), r.end(), [&](long a) { return fp::mod(a, R->p) == 0; });
    if (zero) return Padic::integer(R, 0, digits);
    Padic x = lift_residue(R, r, digits);
    mpz_class qm1 = R->residue.order() - 1;
    Padic one = Padic::one(R, digits);
    Padic q1 = Padic::integer(R, qm1, digits);
    for (int it = 0; it < 128; ++it) {
        Padic t = pow_mpz(x, qm1);
        Padic d = t - one;
        if (d.is_zero()) return x.with_prec(digits * R->e);
        x -= x * d / (q1 * t);
    }
    throw std::logic_error("teichmuller: Hensel iteration did not converge");
}

Padic root_of_unity(RingPtr R, long n, long j, long digits) {
    if (n < 1) throw InvalidInput("root of unity order must be positive");
    long np = n, a = 0;
    while (np % R->p == 0) {
        np /= R->p;
        ++a;
    }
    if (a > 1) throw IncompatibleResidueDegree("zeta_" + std::to_string(n) + " needs p^2-power roots of unity");
    if (a == 1 && R->kind != RingKind::cyclotomic)
        throw IncompatibleResidueDegree("zeta_p needs the cyclotomic ring");
    mpz_class qm1 = R->residue.order() - 1;
    if (!mpz_divisible_ui_p(qm1.get_mpz_t(), static_cast<unsigned long>(np)))
        throw IncompatibleResidueDegree(std::to_string(np) + " does not divide q - 1 for " + R->name());
    long jj = ((j % n) + n) % n;
    Padic z = teichmuller(R, R->residue.element_of_order(np), digits);
    if (a == 1) z = z * (Padic::one(R, digits) + Padic::uniformizer(R, digits));
    return z.pow(jj);
}

Padic embed(const Padic& x, RingPtr S) {
    if (x.R == S) return x;
    if (x.c.empty()) return Padic(S);
    RingPtr R = x.R;
    if (R->p != S->p) throw InvalidInput("embedding between different primes");
    bool scalar = R->dim() == 1;
    bool up = R->e == 1 && S->kind == RingKind::cyclotomic && S->f == R->f;
    if (!scalar && !up) throw InvalidInput("no embedding from " + R->name() + " into " + S->name());
    std::vector<mpz_class> v(S->dim(), 0);
    for (int j = 0; j < R->f; ++j) v[j] = x.c[j];
    if (scalar && R->f == 1 && R->kind == RingKind::unramified && R->modulus[0] != 0)
        throw InvalidInput("unexpected degree-1 modulus");
    return Padic::from_coeffs(S, std::move(v), x.shift, x.prec * S->e / R->e);
}

}  // namespace ltx
