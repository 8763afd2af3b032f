#include "ltx/fp.hpp"

#include <stdexcept>

namespace ltx::fp {

long mod(long a, long p) {
    a %= p;
    return a < 0 ? a + p : a;
}

long inv(long a, long p) {
    long t = 0, nt = 1, r = p, nr = mod(a, p);
    while (nr != 0) {
        long q = r / nr;
        long tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::domain_error("fp::inv: not invertible");
    return mod(t, p);
}

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly add(const Poly& a, const Poly& b, long p) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = mod(c[i] + b[i], p);
    trim(c);
    return c;
}

Poly sub(const Poly& a, const Poly& b, long p) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = mod(c[i] - b[i], p);
    trim(c);
    return c;
}

Poly mul(const Poly& a, const Poly& b, long p) {
    if (a.empty() || b.empty()) return {};
    std::vector<long long> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            acc[i + j] += static_cast<long long>(a[i]) * b[j];
            if (acc[i + j] > (1LL << 60)) acc[i + j] %= p;
        }
    }
    Poly c(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) c[i] = static_cast<long>(acc[i] % p);
    trim(c);
    return c;
}

Poly scale(const Poly& a, long s, long p) {
    Poly c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = mod(a[i] * s, p);
    trim(c);
    return c;
}

void divrem(const Poly& a, const Poly& g, long p, Poly& q, Poly& r) {
    if (g.empty()) throw std::domain_error("fp::divrem: division by zero");
    r = a;
    trim(r);
    q.clear();
    long lead_inv = inv(g.back(), p);
    std::size_t dg = g.size() - 1;
    if (r.size() < g.size()) return;
    q.assign(r.size() - dg, 0);
    for (std::size_t i = r.size(); i-- > dg;) {
        long t = mod(r[i] * lead_inv, p);
        if (t == 0) continue;
        q[i - dg] = t;
        for (std::size_t j = 0; j <= dg; ++j) r[i - dg + j] = mod(r[i - dg + j] - t * g[j], p);
    }
    trim(r);
    trim(q);
}

Poly rem(const Poly& a, const Poly& g, long p) {
    Poly q, r;
    divrem(a, g, p, q, r);
    return r;
}

Poly gcd(Poly a, Poly b, long p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) a = scale(a, inv(a.back(), p), p);
    return a;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& g, long p) { return rem(mul(a, b, p), g, p); }

Poly powmod(const Poly& a, const mpz_class& e, const Poly& g, long p) {
    Poly result{1};
    result = rem(result, g, p);
    Poly base = rem(a, g, p);
    std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return result;
    for (std::size_t i = bits; i-- > 0;) {
        result = mulmod(result, result, g, p);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = mulmod(result, base, g, p);
    }
    return result;
}

std::optional<Poly> invmod(const Poly& a, const Poly& g, long p) {
    Poly r0 = g, r1 = rem(a, g, p);
    Poly s0{}, s1{1};
    while (!r1.empty()) {
        Poly q, r;
        divrem(r0, r1, p, q, r);
        Poly s = sub(s0, mul(q, s1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r0.size() != 1) return std::nullopt;
    return rem(scale(s0, inv(r0[0], p), p), g, p);
}

bool is_irreducible(const Poly& g, long p) {
    if (g.size() < 2) return false;
    int k = static_cast<int>(g.size()) - 1;
    if (k == 1) return true;
    if (g[0] == 0) return false;
    Poly x{0, 1};
    Poly h = x;
    mpz_class pz = p;
    for (int i = 1; 2 * i <= k; ++i) {
        h = powmod(h, pz, g, p);
        Poly d = gcd(sub(h, x, p), g, p);
        if (d.size() > 1) return false;
    }
    return true;
}

Poly least_irreducible(long p, int k) {
    if (k < 1) throw std::invalid_argument("least_irreducible: degree must be positive");
    if (k == 1) return Poly{0, 1};
    Poly g(k + 1, 0);
    g[k] = 1;
    // counter over (a_0, ..., a_{k-1}) with a_0 least significant
    while (true) {
        std::size_t i = 0;
        while (i < static_cast<std::size_t>(k)) {
            if (++g[i] < p) break;
            g[i] = 0;
            ++i;
        }
        if (i == static_cast<std::size_t>(k)) throw std::logic_error("least_irreducible: exhausted");
        if (g[0] != 0 && is_irreducible(g, p)) return g;
    }
}

Mat mat_identity(std::size_t n) {
    Mat m(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Mat mat_mul(const Mat& a, const Mat& b, long p) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    Mat c(n, std::vector<long>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            long x = a[i][l];
            if (x == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] = (c[i][j] + x * b[l][j]) % p;
        }
    return c;
}

long mat_det(Mat a, long p) {
    std::size_t n = a.size();
    long det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && mod(a[piv][col], p) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = mod(-det, p);
        }
        long pv = mod(a[col][col], p);
        det = mod(det * pv, p);
        long pinv = inv(pv, p);
        for (std::size_t r = col + 1; r < n; ++r) {
            long f = mod(a[r][col] * pinv, p);
            if (f == 0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] = mod(a[r][c] - f * a[col][c], p);
        }
    }
    return det;
}

std::size_t mat_rank(Mat a, long p) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0, rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && mod(a[piv][col], p) == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rank]);
        long pinv = inv(a[rank][col], p);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            long f = mod(a[r][col] * pinv, p);
            if (f == 0) continue;
            for (std::size_t c = col; c < cols; ++c) a[r][c] = mod(a[r][c] - f * a[rank][c], p);
        }
        ++rank;
    }
    return rank;
}

std::optional<Mat> mat_inverse(Mat a, long p) {
    std::size_t n = a.size();
    Mat b = mat_identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && mod(a[piv][col], p) == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        long pinv = inv(a[col][col], p);
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] = mod(a[col][c] * pinv, p);
            b[col][c] = mod(b[col][c] * pinv, p);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            long f = mod(a[r][col], p);
            if (f == 0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] = mod(a[r][c] - f * a[col][c], p);
                b[r][c] = mod(b[r][c] - f * b[col][c], p);
            }
        }
    }
    return b;
}

std::optional<std::vector<long>> mat_solve(Mat a, std::vector<long> b, long p) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::vector<std::size_t> pivcol;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && mod(a[piv][col], p) == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rank]);
        std::swap(b[piv], b[rank]);
        long pinv = inv(a[rank][col], p);
        for (std::size_t c = col; c < cols; ++c) a[rank][c] = mod(a[rank][c] * pinv, p);
        b[rank] = mod(b[rank] * pinv, p);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            long f = mod(a[r][col], p);
            if (f == 0) continue;
            for (std::size_t c = col; c < cols; ++c) a[r][c] = mod(a[r][c] - f * a[rank][c], p);
            b[r] = mod(b[r] - f * b[rank], p);
        }
        pivcol.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < rows; ++r)
        if (mod(b[r], p) != 0) return std::nullopt;
    std::vector<long> x(cols, 0);
    for (std::size_t i = 0; i < rank; ++i) x[pivcol[i]] = b[i];
    return x;
}

Field::Field(long p_, Poly g_) : p(p_), k(static_cast<int>(g_.size()) - 1), g(std::move(g_)) {
    frob.assign(k, std::vector<long>(k, 0));
    Poly x{0, 1};
    mpz_class pz = p;
    Poly yp = powmod(x, pz, g, p);
    Poly col{1};
    for (int j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < col.size(); ++i) frob[i][j] = col[i];
        col = mulmod(col, yp, g, p);
    }
}

std::vector<long> Field::canon(const Poly& a) const {
    Poly r = rem(a, g, p);
    std::vector<long> v(k, 0);
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = r[i];
    return v;
}

Poly Field::poly(const std::vector<long>& v) const {
    Poly a(v.begin(), v.end());
    for (auto& x : a) x = mod(x, p);
    trim(a);
    return a;
}

std::vector<long> Field::mul(const std::vector<long>& a, const std::vector<long>& b) const {
    return canon(fp::mul(poly(a), poly(b), p));
}

std::vector<long> Field::add(const std::vector<long>& a, const std::vector<long>& b) const {
    std::vector<long> c(k);
    for (int i = 0; i < k; ++i) c[i] = mod(a[i] + b[i], p);
    return c;
}

std::vector<long> Field::sub(const std::vector<long>& a, const std::vector<long>& b) const {
    std::vector<long> c(k);
    for (int i = 0; i < k; ++i) c[i] = mod(a[i] - b[i], p);
    return c;
}

std::vector<long> Field::pow(const std::vector<long>& a, const mpz_class& e) const {
    return canon(powmod(poly(a), e, g, p));
}

std::optional<std::vector<long>> Field::inv(const std::vector<long>& a) const {
    auto r = invmod(poly(a), g, p);
    if (!r) return std::nullopt;
    return canon(*r);
}

std::vector<long> Field::apply_frob(const std::vector<long>& a) const {
    std::vector<long> c(k, 0);
    for (int i = 0; i < k; ++i) {
        long s = 0;
        for (int j = 0; j < k; ++j) s = (s + frob[i][j] * mod(a[j], p)) % p;
        c[i] = s;
    }
    return c;
}

bool Field::is_zero(const std::vector<long>& a) const {
    for (long x : a)
        if (mod(x, p) != 0) return false;
    return true;
}

std::vector<long> Field::one() const {
    std::vector<long> v(k, 0);
    v[0] = 1;
    return v;
}

long Field::trace(const std::vector<long>& a) const {
    std::vector<long> s = zero(), x = a;
    for (int i = 0; i < k; ++i) {
        s = add(s, x);
        x = apply_frob(x);
    }
    for (int i = 1; i < k; ++i)
        if (s[i] != 0) throw std::logic_error("Field::trace: not in F_p");
    return s[0];
}

mpz_class Field::order() const {
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
    return q;
}

namespace {
std::vector<long> prime_factors(long n) {
    std::vector<long> f;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            f.push_back(d);
            while (n % d == 0) n /= d;
        }
    if (n > 1) f.push_back(n);
    return f;
}
}  // namespace

std::vector<long> Field::element_of_order(long n) const {
    mpz_class qm1 = order() - 1;
    if (n <= 0 || !mpz_divisible_ui_p(qm1.get_mpz_t(), static_cast<unsigned long>(n)))
        throw std::domain_error("element_of_order: order does not divide q-1");
    if (n == 1) return one();
    mpz_class cof = qm1 / n;
    auto primes = prime_factors(n);
    // enumerate nonzero field elements in counting order
    std::vector<long> a(k, 0);
    while (true) {
        std::size_t i = 0;
        while (i < static_cast<std::size_t>(k)) {
            if (++a[i] < p) break;
            a[i] = 0;
            ++i;
        }
        if (i == static_cast<std::size_t>(k)) break;
        auto b = pow(a, cof);
        bool ok = true;
        for (long l : primes) {
            auto c = pow(b, mpz_class(n / l));
            if (c == one()) {
                ok = false;
                break;
            }
        }
        if (ok) return b;
    }
    throw std::logic_error("element_of_order: none found");
}

long Field::mult_order(const std::vector<long>& a) const {
    if (is_zero(a)) return 0;
    auto x = a;
    for (long n = 1; n <= 1000000; ++n) {
        if (x == one()) return n;
        x = mul(x, a);
    }
    return -1;
}

}  // namespace ltx::fp
