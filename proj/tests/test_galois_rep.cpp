#include <doctest.h>

#include "ltx/errors.hpp"
#include "ltx/galois_rep.hpp"
#include "support.hpp"

using namespace ltx;

namespace {

using IMat = std::vector<std::vector<long>>;

mpz_class ipow_mod(mpz_class b, long e, const mpz_class& m) {
    mpz_class r;
    mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e), m.get_mpz_t());
    return r;
}

long vp(mpz_class x, long p) {
    if (x == 0) return 1000;
    long v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

using ZMat = std::vector<std::vector<mpz_class>>;

ZMat zmul(const ZMat& a, const ZMat& b) {
    std::size_t n = a.size();
    ZMat c(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

ZMat zpow(const IMat& u, long e) {
    std::size_t n = u.size();
    ZMat r(n, std::vector<mpz_class>(n, 0)), b(n, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][i] = 1;
        for (std::size_t j = 0; j < n; ++j) b[i][j] = u[i][j];
    }
    for (long i = 0; i < e; ++i) r = zmul(r, b);
    return r;
}

mpz_class zdet(ZMat a) {
    // fraction-free via rationals
    std::size_t n = a.size();
    std::vector<std::vector<mpq_class>> q(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q[i][j] = a[i][j];
    mpq_class d = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && q[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(q[piv], q[c]);
            d = -d;
        }
        d *= q[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            mpq_class f = q[i][c] / q[c][c];
            for (std::size_t j = c; j < n; ++j) q[i][j] -= f * q[c][j];
        }
    }
    return d.get_num();
}

IMat random_unit_imat(int r, long p) {
    while (true) {
        IMat u(r, std::vector<long>(r));
        for (auto& row : u)
            for (auto& x : row) x = gen::uniform(-20, 20);
        ZMat z(r, std::vector<mpz_class>(r));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) z[i][j] = u[i][j];
        if (zdet(z) % p != 0) return u;
    }
}

// u phi(T) - T, computed without inverting u
long residual_times_u(const PMatrix& T, const PMatrix& u) {
    PMatrix D = embed(u, T.R) * frobenius(T) - T;
    long best = Padic::kInf;
    for (auto& x : D.a)
        if (!x.exact_zero()) best = std::min(best, x.is_zero() ? x.prec : x.val);
    return best;
}

}  // namespace

TEST_SUITE("galois_rep") {
    TEST_CASE("profile examples") {
        auto a = rep_profile(UnramifiedRep::make(3, {{4}}, 20), 1);
        CHECK(a.hyp_F);
        CHECK(a.hyp_T);
        CHECK_FALSE(a.hyp_I);
        CHECK(a.omega == 1);

        auto b = rep_profile(UnramifiedRep::make(3, {{2}}, 20), 1);
        CHECK(b.hyp_I);
        CHECK(b.omega == 0);
        CHECK(b.dtilde == 2);

        auto c = rep_profile(UnramifiedRep::make(3, {{2, 0}, {0, 4}}, 20), 1);
        CHECK(c.mixed);
        CHECK_FALSE(c.hyp_I);
        CHECK_FALSE(c.hyp_T);
        CHECK(c.omega == 1);

        CHECK_THROWS_AS(rep_profile(UnramifiedRep::make(3, {{1}}, 20), 1), PrecisionExhausted);
        CHECK_THROWS_AS(UnramifiedRep::make(3, {{3, 1}, {0, 3}}, 20), NonInvertibleU);
        CHECK_THROWS_AS(rep_profile(UnramifiedRep::make(3, {{2}}, 20), 0), InvalidInput);
    }

    TEST_CASE("profile against integer arithmetic") {
        for (long p : {3L, 5L})
            for (int r = 1; r <= 3; ++r)
                for (int trial = 0; trial < 10; ++trial) {
                    IMat u = random_unit_imat(r, p);
                    long dN = gen::uniform(1, 3);
                    ZMat U = zpow(u, dN);
                    for (int i = 0; i < r; ++i) U[i][i] -= 1;
                    mpz_class d = zdet(U);
                    if (d == 0) continue;
                    auto prof = rep_profile(UnramifiedRep::make(p, u, 30), dN);
                    CAPTURE(p);
                    CAPTURE(r);
                    CHECK(prof.omega == vp(d, p));
                    bool allp = true;
                    for (auto& row : U)
                        for (auto& x : row) allp = allp && x % p == 0;
                    CHECK(prof.hyp_T == allp);
                    CHECK(prof.hyp_I == (d % p != 0));
                    CHECK(int(prof.hyp_I) + int(prof.hyp_T) + int(prof.mixed) == 1);
                    if (prof.hyp_I) CHECK(prof.omega == 0);
                    if (prof.hyp_T) CHECK(prof.omega > 0);

                    // order mod p by brute force, dividing |GL_r(F_p)|
                    long k = 1;
                    while (true) {
                        ZMat P = zpow(u, k);
                        bool id = true;
                        for (int i = 0; i < r; ++i)
                            for (int j = 0; j < r; ++j) id = id && (P[i][j] - (i == j)) % p == 0;
                        if (id) break;
                        ++k;
                    }
                    CHECK(prof.dtilde == k);
                    CHECK(gl_order(p, r) % k == 0);
                }
    }

    TEST_CASE("order modulo p^n") {
        auto rep = UnramifiedRep::make(3, {{2}}, 20);
        for (long n = 1; n <= 8; ++n) {
            mpz_class m = 1;
            for (long i = 0; i < n; ++i) m *= 3;
            long k = 1;
            while (ipow_mod(2, k, m) != 1) ++k;
            CHECK(matrix_order_mod_pn(rep.u, n) == k);
        }
    }

    TEST_CASE("trivial representation") {
        auto rep = UnramifiedRep::make(3, {{1}}, 20);
        auto s = solve_twist_matrix(rep, {});
        CHECK(s.k_final == 1);
        CHECK(s.complete);
        CHECK(s.residual_valuation == 20);
        CHECK(s.ring->dim() == 1);
        CHECK(valuation(s.T(0, 0)).v == 0);
        auto rpt = twist_det_class(rep, 2);
        CHECK(rpt.pass());
        auto eps = epsilon_matrix(rep);
        CHECK(eps.identity_digits == 20);
    }

    TEST_CASE("permutation matrix") {
        auto rep = UnramifiedRep::make(3, {{0, 1}, {1, 0}}, 20);
        for (std::uint64_t seed : {1u, 2u, 7u}) {
            TwistOptions o;
            o.seed = seed;
            auto s = solve_twist_matrix(rep, o);
            CHECK(s.k_final == 2);
            CHECK(s.complete);
            CHECK(residual_times_u(s.T, rep.u) >= 20);
            CHECK(valuation(det(s.T)).v == 0);
        }
        auto rpt = twist_det_class(rep, 3);
        CHECK(rpt.pass());

        auto eps = epsilon_matrix(rep);
        CHECK(eps.identity_digits == 20);
        // conjugates of polynomials in u are rational
        PMatrix uinv = inverse(embed(rep.u, eps.twist.ring));
        PMatrix c = eps.eps * uinv * inverse(eps.eps);
        CHECK(frobenius_fixed_digits(c) == 20);
        PMatrix cb = descend_to_base(c);
        CHECK(agree(det(cb), det(inverse(rep.u))));
        CHECK(agree(cb(0, 0) + cb(1, 1), Padic::integer(rep.u.R, 0, 20)));
    }

    TEST_CASE("finite-order hyp-I conjugates") {
        IMat base = {{0, -1}, {1, -1}};  // order 3
        for (int trial = 0; trial < 6; ++trial) {
            long a = gen::uniform(-4, 4), b = gen::uniform(-4, 4);
            IMat S = {{1, a}, {0, 1}}, Si = {{1, -a}, {0, 1}};
            IMat L = {{1, 0}, {b, 1}}, Li = {{1, 0}, {-b, 1}};
            auto prod = [](const IMat& x, const IMat& y) {
                IMat z(2, std::vector<long>(2, 0));
                for (int i = 0; i < 2; ++i)
                    for (int k = 0; k < 2; ++k)
                        for (int j = 0; j < 2; ++j) z[i][j] += x[i][k] * y[k][j];
                return z;
            };
            IMat u = prod(prod(prod(L, S), base), prod(Si, Li));
            auto rep = UnramifiedRep::make(5, u, 20);
            CHECK(rep_profile(rep, 1).hyp_I);
            TwistOptions o;
            o.seed = 100 + trial;
            auto s = solve_twist_matrix(rep, o);
            CHECK(s.k_final == 3);
            CHECK(residual_times_u(s.T, rep.u) >= 20);
            CHECK(twist_det_class(rep, 2, o).pass());
        }
    }

    TEST_CASE("infinite order needs the completion") {
        auto rep = UnramifiedRep::make(3, {{2}}, 20);
        CHECK_THROWS_AS(solve_twist_matrix(rep, {}), DegreeBudgetExceeded);
        TwistOptions o;
        o.allow_partial = true;
        o.max_degree = 54;
        auto s = solve_twist_matrix(rep, o);
        CHECK_FALSE(s.complete);
        CHECK(s.k_final == 54);
        long expect = vp(ipow_mod(2, 54, mpz_class("3486784401")) - 1, 3);
        CHECK(s.residual_valuation == expect);
        CHECK(residual_times_u(s.T, rep.u) == expect);

        o.max_degree = 2;
        auto low = solve_twist_matrix(rep, o);
        CHECK(low.k_final == 2);
        CHECK(low.residual_valuation == 1);
        auto eps = epsilon_from_twist(rep, low);
        CHECK(eps.identity_digits == 1);
    }

    TEST_CASE("residue step on random matrices") {
        for (int trial = 0; trial < 8; ++trial) {
            IMat u = random_unit_imat(2, 3);
            auto rep = UnramifiedRep::make(3, u, 10);
            TwistOptions o;
            o.allow_partial = true;
            o.max_degree = rep_profile(rep, 1).dtilde;
            o.seed = trial;
            auto s = solve_twist_matrix(rep, o);
            CHECK(residual_times_u(s.T, rep.u) >= 1);
            CHECK(valuation(det(s.T)).v == 0);
        }
    }

    TEST_CASE("commuting draw keeps diagonal matrices diagonal") {
        auto rep = UnramifiedRep::make(3, {{2, 0}, {0, 4}}, 20);
        TwistOptions o;
        o.allow_partial = true;
        o.commuting = true;
        o.max_degree = 2;
        auto s = solve_twist_matrix(rep, o);
        CHECK(s.T(0, 1).is_zero());
        CHECK(s.T(1, 0).is_zero());
        CHECK(s.residual_valuation >= 1);
    }
}
