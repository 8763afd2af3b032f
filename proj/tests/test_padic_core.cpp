#include <doctest.h>

#include "ltx/errors.hpp"
#include "ltx/padic.hpp"
#include "support.hpp"

using namespace ltx;

namespace {

// schoolbook product in Z[y]/(g) mod p^N, independent of the ring code
std::vector<mpz_class> naive_mul(RingPtr R, const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                 long N) {
    int f = R->f;
    std::vector<mpz_class> t(2 * f, 0);
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j) t[i + j] += a[i] * b[j];
    for (int d = 2 * f - 1; d >= f; --d) {
        mpz_class s = t[d];
        for (int j = 0; j <= f; ++j) t[d - f + j] -= s * R->modulus[j];
    }
    t.resize(f);
    mpz_class m = R->ppow(N);
    for (auto& x : t) x = ((x % m) + m) % m;
    return t;
}

// Teichmuller lift by the slow fixed-point iteration x -> x^q
Padic teich_by_powering(RingPtr R, const std::vector<long>& r, long N) {
    Padic x = lift_residue(R, r, N);
    mpz_class q = R->residue.order();
    for (long i = 0; i < N + 2; ++i) {
        Padic y = x;
        for (int k = 0; k < R->f; ++k) y = y.pow(R->p);
        x = y;
    }
    return x;
}

}  // namespace

TEST_SUITE("padic_core") {
    TEST_CASE("ring construction") {
        RingPtr Z3 = make_ring(3, RingKind::base, 1);
        CHECK(Z3->e == 1);
        CHECK(Z3->f == 1);
        RingPtr Z9 = make_ring(3, RingKind::unramified, 2);
        CHECK(fp::is_irreducible(fp::Poly(Z9->modulus.size()), 3) == false);
        fp::Poly g;
        for (auto& c : Z9->modulus) g.push_back(c.get_si());
        CHECK(fp::is_irreducible(g, 3));
        CHECK(g == fp::Poly{1, 0, 1});  // x^2 + 1
        RingPtr C5 = make_ring(5, RingKind::cyclotomic, 1);
        CHECK(C5->e == 4);
        Valuation v = valuation(Padic::uniformizer(C5, 10));
        CHECK(v.exact);
        CHECK(v.v == mpq_class(1, 4));
        CHECK(make_ring(3, RingKind::unramified, 2) == Z9);
        CHECK_THROWS_AS(make_ring(9, RingKind::base, 1), InvalidInput);
        CHECK_THROWS_AS(make_ring(2, RingKind::base, 1), InvalidInput);
        CHECK_THROWS_AS(make_ring(3, RingKind::unramified, 0), InvalidInput);
    }

    TEST_CASE("least irreducible polynomials are irreducible and minimal") {
        for (long p : {3L, 5L, 7L})
            for (int k = 1; k <= 4; ++k) {
                fp::Poly g = fp::least_irreducible(p, k);
                CHECK(fp::is_irreducible(g, p));
                // brute force: no monic polynomial earlier in the order has no roots and is irreducible
                if (k == 2) {
                    for (long a1 = 0; a1 <= g[1]; ++a1)
                        for (long a0 = 1; a0 < p; ++a0) {
                            if (a1 == g[1] && a0 >= g[0]) break;
                            bool has_root = false;
                            for (long x = 0; x < p; ++x) has_root |= fp::mod(x * x + a1 * x + a0, p) == 0;
                            CHECK(has_root);
                        }
                }
            }
    }

    TEST_CASE("multiplication matches schoolbook product") {
        for (int k : {2, 3}) {
            RingPtr R = make_ring(5, RingKind::unramified, k);
            for (int t = 0; t < 30; ++t) {
                std::vector<mpz_class> a(k), b(k);
                for (auto& x : a) x = gen::big_below(R->ppow(20));
                for (auto& x : b) x = gen::big_below(R->ppow(20));
                Padic A = Padic::from_coeffs(R, a, 0, 20), B = Padic::from_coeffs(R, b, 0, 20);
                Padic C = A * B;
                auto want = naive_mul(R, a, b, 20);
                Padic W = Padic::from_coeffs(R, want, 0, 20);
                CHECK(agree(C.with_prec(20), W));
            }
        }
    }

    TEST_CASE("ring axioms and inverses on random samples") {
        for (RingPtr R : {make_ring(3, RingKind::base, 1), make_ring(3, RingKind::unramified, 2),
                          make_ring(3, RingKind::cyclotomic, 2), make_ring(5, RingKind::cyclotomic, 1)}) {
            for (int t = 0; t < 30; ++t) {
                Padic a = gen::element(R, 20), b = gen::element(R, 20), c = gen::element(R, 20);
                CHECK(agree((a + b) * c, a * c + b * c));
                CHECK(agree(a * b, b * a));
                CHECK(agree((a * b) * c, a * (b * c)));
                if (!a.is_zero()) {
                    Padic ai = a.inv();
                    CHECK(agree(a * ai, Padic::one(R, 20)));
                }
            }
        }
    }

    TEST_CASE("valuations") {
        for (RingPtr R : {make_ring(3, RingKind::base, 1), make_ring(5, RingKind::unramified, 2),
                          make_ring(3, RingKind::cyclotomic, 1), make_ring(7, RingKind::cyclotomic, 1)}) {
            CHECK(valuation(Padic::integer(R, R->p, 20)).v == 1);
            Padic u = gen::unit(R, 20);
            Padic x = u * Padic::integer(R, R->p * R->p, 20);
            CHECK(valuation(x).exact);
            CHECK(valuation(x).v == 2);
            for (int t = 0; t < 20; ++t) {
                Padic a = gen::element(R, 15, gen::uniform(0, 3));
                Padic b = gen::element(R, 15, gen::uniform(0, 3));
                Valuation va = valuation(a), vb = valuation(b), vab = valuation(a * b);
                if (va.exact && vb.exact) {
                    CHECK(vab.exact);
                    CHECK(vab.v == va.v + vb.v);
                }
            }
            if (R->kind == RingKind::cyclotomic) {
                Valuation vz = valuation(root_of_unity(R, R->p, 1, 20) - Padic::one(R, 20));
                CHECK(vz.v == mpq_class(1, R->p - 1));
            }
        }
        RingPtr Z3 = make_ring(3, RingKind::base, 1);
        Valuation vz = valuation(Padic::integer(Z3, 0, 12));
        CHECK_FALSE(vz.exact);
        CHECK(vz.v == 12);
    }

    TEST_CASE("precision propagation") {
        RingPtr R = make_ring(3, RingKind::base, 1);
        Padic a = Padic::integer(R, 9, 10), b = Padic::integer(R, 5, 20);
        CHECK((a + b).prec == 10);
        Padic ab = a * b;
        CHECK(ab.prec >= std::min(a.prec + b.val, b.prec + a.val));
        Padic x = Padic::rational(R, mpq_class(1, 3), 10);
        CHECK(x.val == -1);
        CHECK(agree(x * Padic::integer(R, 3, 10), Padic::one(R, 9)));
        // inverting p^2 u loses twice the valuation
        Padic y = Padic::integer(R, 9 * 2, 20).inv();
        CHECK(y.prec == 20 - 4);
    }

    TEST_CASE("higher precision agrees on every claimed digit") {
        for (RingPtr R : {make_ring(3, RingKind::unramified, 2), make_ring(3, RingKind::cyclotomic, 1)}) {
            for (int t = 0; t < 20; ++t) {
                std::vector<mpz_class> a(R->dim()), b(R->dim());
                for (auto& x : a) x = gen::big_below(R->ppow(40));
                for (auto& x : b) x = gen::big_below(R->ppow(40));
                auto run = [&](long N) {
                    Padic A = Padic::from_coeffs(R, a, 1, N * R->e), B = Padic::from_coeffs(R, b, 0, N * R->e);
                    return (A * B + frobenius(A)) / (B + Padic::one(R, N));
                };
                Padic lo = run(20), hi = run(30);
                if (!lo.is_zero()) CHECK(agree(lo, hi.with_prec(lo.prec)));
            }
        }
    }

    TEST_CASE("frobenius") {
        RingPtr Z3 = make_ring(3, RingKind::base, 1);
        Padic x = gen::element(Z3, 20);
        CHECK(agree(frobenius(x), x));
        for (int k : {2, 3, 4}) {
            RingPtr R = make_ring(3, RingKind::unramified, k);
            for (int t = 0; t < 50; ++t) {
                Padic a = gen::element(R, 20), b = gen::element(R, 20);
                CHECK(agree(frobenius_pow(a, k), a));
                CHECK(agree(frobenius(a + b), frobenius(a) + frobenius(b)));
                CHECK(agree(frobenius(a * b), frobenius(a) * frobenius(b)));
                CHECK(residue(frobenius(a)) == R->residue.pow(residue(a), 3));
            }
        }
        RingPtr C = make_ring(3, RingKind::cyclotomic, 2);
        Padic zeta = root_of_unity(C, 3, 1, 20);
        CHECK(agree(frobenius(zeta), zeta));
    }

    TEST_CASE("teichmuller lifts") {
        RingPtr R = make_ring(3, RingKind::unramified, 2);
        CHECK(agree(teichmuller(R, {1, 0}, 20), Padic::one(R, 20)));
        CHECK(teichmuller(R, {0, 0}, 20).is_zero());
        std::vector<long> g = R->residue.element_of_order(8);
        Padic t = teichmuller(R, g, 20);
        CHECK(agree(t.pow(8), Padic::one(R, 20)));
        CHECK_FALSE(agree(t.pow(4), Padic::one(R, 20)));
        CHECK(agree(t, teich_by_powering(R, g, 20)));
        CHECK(agree(frobenius(t), teichmuller(R, R->residue.pow(g, 3), 20)));
        for (int s = 0; s < 20; ++s) {
            auto c1 = gen::residue_element(R), c2 = gen::residue_element(R);
            CHECK(agree(teichmuller(R, R->residue.mul(c1, c2), 20), teichmuller(R, c1, 20) * teichmuller(R, c2, 20)));
        }
    }

    TEST_CASE("roots of unity in the cyclotomic ring") {
        RingPtr C = make_ring(3, RingKind::cyclotomic, 2);
        Padic z8 = root_of_unity(C, 8, 1, 20);
        CHECK(agree(z8.pow(8), Padic::one(C, 20)));
        Padic z24 = root_of_unity(C, 24, 1, 20);
        CHECK(agree(z24.pow(24), Padic::one(C, 20)));
        CHECK_FALSE(agree(z24.pow(8), Padic::one(C, 20)));
        CHECK_FALSE(agree(z24.pow(12), Padic::one(C, 20)));
        CHECK(agree(root_of_unity(C, 2, 1, 20), -Padic::one(C, 20)));
        CHECK_THROWS_AS(root_of_unity(make_ring(3, RingKind::base, 1), 3, 1, 20), IncompatibleResidueDegree);
        CHECK_THROWS_AS(root_of_unity(C, 5, 1, 20), IncompatibleResidueDegree);
    }
}
