#include <doctest.h>

#include <complex>

#include "ltx/characters.hpp"
#include "ltx/errors.hpp"
#include "support.hpp"

using namespace ltx;

namespace {

using cd = std::complex<double>;

cd numeric(const CycloNumber& x) {
    cd z = std::polar(1.0, 2 * M_PI / static_cast<double>(x.n)), acc = 0, pw = 1;
    for (auto& a : x.c) {
        acc += a.get_d() * pw;
        pw *= z;
    }
    return acc;
}

CycloNumber random_cyclo(long n) {
    CycloNumber x = CycloNumber::rational(n, 0);
    for (long k = 0; k < n; ++k) x = x + mpq_class(gen::uniform(-5, 5), gen::uniform(1, 4)) * CycloNumber::zeta(n, k);
    return x;
}

CycloNumber random_integral(long n) {
    CycloNumber x = CycloNumber::rational(n, 0);
    for (long k = 0; k < n; ++k) x = x + mpq_class(gen::uniform(-9, 9)) * CycloNumber::zeta(n, k);
    return x;
}

}  // namespace

TEST_SUITE("characters") {
    TEST_CASE("cyclotomic polynomials") {
        auto as_long = [](long n) {
            std::vector<long> v;
            for (auto& a : CycloNumber::cyclotomic_poly(n)) v.push_back(a.get_si());
            return v;
        };
        CHECK(as_long(1) == std::vector<long>{-1, 1});
        CHECK(as_long(12) == std::vector<long>{1, 0, -1, 0, 1});
        CHECK(as_long(15) == std::vector<long>{1, -1, 0, 1, -1, 1, 0, -1, 1});
        for (long n = 1; n <= 40; ++n) {
            // prod_{d | n} Phi_d = x^n - 1
            std::vector<mpz_class> prod{1};
            for (long d = 1; d <= n; ++d) {
                if (n % d) continue;
                auto& g = CycloNumber::cyclotomic_poly(d);
                std::vector<mpz_class> next(prod.size() + g.size() - 1, 0);
                for (std::size_t i = 0; i < prod.size(); ++i)
                    for (std::size_t j = 0; j < g.size(); ++j) next[i + j] += prod[i] * g[j];
                prod = next;
            }
            std::vector<mpz_class> expect(n + 1, 0);
            expect[0] = -1;
            expect[n] = 1;
            CHECK(prod == expect);
        }
    }

    TEST_CASE("field arithmetic") {
        for (long n : {1L, 2L, 3L, 8L, 12L, 15L, 24L, 42L}) {
            CAPTURE(n);
            CHECK(CycloNumber::zeta(n, 1).pow(n) == CycloNumber::rational(n, 1));
            CycloNumber s = CycloNumber::rational(n, 0);
            for (long k = 0; k < n; ++k) s = s + CycloNumber::zeta(n, k);
            CHECK(s == CycloNumber::rational(n, n == 1 ? 1 : 0));
            for (int t = 0; t < 5; ++t) {
                CycloNumber a = random_cyclo(n), b = random_cyclo(n);
                CHECK(std::abs(numeric(a * b) - numeric(a) * numeric(b)) < 1e-6);
                CHECK(std::abs(numeric(a.conj()) - std::conj(numeric(a))) < 1e-9);
                for (long j = 1; j < n; ++j) {
                    if (std::gcd(j, n) != 1) continue;
                    CHECK((a * b).sigma(j) == a.sigma(j) * b.sigma(j));
                    CHECK((a + b).sigma(j) == a.sigma(j) + b.sigma(j));
                }
                if (!a.is_zero()) CHECK(a * a.inverse() == CycloNumber::rational(n, 1));
            }
        }
        // mixing conductors
        CHECK(CycloNumber::zeta(4, 1) * CycloNumber::zeta(6, 1) == CycloNumber::zeta(12, 5));
        CHECK_THROWS_AS(CycloNumber::zeta(6, 1).sigma(3), InvalidInput);
    }

    TEST_CASE("character tables") {
        auto triv = characters_of(AbelianGroup::make({}));
        REQUIRE(triv.size() == 1);
        CHECK(triv[0].trivial());

        auto Z2 = AbelianGroup::make({2}, {"b"});
        auto c2 = characters_of(Z2);
        REQUIRE(c2.size() == 2);
        CHECK(c2[0].value(Z2, {1}) == CycloNumber::rational(1, 1));
        CHECK(c2[1].value(Z2, {1}) == CycloNumber::rational(1, -1));

        for (auto G : {AbelianGroup::make({3, 2}), AbelianGroup::make({4, 2}), AbelianGroup::make({5, 2}),
                       AbelianGroup::make({3, 3})}) {
            auto chis = characters_of(G);
            CHECK(static_cast<long>(chis.size()) == G.order());
            for (std::size_t i = 0; i < chis.size(); ++i)
                for (std::size_t j = 0; j < chis.size(); ++j)
                    CHECK(inner_sum(G, chis[i], chis[j]) == CycloNumber::rational(1, i == j ? G.order() : 0));
            // multiplicativity
            auto els = G.elements();
            for (auto& chi : chis)
                for (int t = 0; t < 10; ++t) {
                    auto& g = els[gen::uniform(0, G.order() - 1)];
                    auto& h = els[gen::uniform(0, G.order() - 1)];
                    CHECK(chi.value(G, G.add(g, h)) == chi.value(G, g) * chi.value(G, h));
                }
        }
    }

    TEST_CASE("restriction multiplicities") {
        auto G = AbelianGroup::make({6}, {"g"});
        auto H = Subgroup::make(G, AbelianGroup::make({3}), {{2}});
        auto chis = characters_of(G);
        for (auto& psi : characters_of(H.H)) {
            int total = 0;
            for (auto& chi : chis) total += restriction_multiplicity(G, H, chi, psi);
            CHECK(total == 2);
            CHECK(total == H.index(G));
        }
        auto full = Subgroup::make(G, G, {{1}});
        for (std::size_t i = 0; i < chis.size(); ++i)
            for (std::size_t j = 0; j < chis.size(); ++j)
                CHECK(restriction_multiplicity(G, full, chis[i], chis[j]) == (i == j ? 1 : 0));
        auto trivial = Subgroup::make(G, AbelianGroup::make({}), {});
        for (auto& chi : chis) CHECK(restriction_multiplicity(G, trivial, chi, characters_of(trivial.H)[0]) == 1);

        // Frobenius reciprocity against a direct count over H
        auto G2 = AbelianGroup::make({4, 2});
        auto H2 = Subgroup::make(G2, AbelianGroup::make({2, 2}), {{2, 0}, {0, 1}});
        for (auto& chi : characters_of(G2))
            for (auto& psi : characters_of(H2.H)) {
                CycloNumber s = CycloNumber::rational(4, 0);
                for (auto& h : H2.H.elements()) s = s + chi.value(G2, G2.reduce(H2.map(h))) * psi.value(H2.H, h).conj();
                CHECK(s == CycloNumber::rational(1, H2.H.order() * restriction_multiplicity(G2, H2, chi, psi)));
            }
        CHECK_THROWS_AS(Subgroup::make(G, AbelianGroup::make({2}), {{3}, {1}}), DimensionMismatch);
        CHECK_THROWS_AS(Subgroup::make(G, AbelianGroup::make({4}), {{1}}), InvalidInput);
    }

    TEST_CASE("conductor bookkeeping") {
        for (long p : {3L, 5L, 7L})
            for (auto& inst : conductor_instances(p)) {
                CAPTURE(inst.name);
                auto rpt = conductor_identity_check(inst.G, inst.H, inst.data);
                CHECK(rpt.pass());
                auto bad = inst.data;
                bad.m_psi[0] += 1;
                CHECK_THROWS_AS(conductor_identity_check(inst.G, inst.H, bad), InconsistentConductorData);
            }
        auto inst = conductor_instances(3)[2];
        inst.data.m_chi.back() = 0;
        CHECK_THROWS_AS(conductor_identity_check(inst.G, inst.H, inst.data), InconsistentConductorData);
    }

    TEST_CASE("Gauss sums") {
        CHECK(gauss_sum(3, 1, 0) == CycloNumber::rational(1, -1));
        CycloNumber g3 = gauss_sum(3, 1, 1);
        CHECK(g3 * g3 == CycloNumber::rational(1, -3));
        for (auto [p, f] : {std::pair<long, int>{3, 1}, {5, 1}, {7, 1}, {3, 2}}) {
            long q = f == 1 ? p : p * p;
            for (long j = 1; j < q - 1; ++j) {
                CAPTURE(q);
                CAPTURE(j);
                CycloNumber g = gauss_sum(p, f, j);
                CHECK(g.n == (q - 1) * p);
                CHECK(g * g.conj() == CycloNumber::rational(1, q));
                // chi-bar by exponent, and by the automorphism fixing zeta_p and inverting zeta_{q-1}
                CycloNumber gbar = gauss_sum(p, f, q - 1 - j);
                CHECK(g * gbar == CycloNumber::rational(1, j % 2 ? -q : q));
                long t = 0;
                while ((t % (q - 1)) != q - 2 || t % p != 1) ++t;
                CHECK(g.sigma(t) == gbar);
                CHECK(std::abs(std::abs(numeric(g)) - std::sqrt(static_cast<double>(q))) < 1e-9);
            }
        }
        CycloNumber half = CycloNumber::rational(1, mpq_class(1, 2));
        CHECK(gauss_sum(5, 1, 2, half) == mpq_class(1, 2) * gauss_sum(5, 1, 2));
        CHECK_THROWS_AS(gauss_sum(5, 1, 4), InvalidInput);
    }

    TEST_CASE("local embeddings") {
        RingPtr S = make_ring(3, RingKind::unramified, 2);
        CHECK(agree(embed_local(CycloNumber::rational(1, 1), S, 20), Padic::one(S, 20)));
        CHECK(agree(embed_local(CycloNumber::zeta(2, 1), S, 20), Padic::integer(S, -1, 20)));
        Padic z8 = embed_local(CycloNumber::zeta(8, 1), S, 20);
        CHECK(agree(z8.pow(8), Padic::one(S, 20)));
        CHECK(agree(z8.pow(4), Padic::integer(S, -1, 20)));
        for (int t = 0; t < 10; ++t) {
            CycloNumber a = random_integral(8), b = random_integral(8);
            CHECK(agree(embed_local(a * b, S, 20), embed_local(a, S, 20) * embed_local(b, S, 20)));
            CHECK(agree(embed_local(a.sigma(3), S, 20), frobenius(embed_local(a, S, 20))));
        }
        RingPtr C = make_ring(3, RingKind::cyclotomic, 2);
        Padic z24 = embed_local(CycloNumber::zeta(24, 1), C, 20);
        CHECK(agree(z24.pow(24), Padic::one(C, 20)));
        CHECK_FALSE(agree(z24.pow(12), Padic::one(C, 20)));
        CHECK_FALSE(agree(z24.pow(8), Padic::one(C, 20)));
        CycloNumber g = gauss_sum(3, 2, 1);
        CHECK(agree(embed_local(g * g.conj(), C, 20), Padic::integer(C, 9, 20)));
        CHECK_THROWS_AS(embed_local(CycloNumber::zeta(5, 1), S, 20), IncompatibleResidueDegree);
    }
}
