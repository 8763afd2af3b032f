#include <doctest.h>

#include "ltx/errors.hpp"
#include "ltx/powerseries.hpp"
#include "support.hpp"

using namespace ltx;

namespace {

RingPtr Z3() { return make_ring(3, RingKind::base, 1); }

TruncSeries random_series(RingPtr R, int n, int D, int min_deg, long lo = -9, long hi = 9) {
    TruncSeries s(R, n, D);
    for (int q = s.idx->first_of_degree(min_deg); q < s.idx->size(); ++q) s.coef[q] = Padic::integer(R, gen::uniform(lo, hi), 30);
    return s;
}

SeriesVec random_map(RingPtr R, int comps, int n, int D) {
    SeriesVec v;
    for (int i = 0; i < comps; ++i) v.push_back(random_series(R, n, D, 1));
    return v;
}

// unimodular linear part: identity plus a strictly upper triangular part, then random higher terms
SeriesVec random_invertible_map(RingPtr R, int r, int D) {
    SeriesVec v;
    for (int i = 0; i < r; ++i) {
        TruncSeries s = random_series(R, r, D, 2);
        for (int j = 0; j < r; ++j) {
            std::vector<int> e(r, 0);
            e[j] = 1;
            s[e] = Padic::integer(R, j == i ? 1 : (j > i ? gen::uniform(-3, 3) : 0), 30);
        }
        v.push_back(s);
    }
    return v;
}

// Lagrange inversion over Q: [X^n] g = (1/n) [w^(n-1)] (w / f(w))^n
std::vector<mpq_class> lagrange(const std::vector<mpq_class>& f, int D) {
    // h = f(w)/w as a series, then its inverse, then powers
    std::vector<mpq_class> h(D, 0);
    for (int k = 0; k < D; ++k) h[k] = f[k + 1];
    std::vector<mpq_class> inv(D, 0);
    inv[0] = 1 / h[0];
    for (int k = 1; k < D; ++k) {
        mpq_class s = 0;
        for (int j = 1; j <= k; ++j) s += h[j] * inv[k - j];
        inv[k] = -s / h[0];
    }
    std::vector<mpq_class> g(D + 1, 0);
    std::vector<mpq_class> pw(D, 0);
    pw[0] = 1;
    for (int n = 1; n <= D; ++n) {
        std::vector<mpq_class> nx(D, 0);
        for (int a = 0; a < D; ++a)
            for (int b = 0; a + b < D; ++b) nx[a + b] += pw[a] * inv[b];
        pw = nx;
        g[n] = pw[n - 1] / n;
    }
    return g;
}

}  // namespace

TEST_SUITE("powerseries") {
    TEST_CASE("composition with the identity and a linear map") {
        RingPtr R = Z3();
        SeriesVec f = random_map(R, 2, 2, 6);
        CHECK(agree(compose(f, identity_map(R, 2, 6, 30)), f));
        TruncSeries sum(R, 2, 5);
        sum[{1, 0}] = Padic::one(R, 30);
        sum[{0, 1}] = Padic::one(R, 30);
        TruncSeries y2(R, 1, 5), y3(R, 1, 5);
        y2[{2}] = Padic::one(R, 30);
        y3[{3}] = Padic::one(R, 30);
        SeriesVec out = compose({sum}, {y2, y3});
        CHECK(agree(out[0], y2 + y3));
        TruncSeries c(R, 1, 5);
        c[{0}] = Padic::one(R, 30);
        CHECK_THROWS_AS(compose({sum}, {c, y3}), ConstantTermNonzero);
    }

    TEST_CASE("composition is associative") {
        RingPtr R = Z3();
        for (int t = 0; t < 5; ++t) {
            SeriesVec f = random_map(R, 2, 2, 8), g = random_map(R, 2, 3, 8), h = random_map(R, 3, 2, 8);
            CHECK(agree(compose(compose(f, g), h), compose(f, compose(g, h))));
        }
    }

    TEST_CASE("reversion") {
        RingPtr R = Z3();
        SeriesVec X = identity_map(R, 1, 6, 30);
        CHECK(agree(reversion(X), X));
        TruncSeries f(R, 1, 4);
        f[{1}] = Padic::one(R, 30);
        f[{2}] = Padic::one(R, 30);
        SeriesVec g = reversion({f});
        long want[] = {0, 1, -1, 2, -5};
        for (int n = 1; n <= 4; ++n) CHECK(agree(g[0][{n}], Padic::integer(R, want[n], 30)));
        // Lagrange oracle with a non-unit linear coefficient
        for (int t = 0; t < 10; ++t) {
            int D = 7;
            std::vector<mpq_class> fq(D + 1, 0);
            TruncSeries fs(R, 1, D);
            for (int k = 1; k <= D; ++k) {
                long c = k == 1 ? (gen::uniform(0, 1) ? 2 : 5) : gen::uniform(-5, 5);
                fq[k] = c;
                fs[{k}] = Padic::integer(R, c, 40);
            }
            auto gq = lagrange(fq, D);
            SeriesVec gs = reversion({fs});
            for (int n = 1; n <= D; ++n) CHECK(agree(gs[0][{n}], Padic::rational(R, gq[n], 30)));
        }
        for (int t = 0; t < 5; ++t) {
            SeriesVec F = random_invertible_map(R, 2, 6);
            SeriesVec G = reversion(F);
            CHECK(agree(compose(F, G), identity_map(R, 2, 6, 30)));
            CHECK(agree(compose(G, F), identity_map(R, 2, 6, 30)));
            CHECK(agree(reversion(G), F));
        }
        TruncSeries sq(R, 1, 4);
        sq[{2}] = Padic::one(R, 30);
        CHECK_THROWS_AS(reversion({sq}), SingularLinearPart);
    }

    TEST_CASE("jacobians") {
        RingPtr R = Z3();
        auto J = jacobian(identity_map(R, 2, 5, 30));
        CHECK(agree(J[0][0], TruncSeries::constant(Padic::one(R, 30), 2, 4)));
        CHECK(J[0][1].is_zero());
        TruncSeries m(R, 2, 5);
        m[{1, 1}] = Padic::one(R, 30);
        auto Jm = jacobian({m});
        CHECK(agree(Jm[0][0], TruncSeries::variable(R, 2, 4, 1, 30)));
        CHECK(agree(Jm[0][1], TruncSeries::variable(R, 2, 4, 0, 30)));
        // chain rule J_{f o g} = J_f(g) J_g
        for (int t = 0; t < 5; ++t) {
            SeriesVec f = random_map(R, 2, 2, 6), g = random_map(R, 2, 2, 6);
            auto lhs = jacobian(compose(f, g));
            auto Jf = jacobian(f);
            std::vector<SeriesVec> Jfg;
            SeriesVec g5;
            for (auto& gi : g) g5.push_back(gi.recap(5));
            for (auto& row : Jf) Jfg.push_back(compose(row, g5));
            auto rhs = matmul(Jfg, jacobian(g));
            for (int i = 0; i < 2; ++i) CHECK(agree(lhs[i], rhs[i]));
        }
    }

    TEST_CASE("Frobenius power substitution") {
        RingPtr R = Z3();
        SeriesVec X = identity_map(R, 2, 7, 30);
        SeriesVec P = substitute_frobenius_power(X);
        CHECK(agree(P[0], X[0] * X[0] * X[0]));
        CHECK(agree(substitute_frobenius_power({X[0] + X[1]})[0], P[0] + P[1]));
        for (int t = 0; t < 5; ++t) {
            SeriesVec f = random_map(R, 2, 2, 7);
            CHECK(agree(substitute_frobenius_power(f), compose(f, P)));
        }
    }

    TEST_CASE("evaluation with certified tails") {
        RingPtr R = Z3();
        SeriesVec X = identity_map(R, 1, 5, 30);
        Padic x = Padic::integer(R, 3 * 7, 20);
        Evaluation ev = evaluate(X, {x}, TailModel::integral, 0);
        CHECK(agree(ev.value[0], x));
        CHECK_THROWS_AS(evaluate(X, {Padic::integer(R, 2, 20)}, TailModel::integral, 0), ConvergenceViolation);
        // classical logarithm sum X^(3^i) / 3^i at x = 3 against a long partial sum over Q
        TruncSeries lg(R, 1, 30);
        for (long k = 1, i = 0; k <= 30; k *= 3, ++i) lg[{static_cast<int>(k)}] = Padic::rational(R, mpq_class(1, static_cast<long>(std::pow(3, i))), 40);
        Evaluation el = evaluate({lg}, {Padic::integer(R, 3, 40)}, TailModel::logarithm, 0);
        mpq_class oracle = 0;
        for (long i = 0; i < 6; ++i) {
            mpz_class pk, x3;
            mpz_ui_pow_ui(pk.get_mpz_t(), 3, static_cast<unsigned long>(i));
            mpz_ui_pow_ui(x3.get_mpz_t(), 3, pk.get_ui());
            oracle += mpq_class(x3, pk);
        }
        CHECK(el.tail_units >= 25);
        CHECK(agree(el.value[0], Padic::rational(R, oracle, 40)));
    }

    TEST_CASE("evaluation is compatible with composition") {
        RingPtr R = Z3();
        for (int t = 0; t < 10; ++t) {
            SeriesVec f = random_map(R, 2, 2, 8), g = random_map(R, 2, 2, 8);
            std::vector<Padic> x{Padic::integer(R, 3 * gen::uniform(-20, 20), 30), Padic::integer(R, 9 * gen::uniform(-20, 20), 30)};
            Evaluation gx = evaluate(g, x, TailModel::integral, 0);
            Evaluation lhs = evaluate(compose(f, g), x, TailModel::integral, 0);
            Evaluation rhs = evaluate(f, gx.value, TailModel::integral, 0);
            for (int i = 0; i < 2; ++i) CHECK(agree(lhs.value[i], rhs.value[i]));
        }
    }
}
