#include "ltx/powerseries.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_map>

#include "ltx/errors.hpp"

namespace ltx {

// ------------------------------------------------------------ monomial index

namespace {
std::unordered_map<long, int>& sparse_table(const MonomialIndex* idx) {
    static std::mutex mu;
    static std::map<const MonomialIndex*, std::unordered_map<long, int>> tables;
    std::lock_guard<std::mutex> lock(mu);
    return tables[idx];
}
}  // namespace

const MonomialIndex* MonomialIndex::get(int nvars, int D) {
    if (nvars < 1 || D < 0) throw InvalidInput("monomial index needs nvars >= 1 and D >= 0");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<MonomialIndex>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(nvars, D);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    auto idx = std::unique_ptr<MonomialIndex>(new MonomialIndex(nvars, D));
    const MonomialIndex* out = idx.get();
    cache.emplace(key, std::move(idx));
    return out;
}

MonomialIndex::MonomialIndex(int nvars, int D) : n_(nvars), D_(D), base_(D + 1) {
    std::vector<int> e(n_, 0);
    for (int d = 0; d <= D; ++d) {
        start_.push_back(static_cast<int>(exps_.size()));
        // compositions of d into n parts, first variable largest first
        std::function<void(int, int)> rec = [&](int var, int left) {
            if (var == n_ - 1) {
                e[var] = left;
                exps_.push_back(e);
                deg_.push_back(d);
                return;
            }
            for (int k = left; k >= 0; --k) {
                e[var] = k;
                rec(var + 1, left - k);
            }
        };
        rec(0, d);
    }
    start_.push_back(static_cast<int>(exps_.size()));
    for (auto& x : exps_) key_.push_back(key_of(x));
    double span = std::pow(static_cast<double>(base_), n_);
    if (span <= (1 << 24)) {
        dense_.assign(static_cast<std::size_t>(span), -1);
        for (int r = 0; r < size(); ++r) dense_[key_[r]] = r;
    } else {
        auto& t = sparse_table(this);
        for (int r = 0; r < size(); ++r) t[key_[r]] = r;
    }
    pred_.assign(size(), -1);
    pred_var_.assign(size(), -1);
    for (int r = 1; r < size(); ++r) {
        std::vector<int> x = exps_[r];
        int v = 0;
        while (x[v] == 0) ++v;
        --x[v];
        pred_[r] = rank_of(x);
        pred_var_[r] = v;
    }
}

long MonomialIndex::key_of(const std::vector<int>& e) const {
    long k = 0;
    for (int i = n_ - 1; i >= 0; --i) k = k * base_ + e[i];
    return k;
}

int MonomialIndex::rank_of_key(long key) const {
    if (!dense_.empty()) return key < static_cast<long>(dense_.size()) ? dense_[key] : -1;
    auto& t = sparse_table(this);
    auto it = t.find(key);
    return it == t.end() ? -1 : it->second;
}

int MonomialIndex::rank_of(const std::vector<int>& e) const {
    if (static_cast<int>(e.size()) != n_) throw DimensionMismatch("exponent length");
    int d = 0;
    for (int x : e) {
        if (x < 0) throw InvalidInput("negative exponent");
        d += x;
    }
    if (d > D_) return -1;
    return rank_of_key(key_of(e));
}

int MonomialIndex::predecessor(int rank, int* var) const {
    if (var) *var = pred_var_[rank];
    return pred_[rank];
}

// ------------------------------------------------------------ series

TruncSeries::TruncSeries(RingPtr ring, int nvars, int D)
    : R(ring), idx(MonomialIndex::get(nvars, D)), coef(idx->size(), Padic(ring)) {}

TruncSeries TruncSeries::variable(RingPtr R, int nvars, int D, int i, long digits) {
    TruncSeries s(R, nvars, D);
    if (D >= 1) {
        std::vector<int> e(nvars, 0);
        e[i] = 1;
        s[e] = Padic::one(R, digits);
    }
    return s;
}

TruncSeries TruncSeries::constant(const Padic& c, int nvars, int D) {
    TruncSeries s(c.R, nvars, D);
    s.coef[0] = c;
    return s;
}

TruncSeries TruncSeries::operator-() const {
    TruncSeries s = *this;
    for (auto& c : s.coef)
        if (!c.exact_zero()) c = -c;
    return s;
}

TruncSeries& TruncSeries::operator+=(const TruncSeries& b) {
    if (idx != b.idx) throw DimensionMismatch("series shapes differ");
    for (std::size_t k = 0; k < coef.size(); ++k)
        if (!b.coef[k].exact_zero()) coef[k] += b.coef[k];
    return *this;
}

TruncSeries& TruncSeries::operator-=(const TruncSeries& b) {
    if (idx != b.idx) throw DimensionMismatch("series shapes differ");
    for (std::size_t k = 0; k < coef.size(); ++k)
        if (!b.coef[k].exact_zero()) coef[k] -= b.coef[k];
    return *this;
}

TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    if (a.idx != b.idx) throw DimensionMismatch("series shapes differ");
    const MonomialIndex* I = a.idx;
    TruncSeries out(a.R, I->nvars(), I->cap());
    const int D = I->cap();
    const bool lazy = a.R->dim() == 1;
    std::vector<int> bnz;
    for (int j = 0; j < I->size(); ++j)
        if (!b.coef[j].exact_zero()) bnz.push_back(j);
    for (int i = 0; i < I->size(); ++i) {
        const Padic& x = a.coef[i];
        if (x.exact_zero()) continue;
        int lim = I->first_of_degree(D - I->degree(i) + 1);
        long ki = I->key(i);
        for (int j : bnz) {
            if (j >= lim) break;
            int r = I->rank_of_key(ki + I->key(j));
            if (lazy)
                out.coef[r].addmul_lazy(x, b.coef[j]);
            else
                out.coef[r] += x * b.coef[j];
        }
    }
    if (lazy)
        for (auto& c : out.coef)
            if (!c.exact_zero()) c.normalize();
    return out;
}

TruncSeries operator*(const Padic& s, const TruncSeries& b) {
    TruncSeries out = b;
    for (auto& c : out.coef)
        if (!c.exact_zero()) c = s * c;
    return out;
}

TruncSeries TruncSeries::with_prec(long units) const {
    TruncSeries s = *this;
    for (auto& c : s.coef) c = c.with_prec(units);
    return s;
}

TruncSeries TruncSeries::recap(int D) const {
    TruncSeries s(R, nvars(), D);
    int lim = std::min(D, cap());
    for (int r = 0; r < idx->first_of_degree(lim + 1); ++r) s.coef[s.idx->rank_of(idx->exps(r))] = coef[r];
    return s;
}

bool TruncSeries::has_constant_term() const { return !coef[0].is_zero(); }

long TruncSeries::min_prec() const {
    long m = Padic::kInf;
    for (auto& c : coef)
        if (!c.exact_zero()) m = std::min(m, c.prec);
    return m;
}

long TruncSeries::min_val() const {
    long m = Padic::kInf;
    for (auto& c : coef)
        if (!c.is_zero()) m = std::min(m, c.val);
    return m;
}

bool TruncSeries::is_zero() const {
    return std::all_of(coef.begin(), coef.end(), [](const Padic& c) { return c.is_zero(); });
}

int TruncSeries::lowest_degree() const {
    for (int r = 0; r < idx->size(); ++r)
        if (!coef[r].is_zero()) return idx->degree(r);
    return cap() + 1;
}

json TruncSeries::to_json() const {
    json terms = json::array();
    for (int r = 0; r < idx->size(); ++r) {
        if (coef[r].is_zero()) continue;
        json t;
        t["exp"] = idx->exps(r);
        if (R->dim() == 1) {
            t["coeff"] = coef[r].coeff(0).get_str();
        } else {
            std::vector<std::string> cs;
            for (int k = 0; k < R->dim(); ++k) cs.push_back(coef[r].coeff(k).get_str());
            t["coeff"] = cs;
        }
        terms.push_back(t);
    }
    json j;
    j["vars"] = nvars();
    j["cap"] = cap();
    j["terms"] = terms;
    long mp = min_prec();
    if (mp < Padic::kInf) j["prec"] = mpq_class(mp, R->e).get_str();
    return j;
}

SeriesVec identity_map(RingPtr R, int nvars, int D, long digits) {
    SeriesVec v;
    for (int i = 0; i < nvars; ++i) v.push_back(TruncSeries::variable(R, nvars, D, i, digits));
    return v;
}

bool agree(const TruncSeries& a, const TruncSeries& b) {
    if (a.idx != b.idx) return false;
    for (std::size_t k = 0; k < a.coef.size(); ++k) {
        if (a.coef[k].exact_zero() && b.coef[k].exact_zero()) continue;
        if (!agree(a.coef[k], b.coef[k])) return false;
    }
    return true;
}

bool agree(const SeriesVec& a, const SeriesVec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!agree(a[i], b[i])) return false;
    return true;
}

SeriesVec add(const SeriesVec& a, const SeriesVec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("series vector sizes");
    SeriesVec c = a;
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += b[i];
    return c;
}

SeriesVec sub(const SeriesVec& a, const SeriesVec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("series vector sizes");
    SeriesVec c = a;
    for (std::size_t i = 0; i < a.size(); ++i) c[i] -= b[i];
    return c;
}

SeriesVec apply_matrix(const PMatrix& M, const SeriesVec& v) {
    if (M.cols != static_cast<int>(v.size())) throw DimensionMismatch("matrix times series vector");
    SeriesVec out;
    for (int i = 0; i < M.rows; ++i) {
        TruncSeries s(v[0].R, v[0].nvars(), v[0].cap());
        for (int j = 0; j < M.cols; ++j)
            if (!M(i, j).exact_zero()) s += M(i, j) * v[j];
        out.push_back(s);
    }
    return out;
}

PMatrix linear_part(const SeriesVec& f) {
    int r = static_cast<int>(f.size());
    int n = f[0].nvars();
    PMatrix L(f[0].R, r, n);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<int> e(n, 0);
            e[j] = 1;
            L(i, j) = f[i].at(e);
        }
    return L;
}

TruncSeries rename_vars(const TruncSeries& s, int nvars, const std::vector<int>& map) {
    if (static_cast<int>(map.size()) != s.nvars()) throw DimensionMismatch("rename_vars map");
    TruncSeries out(s.R, nvars, s.cap());
    std::vector<int> e(nvars);
    for (int q = 0; q < s.idx->size(); ++q) {
        if (s.coef[q].exact_zero()) continue;
        std::fill(e.begin(), e.end(), 0);
        const auto& x = s.idx->exps(q);
        for (int j = 0; j < s.nvars(); ++j) e[map[j]] += x[j];
        out[e] = s.coef[q];
    }
    return out;
}

SeriesVec rename_vars(const SeriesVec& v, int nvars, const std::vector<int>& map) {
    SeriesVec out;
    for (auto& s : v) out.push_back(rename_vars(s, nvars, map));
    return out;
}

SeriesVec embed(const SeriesVec& v, RingPtr S) {
    SeriesVec out;
    for (auto& s : v) {
        TruncSeries t(S, s.nvars(), s.cap());
        for (int q = 0; q < s.idx->size(); ++q)
            if (!s.coef[q].exact_zero()) t.coef[q] = embed(s.coef[q], S);
        out.push_back(t);
    }
    return out;
}

SeriesVec compose(const SeriesVec& f, const SeriesVec& g0) {
    if (f.empty()) return {};
    int s = f[0].nvars();
    if (static_cast<int>(g0.size()) != s) throw DimensionMismatch("compose: inner map has the wrong number of components");
    for (auto& gi : g0)
        if (gi.has_constant_term()) throw ConstantTermNonzero("inner series must have zero constant term");
    int D = std::min(f[0].cap(), g0[0].cap());
    int t = g0[0].nvars();
    RingPtr R = g0[0].R;
    SeriesVec g;
    for (auto& gi : g0) {
        TruncSeries h = gi.recap(D);
        h.coef[0] = Padic(R);
        g.push_back(h);
    }
    const MonomialIndex* I = MonomialIndex::get(s, D);
    std::vector<TruncSeries> pw(I->size());
    std::vector<char> have(I->size(), 0);
    std::function<const TruncSeries&(int)> power = [&](int rank) -> const TruncSeries& {
        if (have[rank]) return pw[rank];
        int var = 0;
        int pred = I->predecessor(rank, &var);
        pw[rank] = pred == 0 ? g[var] : power(pred) * g[var];
        have[rank] = 1;
        return pw[rank];
    };
    SeriesVec out;
    for (auto& fk : f) {
        TruncSeries fr = fk.recap(D);
        TruncSeries acc(R, t, D);
        if (!fr.coef[0].exact_zero()) acc.coef[0] = fr.coef[0];
        const bool lazy = R->dim() == 1;
        for (int r = 1; r < I->size(); ++r) {
            const Padic& c = fr.coef[r];
            if (c.exact_zero()) continue;
            const TruncSeries& P = power(r);
            for (int q = P.idx->first_of_degree(I->degree(r)); q < P.idx->size(); ++q) {
                if (P.coef[q].exact_zero()) continue;
                if (lazy)
                    acc.coef[q].addmul_lazy(c, P.coef[q]);
                else
                    acc.coef[q] += c * P.coef[q];
            }
        }
        if (lazy)
            for (auto& x : acc.coef)
                if (!x.exact_zero()) x.normalize();
        out.push_back(acc);
    }
    return out;
}

SeriesVec reversion(const SeriesVec& f) {
    int r = static_cast<int>(f.size());
    if (r == 0 || f[0].nvars() != r) throw DimensionMismatch("reversion needs a map from r to r variables");
    for (auto& fi : f)
        if (fi.has_constant_term()) throw ConstantTermNonzero("reversion needs zero constant term");
    PMatrix L = linear_part(f);
    PMatrix Linv;
    try {
        Linv = inverse_any(L);
    } catch (const PrecisionExhausted&) {
        throw SingularLinearPart("linear part is singular");
    }
    RingPtr R = f[0].R;
    int D = f[0].cap();
    long digits = std::clamp<long>(f[0].min_prec() / R->e + 1, 1, 4096);
    SeriesVec X = identity_map(R, r, D, digits);
    SeriesVec h = sub(f, apply_matrix(L, X));
    for (auto& hi : h)
        for (int q = 0; q < hi.idx->first_of_degree(std::min(2, D + 1)); ++q) hi.coef[q] = Padic(R);
    SeriesVec g = apply_matrix(Linv, X);
    for (int it = 1; it < D; ++it) {
        SeriesVec next = apply_matrix(Linv, sub(X, compose(h, g)));
        bool fixed = agree(next, g);
        g = std::move(next);
        if (fixed) break;
    }
    return g;
}

std::vector<SeriesVec> jacobian(const SeriesVec& f) {
    std::vector<SeriesVec> J;
    if (f.empty()) return J;
    int n = f[0].nvars();
    int D = std::max(0, f[0].cap() - 1);
    RingPtr R = f[0].R;
    for (auto& fi : f) {
        SeriesVec row;
        for (int j = 0; j < n; ++j) {
            TruncSeries d(R, n, D);
            for (int q = 0; q < fi.idx->size(); ++q) {
                const auto& e = fi.idx->exps(q);
                if (e[j] == 0 || fi.coef[q].exact_zero()) continue;
                std::vector<int> e2 = e;
                --e2[j];
                int rank = d.idx->rank_of(e2);
                if (rank < 0) continue;
                d.coef[rank] = Padic::integer(R, e[j], fi.coef[q].digits() + 64) * fi.coef[q];
            }
            row.push_back(d);
        }
        J.push_back(row);
    }
    return J;
}

std::vector<SeriesVec> matmul(const std::vector<SeriesVec>& A, const std::vector<SeriesVec>& B) {
    std::size_t n = A.size(), k = B.size(), m = B.empty() ? 0 : B[0].size();
    std::vector<SeriesVec> C(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (A[i].size() != k) throw DimensionMismatch("series matrix product");
        for (std::size_t j = 0; j < m; ++j) {
            TruncSeries s(A[i][0].R, A[i][0].nvars(), A[i][0].cap());
            for (std::size_t l = 0; l < k; ++l) s += A[i][l] * B[l][j];
            C[i].push_back(s);
        }
    }
    return C;
}

SeriesVec substitute_power(const SeriesVec& f, int k) {
    SeriesVec out;
    for (auto& fi : f) {
        TruncSeries s(fi.R, fi.nvars(), fi.cap());
        for (int q = 0; q < fi.idx->size(); ++q) {
            if (fi.coef[q].exact_zero()) continue;
            std::vector<int> e = fi.idx->exps(q);
            for (auto& x : e) x *= k;
            int rank = s.idx->rank_of(e);
            if (rank >= 0) s.coef[rank] = fi.coef[q];
        }
        out.push_back(s);
    }
    return out;
}

SeriesVec substitute_frobenius_power(const SeriesVec& f) {
    if (f.empty()) return f;
    return substitute_power(f, static_cast<int>(f[0].R->p));
}

// ------------------------------------------------------------ evaluation

namespace {

long tail_bound(TailModel model, long minval, int D, long p, int e) {
    if (minval >= Padic::kInf / 4) return Padic::kInf;
    switch (model) {
        case TailModel::integral:
            return (D + 1) * minval;
        case TailModel::logarithm: {
            long pi = 1, i = 0;
            while (pi <= D) {
                pi *= p;
                ++i;
            }
            return pi * minval - i * e;
        }
        case TailModel::exponential: {
            mpq_class b = mpq_class(minval) + D * (mpq_class(minval) - mpq_class(e, p - 1));
            mpz_class fl;
            mpz_fdiv_q(fl.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
            return fl.get_si();
        }
    }
    return 0;
}

}  // namespace

Evaluation evaluate(const SeriesVec& f, const std::vector<Padic>& x, TailModel model, const mpq_class& tau) {
    if (f.empty()) return {};
    int n = f[0].nvars();
    if (static_cast<int>(x.size()) != n) throw DimensionMismatch("point has the wrong number of coordinates");
    RingPtr S = x[0].R;
    long mv = Padic::kInf;
    for (auto& xi : x) {
        if (xi.R != S) throw InvalidInput("point coordinates in different rings");
        if (!xi.exact_zero()) mv = std::min(mv, xi.val);
    }
    if (mv < Padic::kInf && !(mpq_class(mv, S->e) > tau))
        throw ConvergenceViolation("min valuation " + mpq_class(mv, S->e).get_str() + " not above " + tau.get_str());
    int D = f[0].cap();
    const MonomialIndex* I = f[0].idx;
    std::vector<Padic> xp(I->size());
    std::vector<char> have(I->size(), 0);
    std::function<const Padic&(int)> mono = [&](int rank) -> const Padic& {
        if (have[rank]) return xp[rank];
        int var = 0;
        int pred = I->predecessor(rank, &var);
        xp[rank] = pred == 0 ? x[var] : mono(pred) * x[var];
        have[rank] = 1;
        return xp[rank];
    };
    Evaluation ev;
    ev.tail_units = tail_bound(model, mv, D, S->p, S->e);
    if (ev.tail_units < S->e) throw TailTooWeak("certified tail precision below one digit");
    for (auto& fk : f) {
        Padic acc(S);
        if (!fk.coef[0].exact_zero()) acc = embed(fk.coef[0], S);
        for (int r = 1; r < I->size(); ++r) {
            if (fk.coef[r].exact_zero()) continue;
            acc += embed(fk.coef[r], S) * mono(r);
        }
        if (acc.exact_zero() && ev.tail_units < Padic::kInf) {
            acc = Padic::integer(S, 0, 0);
            acc.prec = acc.val = ev.tail_units;
        }
        ev.value.push_back(acc.with_prec(ev.tail_units));
    }
    return ev;
}

}  // namespace ltx
