#pragma once
// Truncated multivariate power series with total-degree cap D.

#include <memory>
#include <vector>

#include "ltx/padic.hpp"
#include "ltx/plinalg.hpp"

namespace ltx {

// graded enumeration of the monomials of degree <= D in n variables
class MonomialIndex {
public:
    static const MonomialIndex* get(int nvars, int D);

    int nvars() const { return n_; }
    int cap() const { return D_; }
    int size() const { return static_cast<int>(exps_.size()); }
    const std::vector<int>& exps(int rank) const { return exps_[rank]; }
    int degree(int rank) const { return deg_[rank]; }
    int first_of_degree(int d) const { return start_[d]; }  // start_[D + 1] = size()
    long key(int rank) const { return key_[rank]; }
    // rank of the monomial with the given key, or -1 beyond the cap
    int rank_of_key(long key) const;
    int rank_of(const std::vector<int>& e) const;
    long key_of(const std::vector<int>& e) const;
    // rank of e - unit(first nonzero var), and that variable
    int predecessor(int rank, int* var) const;

private:
    MonomialIndex(int nvars, int D);
    int n_, D_;
    long base_;
    std::vector<std::vector<int>> exps_;
    std::vector<int> deg_, start_, pred_, pred_var_;
    std::vector<long> key_;
    std::vector<int> dense_;  // key -> rank
};

class TruncSeries {
public:
    RingPtr R = nullptr;
    const MonomialIndex* idx = nullptr;
    std::vector<Padic> coef;  // by rank; exact zero when absent

    TruncSeries() = default;
    TruncSeries(RingPtr ring, int nvars, int D);

    int nvars() const { return idx->nvars(); }
    int cap() const { return idx->cap(); }
    Padic& operator[](const std::vector<int>& e) { return coef[idx->rank_of(e)]; }
    const Padic& at(const std::vector<int>& e) const { return coef[idx->rank_of(e)]; }

    static TruncSeries variable(RingPtr R, int nvars, int D, int i, long digits);
    static TruncSeries constant(const Padic& c, int nvars, int D);

    TruncSeries operator-() const;
    TruncSeries& operator+=(const TruncSeries& b);
    TruncSeries& operator-=(const TruncSeries& b);
    friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
    friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }
    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b);
    friend TruncSeries operator*(const Padic& s, const TruncSeries& b);

    TruncSeries with_prec(long units) const;
    TruncSeries recap(int D) const;  // drop terms above D (or widen the cap)
    bool has_constant_term() const;
    long min_prec() const;  // over stored (non-exact) coefficients
    long min_val() const;   // over coefficients nonzero at precision
    bool is_zero() const;   // every coefficient zero at its precision
    int lowest_degree() const;
    json to_json() const;
};

using SeriesVec = std::vector<TruncSeries>;

SeriesVec identity_map(RingPtr R, int nvars, int D, long digits);
bool agree(const TruncSeries& a, const TruncSeries& b);
bool agree(const SeriesVec& a, const SeriesVec& b);
SeriesVec add(const SeriesVec& a, const SeriesVec& b);
SeriesVec sub(const SeriesVec& a, const SeriesVec& b);
// matrix times column of series
SeriesVec apply_matrix(const PMatrix& M, const SeriesVec& v);
// degree-one coefficients as a matrix: M(i, j) = coefficient of X_j in f_i
PMatrix linear_part(const SeriesVec& f);

// move into nvars variables, old variable j becoming map[j]
TruncSeries rename_vars(const TruncSeries& s, int nvars, const std::vector<int>& map);
SeriesVec rename_vars(const SeriesVec& v, int nvars, const std::vector<int>& map);
// coefficientwise embedding into the ring S
SeriesVec embed(const SeriesVec& v, RingPtr S);

SeriesVec compose(const SeriesVec& f, const SeriesVec& g);
SeriesVec reversion(const SeriesVec& f);
// J(i, j) = d f_i / d X_j, cap D - 1
std::vector<SeriesVec> jacobian(const SeriesVec& f);
std::vector<SeriesVec> matmul(const std::vector<SeriesVec>& A, const std::vector<SeriesVec>& B);
SeriesVec substitute_frobenius_power(const SeriesVec& f);
// X_i -> X_i^k
SeriesVec substitute_power(const SeriesVec& f, int k);

// integral: coefficients of valuation >= 0
// logarithm: only degrees p^i, coefficient valuation >= -i
// exponential: degree-n coefficients of valuation >= -(n-1)/(p-1)
enum class TailModel { integral, logarithm, exponential };

struct Evaluation {
    std::vector<Padic> value;
    long tail_units = 0;  // certified tail precision (units of the point ring)
};

// tau: threshold on min valuation of x (strict), as a rational
Evaluation evaluate(const SeriesVec& f, const std::vector<Padic>& x, TailModel model, const mpq_class& tau);

}  // namespace ltx
