#pragma once
// Arithmetic over F_p and F_p[x]/(g): the residue fields of the local rings.

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace ltx::fp {

using Poly = std::vector<long>;  // low degree first, trimmed (empty = 0)

long mod(long a, long p);
long inv(long a, long p);

void trim(Poly& a);
Poly add(const Poly& a, const Poly& b, long p);
Poly sub(const Poly& a, const Poly& b, long p);
Poly mul(const Poly& a, const Poly& b, long p);
Poly scale(const Poly& a, long s, long p);
// remainder of a modulo monic-or-not g
Poly rem(const Poly& a, const Poly& g, long p);
void divrem(const Poly& a, const Poly& g, long p, Poly& q, Poly& r);
Poly gcd(Poly a, Poly b, long p);  // monic
Poly mulmod(const Poly& a, const Poly& b, const Poly& g, long p);
Poly powmod(const Poly& a, const mpz_class& e, const Poly& g, long p);
// inverse of a modulo g when gcd(a, g) = 1
std::optional<Poly> invmod(const Poly& a, const Poly& g, long p);

bool is_irreducible(const Poly& g, long p);
// least monic irreducible of degree k, ordered by (a_{k-1}, ..., a_0)
Poly least_irreducible(long p, int k);

// dense matrices over F_p
using Mat = std::vector<std::vector<long>>;
Mat mat_mul(const Mat& a, const Mat& b, long p);
Mat mat_identity(std::size_t n);
long mat_det(Mat a, long p);
std::size_t mat_rank(Mat a, long p);
std::optional<Mat> mat_inverse(Mat a, long p);
// some solution x of a x = b, if any
std::optional<std::vector<long>> mat_solve(Mat a, std::vector<long> b, long p);

// the field F_q = F_p[y]/(g), elements as coefficient vectors of length k
struct Field {
    long p = 0;
    int k = 0;
    Poly g;     // monic degree k
    Mat frob;   // column j = y^(j p) reduced, i.e. x -> x^p as an F_p-linear map

    Field() = default;
    Field(long p, Poly g);

    std::vector<long> canon(const Poly& a) const;  // length-k vector
    Poly poly(const std::vector<long>& v) const;
    std::vector<long> mul(const std::vector<long>& a, const std::vector<long>& b) const;
    std::vector<long> add(const std::vector<long>& a, const std::vector<long>& b) const;
    std::vector<long> sub(const std::vector<long>& a, const std::vector<long>& b) const;
    std::vector<long> pow(const std::vector<long>& a, const mpz_class& e) const;
    std::optional<std::vector<long>> inv(const std::vector<long>& a) const;
    std::vector<long> apply_frob(const std::vector<long>& a) const;
    bool is_zero(const std::vector<long>& a) const;
    std::vector<long> one() const;
    std::vector<long> zero() const { return std::vector<long>(k, 0); }
    long trace(const std::vector<long>& a) const;  // to F_p
    mpz_class order() const;                       // q
    // deterministic element of exact multiplicative order n, n | q - 1
    std::vector<long> element_of_order(long n) const;
    long mult_order(const std::vector<long>& a) const;  // for small orders only
};

}  // namespace ltx::fp
