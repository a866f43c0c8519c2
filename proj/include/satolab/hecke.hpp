#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "satolab/common.hpp"

namespace satolab::hecke {

// Hurwitz class numbers H(n), stored as 12*H(n) so entries are integers.
// H(n) = 0 unless n = 0 or n is congruent to 0 or 3 mod 4; H(0) = -1/12.
struct HurwitzTable {
    std::int64_t limit = -1;
    std::vector<std::int32_t> h12;  // h12[n] = 12*H(n), 0 <= n <= limit

    mpq_class H(std::int64_t n) const;
    std::int32_t H12(std::int64_t n) const { return h12[static_cast<std::size_t>(n)]; }

    void save(const std::string& path) const;
    static HurwitzTable load(const std::string& path);
};

// Builds the table by one sieve over reduced binary quadratic forms
// (a,b,c), |b| <= a <= c, weights 1/2 at (a,0,a) and 1/3 at (a,a,a).
HurwitzTable hurwitz_table(std::int64_t limit);

// Single value 12*H(n) by direct reduced-form counting (test oracle and
// one-off evaluations).
std::int64_t hurwitz12_single(std::int64_t n);

// dim S_k(SL_2(Z)); throws OddWeight for odd k.
int dim_cuspforms_level1(std::int64_t k);

// Trace of T_n on S_k(SL_2(Z)) by the Eichler-Selberg trace formula in
// Zagier's form, exact integer arithmetic throughout.
mpz_class trace_hecke_level1(std::int64_t k, std::int64_t n);

// sum_i cos(m * theta_p(i)) = (s_m - s_{m-2})/2, s_m = Tr T_{p^m} / p^{m(k-1)/2}.
double weyl_cos_sum_level1(std::int64_t k, std::int64_t p, int m);

struct EigenangleSet {
    std::int64_t k = 0;
    std::int64_t p = 0;
    int d = 0;
    std::vector<double> angles;          // theta in [0, pi]
    std::vector<double> two_cos_theta;   // a_p(i) / p^{(k-1)/2}, increasing; angles[i] = acos(two_cos_theta[i]/2)

    std::string to_csv() const;
};

// Recovers the d individual eigenvalue angles of T_p on S_k(SL_2(Z)):
// integer power sums from traces of T_{p^m}, Newton identities in exact
// rationals, then Sturm-sequence bisection of the characteristic polynomial.
EigenangleSet eigen_angles_level1(std::int64_t k, std::int64_t p);

// CSV table "k,n,trace" of Hecke traces on S_k for the given indices.
std::string traces_csv(std::int64_t k, const std::vector<std::int64_t>& ns);

// For a single space S_k and primes p_1..p_n, per-form eigenvalue tuples
// (theta_{p_1}(i),...,theta_{p_n}(i)), i = 1..d.  Pairs angles across primes
// by expressing each T_{p_j} as a polynomial in T_{p_1} (exact Krylov solve
// on the q-expansion matrices).
std::vector<std::vector<double>> eigen_angle_tuples_level1(std::int64_t k, const std::vector<std::int64_t>& primes);

// General-level envelope for the cosine-sum residual,
//   p^{3m/2} 2^{omega(N)} log(p^m) + tau(N) sqrt(N);
// the laboratory only exercises it at N = 1 where it collapses to
// p^{3m/2} log(p^m) + 1.
double trace_error_envelope(std::int64_t p, int m, std::int64_t N = 1);

struct JointCosResidual {
    double residual = 0.0;  // | prod_j sum_i cos(m_j theta) - prod_j d_j c_{m_j} |
    double bound = 0.0;     // level-1 product-form bound, up to a constant
};

JointCosResidual joint_cos_residual(const std::vector<std::int64_t>& k_list, std::int64_t p, const std::vector<int>& m_vector);

// --- internals exposed for tests and the experiment layer ---

// Fourier coefficient c_m of the p-adic Plancherel angle density.
double plancherel_cm(std::int64_t p, int m);

// Gegenbauer-type coefficient P_k(t,n): G_0 = 1, G_1 = t, G_m = t G_{m-1} - n G_{m-2},
// P_k = G_{k-2}.
mpz_class gegenbauer_pk(std::int64_t k, const mpz_class& t, const mpz_class& n);

// Integer power sums P_m = sum_i a_p(i)^m, m = 1..count, from traces of T_{p^l}.
std::vector<mpz_class> eigenvalue_power_sums(std::int64_t k, std::int64_t p, int count);

// Process-wide Hurwitz cache used by trace_hecke_level1; grows on demand.
// Returns a snapshot so later growth cannot invalidate a held table.
std::shared_ptr<const HurwitzTable> shared_hurwitz(std::int64_t limit);

}  // namespace satolab::hecke
