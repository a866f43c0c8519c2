#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "satolab/common.hpp"

namespace satolab::census {

// Prime field F_p together with its quadratic-residue character table.
struct PrimeField {
    std::int64_t p;
    std::vector<std::int8_t> qr;  // qr[x] = chi(x), chi the Legendre symbol

    explicit PrimeField(std::int64_t p_);
    int chi(std::int64_t a) const {
        a %= p;
        if (a < 0) a += p;
        return qr[static_cast<std::size_t>(a)];
    }
};

enum class FamilyKind { Full, OneParam };

// One-parameter family y^2 = x^3 + A(t)x + B(t); Full uses empty coefficient lists.
struct FamilySpec {
    FamilyKind kind = FamilyKind::Full;
    std::vector<std::int64_t> a_coeffs;  // A(T), ascending degree
    std::vector<std::int64_t> b_coeffs;  // B(T)

    static FamilySpec full() { return {}; }
    static FamilySpec one_param(std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
        return {FamilyKind::OneParam, std::move(a), std::move(b)};
    }
};

// True when j(T) = 1728*4A^3/(4A^3+27B^2) is a non-constant rational function.
bool j_invariant_nonconstant(const FamilySpec& spec);

// Exact integer counts of Frobenius traces over a curve family.
struct TraceHistogram {
    std::int64_t p = 0;
    FamilySpec family;
    std::map<std::int64_t, std::int64_t> counts;
    std::int64_t total = 0;

    std::vector<std::int64_t> keys() const;
    std::int64_t count(std::int64_t t) const {
        auto it = counts.find(t);
        return it == counts.end() ? 0 : it->second;
    }

    std::string to_csv() const;
    std::string to_json() const;
    static TraceHistogram from_csv(const std::string& text, std::int64_t p, FamilySpec fam);
    static TraceHistogram from_json(const std::string& text);
};

int legendre_symbol(std::int64_t a, const PrimeField& field);

// t = -sum_x chi(x^3 + a x + b); throws SingularCurve when the discriminant vanishes.
std::int64_t frobenius_trace(std::int64_t a, std::int64_t b, const PrimeField& field);

// Census of all p(p-1) curves, by twist-class representatives weighted with
// orbit sizes (quartic classes at j=1728, sextic at j=0, quadratic elsewhere).
// Bit-identical to the naive (a,b) double loop.
TraceHistogram full_family_histogram(std::int64_t p, int workers = 1);

TraceHistogram one_param_histogram(const FamilySpec& spec, std::int64_t p, int workers = 1);

// Birch moment (1/(p(p-1))) * sum a_p(E)^{2R}, exact.
mpq_class power_moment(const TraceHistogram& hist, int R);

// sym_k evaluated by the Chebyshev recurrence; normalization 1/(p-1)^2 for the
// full family and 1/p for one-parameter families.
double sym_power_sum(const TraceHistogram& hist, int k);

// U_k(cos theta) = sin((k+1)theta)/sin(theta) via the three-term recurrence.
double sym_eval(int k, double two_cos_theta);

// Exact count of curve tuples with F(t_1/2sqrt(p),...,t_n/2sqrt(p)) in [lo,hi],
// iterating over the trace-value support and multiplying multiplicities.
// F is supplied as a callable on the normalized coordinates.
mpz_class joint_region_count(const std::vector<const TraceHistogram*>& hists,
                             const std::function<double(const std::vector<double>&)>& F,
                             double lo, double hi);

}  // namespace satolab::census
