#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "satolab/common.hpp"
#include "satolab/measures.hpp"
#include "satolab/selberg.hpp"

namespace satolab::disc {

struct AxisAtoms {
    std::vector<double> pos;          // in [0,1]
    std::vector<std::int64_t> weight; // positive
    std::int64_t total = 0;           // sum of weights = X_j
};

// n-dimensional sequence: either a product of per-axis weighted atom lists
// (the census / eigen-angle shape) or an explicit weighted point multiset.
struct SequenceND {
    enum class Kind { ProductAtoms, Explicit };
    Kind kind = Kind::ProductAtoms;
    std::vector<AxisAtoms> axes;
    std::vector<std::vector<double>> points;
    std::vector<std::int64_t> point_weights;

    static SequenceND product(std::vector<AxisAtoms> axes);
    static SequenceND explicit_points(std::vector<std::vector<double>> pts, std::vector<std::int64_t> weights = {});

    int dims() const;
    double total_points() const;  // prod X_j (product) or sum of weights (explicit)

    // closed-box count of sequence points
    double count_box(const std::vector<std::pair<double, double>>& box) const;
};

struct WeylSumTable {
    int n = 0;
    std::vector<int> degrees;
    double total = 0.0;                       // prod X_j
    std::vector<std::vector<cplx>> per_axis;  // product sequences: S_j(m), index m + M_j
    std::vector<cplx> dense;                  // explicit sequences: row-major over the degree box

    cplx S(const std::vector<int>& m) const;
};

// S(m) = sum over the sequence of e(m . x); product sequences use per-axis
// sums, never the expanded product.
WeylSumTable weyl_sums(const SequenceND& seq, const std::vector<int>& degrees);

// Right side of the measure-generic Erdos-Turan inequality:
//   Delta_M ||mu|| + sum_{0 < |m| <= M} (Delta_M + prod P_{m_j}) |S(m)/X - c_m|
double erdos_turan_bound(const WeylSumTable& W, const measures::FourierCoeffProvider& coeffs, double mu_height,
                         const std::vector<selberg::IntervalMod1>& box, const std::vector<int>& degrees);

struct DiscrepancyEstimate {
    double lower = 0.0;  // exact sup over the candidate-box lattice
    double upper = 0.0;  // lower + continuity slack when the lattice was thinned
};

// sup over product boxes of |count - mu(box) X1...Xn| (unnormalized).
// Exact for n = 1; for n in {2,3} the lattice may be thinned, with the slack
// reflected in .upper.
DiscrepancyEstimate empirical_discrepancy(const SequenceND& seq, const measures::ProductMeasure& pm,
                                          std::size_t axis_candidate_cap = 0);

// Piecewise-constant test function on a box partition, the carrier for
// certified Koksma-Hlawka runs.  Cells are half-open except at the top.
struct PiecewiseConstant {
    std::vector<std::vector<double>> breaks;  // per-axis, sorted, spanning the domain
    std::vector<double> cell_values;          // row-major over cells

    double eval(const std::vector<double>& x) const;
    double integral(const measures::ProductMeasure& pm) const;
    double sum_over(const SequenceND& seq) const;
};

struct KHCertificate {
    double empirical_sum = 0.0;
    double main_term = 0.0;
    double gap = 0.0;
    double vstar_bound = 0.0;
    double discrepancy_bound = 0.0;  // unnormalized D_n
    bool pass = false;

    std::string to_json() const;
};

// Certifies |sum f - X int f dmu| <= V*(f) D_n(mu); throws
// CertificateViolation when the inequality fails beyond rounding, which
// signals an upstream bug rather than a mathematical failure.
KHCertificate koksma_hlawka_certificate(const SequenceND& seq, const PiecewiseConstant& f,
                                        const measures::ProductMeasure& pm, double vstar, double disc_unnormalized);

}  // namespace satolab::disc
