#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "satolab/common.hpp"

namespace satolab::hk {

// Real values on a rectangular grid; grids are sorted, endpoints 0 and 1.
struct GridFunction {
    std::vector<std::vector<double>> grids;  // per-axis coordinates
    std::vector<double> values;              // row-major over the grid

    int dims() const { return static_cast<int>(grids.size()); }
    std::size_t index(const std::vector<std::size_t>& idx) const;
    double at(const std::vector<std::size_t>& idx) const { return values[index(idx)]; }

    static GridFunction from_function(std::vector<std::vector<double>> grids,
                                      const std::function<double(const std::vector<double>&)>& f);
};

struct Partition2D {
    std::vector<double> x_cuts;
    std::vector<double> y_cuts;

    std::string to_csv() const;
};

struct Box {
    std::vector<double> lo, hi;
};

struct BoxUnion {
    std::vector<Box> boxes;
};

// Vitali variation on the given grid: sum over cells of the absolute
// alternating-corner mixed difference.
double vitali_variation(const GridFunction& g);

// Hardy-Krause variation: Vitali variations of all 2^n - 1 face restrictions
// with the off-face coordinates pinned at the upper endpoint.
double hk_variation(const GridFunction& g);

// Level-set bound sum_j (alpha_j(a_j) + alpha_j(b_j)); counts < 0 mark an
// infinite level set.
double indicator_variation_bound(const std::vector<std::pair<double, double>>& endpoint_counts);

struct BoxCoverBound {
    std::size_t recover_boxes = 0;
    double bound = 0.0;  // 2 * recover_boxes
};

// Re-covers the union by boxes generated from boundary vertices (slab
// decomposition with merged identical cross-sections) and returns the count.
BoxCoverBound box_union_variation_bound(const BoxUnion& u);

struct AppendixResult {
    Partition2D partition;
    double achieved = 0.0;  // Vitali variation of chi_J(l1 cos 2pi t1 + l2 cos 2pi t2) on the partition
};

// Staircase partition driving the Vitali variation of the two-scale cosine
// indicator above any target X; throws InfeasibleTarget when J leaves no room.
AppendixResult appendix_partition(double lambda1, double lambda2, double j_lo, double j_hi, double X);

}  // namespace satolab::hk
