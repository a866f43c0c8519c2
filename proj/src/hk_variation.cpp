#include "satolab/hk_variation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace satolab::hk {

std::size_t GridFunction::index(const std::vector<std::size_t>& idx) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < grids.size(); ++j) flat = flat * grids[j].size() + idx[j];
    return flat;
}

GridFunction GridFunction::from_function(std::vector<std::vector<double>> grids,
                                         const std::function<double(const std::vector<double>&)>& f) {
    GridFunction g;
    g.grids = std::move(grids);
    std::size_t total = 1;
    for (const auto& ax : g.grids) total *= ax.size();
    g.values.resize(total);
    std::vector<std::size_t> idx(g.grids.size(), 0);
    std::vector<double> x(g.grids.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t j = g.grids.size(); j-- > 0;) {
            idx[j] = rem % g.grids[j].size();
            rem /= g.grids[j].size();
        }
        for (std::size_t j = 0; j < g.grids.size(); ++j) x[j] = g.grids[j][idx[j]];
        g.values[flat] = f(x);
    }
    return g;
}

double vitali_variation(const GridFunction& g) {
    const int n = g.dims();
    std::vector<std::size_t> cells(static_cast<std::size_t>(n));
    std::size_t n_cells = 1;
    for (int j = 0; j < n; ++j) {
        if (g.grids[static_cast<std::size_t>(j)].size() < 2) return 0.0;
        cells[static_cast<std::size_t>(j)] = g.grids[static_cast<std::size_t>(j)].size() - 1;
        n_cells *= cells[static_cast<std::size_t>(j)];
    }
    KahanSum total;
    std::vector<std::size_t> base(static_cast<std::size_t>(n)), corner(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < n_cells; ++c) {
        std::size_t rem = c;
        for (std::size_t j = static_cast<std::size_t>(n); j-- > 0;) {
            base[j] = rem % cells[j];
            rem /= cells[j];
        }
        double delta = 0.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            int ones = 0;
            for (int j = 0; j < n; ++j) {
                unsigned bit = (mask >> j) & 1u;
                corner[static_cast<std::size_t>(j)] = base[static_cast<std::size_t>(j)] + bit;
                ones += static_cast<int>(bit);
            }
            double sign = ((n - ones) % 2 == 0) ? 1.0 : -1.0;
            delta += sign * g.at(corner);
        }
        total.add(std::abs(delta));
    }
    return total.value();
}

double hk_variation(const GridFunction& g) {
    const int n = g.dims();
    double total = 0.0;
    for (unsigned face = 1; face < (1u << n); ++face) {
        // restrict to the axes in `face`, pinning the rest at the top corner
        GridFunction sub;
        std::vector<int> live;
        for (int j = 0; j < n; ++j)
            if ((face >> j) & 1u) {
                live.push_back(j);
                sub.grids.push_back(g.grids[static_cast<std::size_t>(j)]);
            }
        std::size_t count = 1;
        for (const auto& ax : sub.grids) count *= ax.size();
        sub.values.resize(count);
        std::vector<std::size_t> idx(static_cast<std::size_t>(n));
        for (std::size_t flat = 0; flat < count; ++flat) {
            // off-face coordinates pinned at the top gridpoint
            for (int j = 0; j < n; ++j) idx[static_cast<std::size_t>(j)] = g.grids[static_cast<std::size_t>(j)].size() - 1;
            std::size_t rem = flat;
            for (std::size_t l = live.size(); l-- > 0;) {
                idx[static_cast<std::size_t>(live[l])] = rem % sub.grids[l].size();
                rem /= sub.grids[l].size();
            }
            sub.values[flat] = g.at(idx);
        }
        total += vitali_variation(sub);
    }
    return total;
}

double indicator_variation_bound(const std::vector<std::pair<double, double>>& endpoint_counts) {
    double total = 0.0;
    for (const auto& [ca, cb] : endpoint_counts) {
        if (ca < 0 || cb < 0) throw InfiniteLevelSet("level-set count marked infinite");
        total += ca + cb;
    }
    return total;
}

namespace {

struct Interval {
    double lo, hi;
};

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& iv : v) {
        if (!out.empty() && iv.lo <= out.back().hi + 1e-12)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

// disjoint-box decomposition of a union, recursing on the first axis;
// adjacent slabs with identical cross-sections are merged
std::size_t decompose_count(const std::vector<Box>& boxes, std::size_t axis, std::size_t dims) {
    if (boxes.empty()) return 0;
    if (axis + 1 == dims) {
        std::vector<Interval> iv;
        iv.reserve(boxes.size());
        for (const auto& b : boxes) iv.push_back({b.lo[axis], b.hi[axis]});
        return merge_intervals(std::move(iv)).size();
    }
    std::vector<double> cuts;
    for (const auto& b : boxes) {
        cuts.push_back(b.lo[axis]);
        cuts.push_back(b.hi[axis]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());

    std::size_t total = 0;
    std::string prev_sig;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        double mid = 0.5 * (cuts[s] + cuts[s + 1]);
        std::vector<Box> slab;
        for (const auto& b : boxes)
            if (b.lo[axis] <= mid && mid <= b.hi[axis]) slab.push_back(b);
        // signature of the cross-section: the sub-boxes that overlap the slab
        std::vector<std::vector<double>> sig;
        for (const auto& b : slab) {
            std::vector<double> row;
            for (std::size_t j = axis + 1; j < dims; ++j) {
                row.push_back(b.lo[j]);
                row.push_back(b.hi[j]);
            }
            sig.push_back(std::move(row));
        }
        std::sort(sig.begin(), sig.end());
        std::ostringstream os;
        for (const auto& row : sig) {
            for (double v : row) os << v << ";";
            os << "|";
        }
        std::string cur = os.str();
        if (cur == prev_sig) continue;  // merged with the previous slab group
        total += slab.empty() ? 0 : decompose_count(slab, axis + 1, dims);
        prev_sig = cur;
    }
    return total;
}

}  // namespace

BoxCoverBound box_union_variation_bound(const BoxUnion& u) {
    BoxCoverBound out;
    if (u.boxes.empty()) return out;
    std::size_t dims = u.boxes[0].lo.size();
    for (const auto& b : u.boxes)
        if (b.lo.size() != dims || b.hi.size() != dims) throw DimensionMismatch("box dimensions disagree");
    out.recover_boxes = decompose_count(u.boxes, 0, dims);
    out.bound = 2.0 * static_cast<double>(out.recover_boxes);
    return out;
}

AppendixResult appendix_partition(double lambda1, double lambda2, double j_lo, double j_hi, double X) {
    if (lambda1 == 0.0 || lambda2 == 0.0) throw ZeroScale("lambda must be nonzero");
    double L1 = std::abs(lambda1), L2 = std::abs(lambda2);
    double span = L1 + L2;
    if (!(j_lo < j_hi) || !(j_lo > -span) || !(j_hi < span))
        throw InfeasibleTarget("interval must lie strictly inside the value range");

    // walk along z1 + z2 = j_lo; each staircase step marks exactly one cell
    // corner inside [j_lo, j_hi] with its three lower neighbors outside
    double lo1 = std::max(-L1, j_lo - L2);
    double hi1 = std::min(L1, j_lo + L2);
    double shrink = 0.05 * (hi1 - lo1);
    lo1 += shrink;
    hi1 -= shrink;
    if (!(hi1 > lo1)) throw InfeasibleTarget("no staircase room");

    std::int64_t K = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(X))) + 1;
    double d1 = (hi1 - lo1) / static_cast<double>(K + 1);
    double h2 = std::min(d1 / 2.0, shrink / 2.0);
    double eps = std::min(h2 / 2.0, (j_hi - j_lo) / 4.0);

    std::vector<double> z1, z2;
    for (std::int64_t t = 0; t <= K; ++t) {
        double u = lo1 + d1 * static_cast<double>(t);
        double v = j_lo + eps - u;
        z1.push_back(u);
        z2.push_back(v);
        z2.push_back(v - h2);
    }

    auto to_theta = [](double z, double lambda) {
        return std::acos(std::clamp(z / lambda, -1.0, 1.0)) / (2.0 * PI);
    };
    auto build_cuts = [&](const std::vector<double>& zs, double lambda) {
        std::vector<double> cuts{0.0, 1.0};
        for (double z : zs) cuts.push_back(to_theta(z, lambda));
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                   cuts.end());
        return cuts;
    };

    AppendixResult res;
    res.partition.x_cuts = build_cuts(z1, lambda1);
    res.partition.y_cuts = build_cuts(z2, lambda2);

    auto f = [&](const std::vector<double>& th) {
        if (th[0] > 0.5 || th[1] > 0.5) return 0.0;
        double v = lambda1 * std::cos(2.0 * PI * th[0]) + lambda2 * std::cos(2.0 * PI * th[1]);
        return (v >= j_lo && v <= j_hi) ? 1.0 : 0.0;
    };
    GridFunction g = GridFunction::from_function({res.partition.x_cuts, res.partition.y_cuts}, f);
    res.achieved = vitali_variation(g);
    return res;
}

std::string Partition2D::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "axis,cut\n";
    for (double c : x_cuts) os << "x," << c << "\n";
    for (double c : y_cuts) os << "y," << c << "\n";
    return os.str();
}

}  // namespace satolab::hk
