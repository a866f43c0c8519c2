#include "satolab/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vendor_json.hpp"

namespace satolab::disc {

SequenceND SequenceND::product(std::vector<AxisAtoms> axes) {
    SequenceND s;
    s.kind = Kind::ProductAtoms;
    for (auto& ax : axes) {
        ax.total = 0;
        // keep atoms sorted for the lattice sweeps
        std::vector<std::size_t> order(ax.pos.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ax.pos[a] < ax.pos[b]; });
        std::vector<double> pos;
        std::vector<std::int64_t> w;
        for (std::size_t i : order) {
            if (ax.weight[i] <= 0) throw Error("atom weights must be positive");
            pos.push_back(ax.pos[i]);
            w.push_back(ax.weight[i]);
            ax.total += ax.weight[i];
        }
        ax.pos = std::move(pos);
        ax.weight = std::move(w);
    }
    s.axes = std::move(axes);
    return s;
}

SequenceND SequenceND::explicit_points(std::vector<std::vector<double>> pts, std::vector<std::int64_t> weights) {
    if (pts.size() > 1000000) throw Error("explicit sequences above 10^6 points are rejected; use ProductAtoms");
    SequenceND s;
    s.kind = Kind::Explicit;
    if (weights.empty()) weights.assign(pts.size(), 1);
    if (weights.size() != pts.size()) throw Error("weight count mismatch");
    s.points = std::move(pts);
    s.point_weights = std::move(weights);
    return s;
}

int SequenceND::dims() const {
    if (kind == Kind::ProductAtoms) return static_cast<int>(axes.size());
    return points.empty() ? 0 : static_cast<int>(points[0].size());
}

double SequenceND::total_points() const {
    if (kind == Kind::ProductAtoms) {
        double t = 1.0;
        for (const auto& ax : axes) t *= static_cast<double>(ax.total);
        return t;
    }
    double t = 0.0;
    for (auto w : point_weights) t += static_cast<double>(w);
    return t;
}

double SequenceND::count_box(const std::vector<std::pair<double, double>>& box) const {
    if (static_cast<int>(box.size()) != dims()) throw DimensionMismatch("box arity");
    if (kind == Kind::ProductAtoms) {
        double c = 1.0;
        for (std::size_t j = 0; j < axes.size(); ++j) {
            std::int64_t cj = 0;
            for (std::size_t i = 0; i < axes[j].pos.size(); ++i)
                if (axes[j].pos[i] >= box[j].first && axes[j].pos[i] <= box[j].second) cj += axes[j].weight[i];
            c *= static_cast<double>(cj);
        }
        return c;
    }
    double c = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool in = true;
        for (std::size_t j = 0; j < points[i].size() && in; ++j)
            in = points[i][j] >= box[j].first && points[i][j] <= box[j].second;
        if (in) c += static_cast<double>(point_weights[i]);
    }
    return c;
}

WeylSumTable weyl_sums(const SequenceND& seq, const std::vector<int>& degrees) {
    if (static_cast<int>(degrees.size()) != seq.dims()) throw DimensionMismatch("degree box arity");
    WeylSumTable W;
    W.n = seq.dims();
    W.degrees = degrees;
    W.total = seq.total_points();
    if (seq.kind == SequenceND::Kind::ProductAtoms) {
        for (std::size_t j = 0; j < seq.axes.size(); ++j) {
            int M = degrees[j];
            std::vector<cplx> tab(static_cast<std::size_t>(2 * M + 1));
            for (int m = -M; m <= M; ++m) {
                KahanSum re, im;
                for (std::size_t i = 0; i < seq.axes[j].pos.size(); ++i) {
                    double ph = 2.0 * PI * m * seq.axes[j].pos[i];
                    double w = static_cast<double>(seq.axes[j].weight[i]);
                    re.add(w * std::cos(ph));
                    im.add(w * std::sin(ph));
                }
                tab[static_cast<std::size_t>(m + M)] = {re.value(), im.value()};
            }
            W.per_axis.push_back(std::move(tab));
        }
        return W;
    }
    std::size_t total = 1;
    for (int M : degrees) total *= static_cast<std::size_t>(2 * M + 1);
    W.dense.assign(total, cplx(0, 0));
    std::vector<int> m(static_cast<std::size_t>(W.n));
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int j = W.n - 1; j >= 0; --j) {
            int width = 2 * degrees[static_cast<std::size_t>(j)] + 1;
            m[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(width)) -
                                             degrees[static_cast<std::size_t>(j)];
            rem /= static_cast<std::size_t>(width);
        }
        KahanSum re, im;
        for (std::size_t i = 0; i < seq.points.size(); ++i) {
            double ph = 0.0;
            for (int j = 0; j < W.n; ++j) ph += m[static_cast<std::size_t>(j)] * seq.points[i][static_cast<std::size_t>(j)];
            double w = static_cast<double>(seq.point_weights[i]);
            re.add(w * std::cos(2.0 * PI * ph));
            im.add(w * std::sin(2.0 * PI * ph));
        }
        W.dense[flat] = {re.value(), im.value()};
    }
    return W;
}

cplx WeylSumTable::S(const std::vector<int>& m) const {
    if (static_cast<int>(m.size()) != n) throw DimensionMismatch("weyl index arity");
    for (int j = 0; j < n; ++j)
        if (std::abs(m[static_cast<std::size_t>(j)]) > degrees[static_cast<std::size_t>(j)])
            throw DegreeBoxMismatch("index outside the stored degree box");
    if (!per_axis.empty()) {
        cplx s(1.0, 0.0);
        for (int j = 0; j < n; ++j)
            s *= per_axis[static_cast<std::size_t>(j)][static_cast<std::size_t>(m[static_cast<std::size_t>(j)] +
                                                                                degrees[static_cast<std::size_t>(j)])];
        return s;
    }
    std::size_t flat = 0;
    for (int j = 0; j < n; ++j)
        flat = flat * static_cast<std::size_t>(2 * degrees[static_cast<std::size_t>(j)] + 1) +
               static_cast<std::size_t>(m[static_cast<std::size_t>(j)] + degrees[static_cast<std::size_t>(j)]);
    return dense[flat];
}

double erdos_turan_bound(const WeylSumTable& W, const measures::FourierCoeffProvider& coeffs, double mu_height,
                         const std::vector<selberg::IntervalMod1>& box, const std::vector<int>& degrees) {
    if (static_cast<int>(box.size()) != W.n || static_cast<int>(degrees.size()) != W.n)
        throw DimensionMismatch("box / degree arity");
    for (int j = 0; j < W.n; ++j)
        if (degrees[static_cast<std::size_t>(j)] > W.degrees[static_cast<std::size_t>(j)])
            throw DegreeBoxMismatch("requested degrees exceed the table");

    double dM = selberg::delta_M(box, degrees);
    double bound = dM * mu_height;
    std::vector<int> m(static_cast<std::size_t>(W.n), 0);
    std::size_t total = 1;
    for (int M : degrees) total *= static_cast<std::size_t>(2 * M + 1);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        bool zero = true;
        double pprod = 1.0;
        for (int j = W.n - 1; j >= 0; --j) {
            int width = 2 * degrees[static_cast<std::size_t>(j)] + 1;
            int mj = static_cast<int>(rem % static_cast<std::size_t>(width)) - degrees[static_cast<std::size_t>(j)];
            rem /= static_cast<std::size_t>(width);
            m[static_cast<std::size_t>(j)] = mj;
            if (mj != 0) zero = false;
            pprod *= selberg::p_m(box[static_cast<std::size_t>(j)], mj);
        }
        if (zero) continue;
        double dev = std::abs(W.S(m) / W.total - cplx(coeffs.coeff(m), 0.0));
        bound += (dM + pprod) * dev;
    }
    return bound;
}

namespace {

struct AxisIntervalData {
    std::vector<double> closed_count;
    std::vector<double> open_count;
    std::vector<double> mass;
    std::size_t n_candidates = 0;
    double slack = 0.0;  // movement slack when the candidate lattice was thinned
};

AxisIntervalData axis_intervals(const AxisAtoms& ax, const measures::Density1D& dens, std::size_t cap) {
    // candidate coordinates: domain ends plus atom positions (thinned to cap)
    std::vector<double> cand{dens.support_lo(), dens.support_hi()};
    std::size_t stride = 1;
    if (cap > 2 && ax.pos.size() > cap - 2) stride = (ax.pos.size() + cap - 3) / (cap - 2);
    for (std::size_t i = 0; i < ax.pos.size(); i += stride) cand.push_back(ax.pos[i]);
    if (stride > 1) cand.push_back(ax.pos.back());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    AxisIntervalData out;
    out.n_candidates = cand.size();
    const std::size_t K = cand.size();
    out.closed_count.reserve(K * (K + 1) / 2);
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t l = i; l < K; ++l) {
            double cc = 0.0, oc = 0.0;
            for (std::size_t a = 0; a < ax.pos.size(); ++a) {
                if (ax.pos[a] >= cand[i] && ax.pos[a] <= cand[l]) cc += static_cast<double>(ax.weight[a]);
                if (ax.pos[a] > cand[i] && ax.pos[a] < cand[l]) oc += static_cast<double>(ax.weight[a]);
            }
            out.closed_count.push_back(cc);
            out.open_count.push_back(oc);
            out.mass.push_back(dens.mass(cand[i], cand[l]));
        }
    }
    if (stride > 1) {
        // moving an endpoint inside a thinned gap changes the axis count by at
        // most the skipped weight and the axis measure by the skipped mass
        double worst_w = 0.0, worst_m = 0.0;
        for (std::size_t c = 0; c + 1 < cand.size(); ++c) {
            double gap_w = 0.0;
            for (std::size_t a = 0; a < ax.pos.size(); ++a)
                if (ax.pos[a] > cand[c] && ax.pos[a] < cand[c + 1]) gap_w += static_cast<double>(ax.weight[a]);
            worst_w = std::max(worst_w, gap_w);
            worst_m = std::max(worst_m, dens.mass(cand[c], cand[c + 1]));
        }
        out.slack = 2.0 * (worst_w + worst_m * static_cast<double>(ax.total));
    }
    return out;
}

}  // namespace

DiscrepancyEstimate empirical_discrepancy(const SequenceND& seq, const measures::ProductMeasure& pm,
                                          std::size_t axis_candidate_cap) {
    const int n = seq.dims();
    if (n > 3) throw DimensionTooLarge("empirical discrepancy supports n <= 3");
    if (static_cast<int>(pm.arity()) != n) throw ArityMismatch("measure arity");
    if (seq.kind != SequenceND::Kind::ProductAtoms) {
        // expand an explicit sequence into one axis list per dimension only in
        // dimension one; higher-dimensional explicit sweeps have no product
        // structure and fall back to a direct sweep over point coordinates
        if (n != 1) throw Error("empirical_discrepancy requires ProductAtoms for n >= 2");
        AxisAtoms ax;
        for (std::size_t i = 0; i < seq.points.size(); ++i) {
            ax.pos.push_back(seq.points[i][0]);
            ax.weight.push_back(seq.point_weights[i]);
        }
        return empirical_discrepancy(SequenceND::product({ax}), pm, axis_candidate_cap);
    }

    std::size_t cap = axis_candidate_cap;
    if (cap == 0) cap = n == 1 ? 100000 : (n == 2 ? 200 : 32);

    std::vector<AxisIntervalData> per_axis;
    double X = seq.total_points();
    for (int j = 0; j < n; ++j)
        per_axis.push_back(axis_intervals(seq.axes[static_cast<std::size_t>(j)], pm.factors[static_cast<std::size_t>(j)], cap));

    double best = 0.0;
    if (n == 1) {
        const auto& A = per_axis[0];
        for (std::size_t i = 0; i < A.mass.size(); ++i) {
            best = std::max(best, A.closed_count[i] - X * A.mass[i]);
            best = std::max(best, X * A.mass[i] - A.open_count[i]);
        }
    } else if (n == 2) {
        const auto& A = per_axis[0];
        const auto& B = per_axis[1];
        for (std::size_t i = 0; i < A.mass.size(); ++i) {
            double ac = A.closed_count[i], ao = A.open_count[i], am = A.mass[i];
            for (std::size_t l = 0; l < B.mass.size(); ++l) {
                double over = ac * B.closed_count[l] - X * am * B.mass[l];
                double under = X * am * B.mass[l] - ao * B.open_count[l];
                if (over > best) best = over;
                if (under > best) best = under;
            }
        }
    } else {
        const auto& A = per_axis[0];
        const auto& B = per_axis[1];
        const auto& C = per_axis[2];
        for (std::size_t i = 0; i < A.mass.size(); ++i)
            for (std::size_t l = 0; l < B.mass.size(); ++l) {
                double cc = A.closed_count[i] * B.closed_count[l];
                double oo = A.open_count[i] * B.open_count[l];
                double mm = A.mass[i] * B.mass[l] * X;
                for (std::size_t r = 0; r < C.mass.size(); ++r) {
                    double over = cc * C.closed_count[r] - mm * C.mass[r];
                    double under = mm * C.mass[r] - oo * C.open_count[r];
                    if (over > best) best = over;
                    if (under > best) best = under;
                }
            }
    }

    DiscrepancyEstimate est;
    est.lower = best;
    double slack = 0.0;
    for (int j = 0; j < n; ++j) {
        double other = X / static_cast<double>(seq.axes[static_cast<std::size_t>(j)].total);
        slack += per_axis[static_cast<std::size_t>(j)].slack * other;
    }
    est.upper = best + slack;
    return est;
}

double PiecewiseConstant::eval(const std::vector<double>& x) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < breaks.size(); ++j) {
        const auto& br = breaks[j];
        auto it = std::upper_bound(br.begin(), br.end(), x[j]);
        std::size_t cell;
        if (it == br.begin())
            cell = 0;  // below the domain: clamp
        else
            cell = static_cast<std::size_t>(it - br.begin()) - 1;
        if (cell >= br.size() - 1) cell = br.size() - 2;  // top boundary closed
        flat = flat * (br.size() - 1) + cell;
    }
    return cell_values[flat];
}

double PiecewiseConstant::integral(const measures::ProductMeasure& pm) const {
    std::size_t total = 1;
    for (const auto& br : breaks) total *= br.size() - 1;
    KahanSum s;
    std::vector<std::size_t> idx(breaks.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        if (cell_values[flat] == 0.0) continue;
        std::size_t rem = flat;
        for (std::size_t j = breaks.size(); j-- > 0;) {
            idx[j] = rem % (breaks[j].size() - 1);
            rem /= breaks[j].size() - 1;
        }
        double m = 1.0;
        for (std::size_t j = 0; j < breaks.size(); ++j)
            m *= pm.factors[j].mass(breaks[j][idx[j]], breaks[j][idx[j] + 1]);
        s.add(cell_values[flat] * m);
    }
    return s.value();
}

double PiecewiseConstant::sum_over(const SequenceND& seq) const {
    if (seq.kind == SequenceND::Kind::Explicit) {
        KahanSum s;
        for (std::size_t i = 0; i < seq.points.size(); ++i)
            s.add(static_cast<double>(seq.point_weights[i]) * eval(seq.points[i]));
        return s.value();
    }
    // product structure: per-axis cell occupancy, then one pass over cells
    std::vector<std::vector<double>> occ(breaks.size());
    for (std::size_t j = 0; j < breaks.size(); ++j) {
        const auto& br = breaks[j];
        occ[j].assign(br.size() - 1, 0.0);
        for (std::size_t a = 0; a < seq.axes[j].pos.size(); ++a) {
            double x = seq.axes[j].pos[a];
            auto it = std::upper_bound(br.begin(), br.end(), x);
            std::size_t cell = it == br.begin() ? 0 : static_cast<std::size_t>(it - br.begin()) - 1;
            if (cell >= br.size() - 1) cell = br.size() - 2;
            occ[j][cell] += static_cast<double>(seq.axes[j].weight[a]);
        }
    }
    std::size_t total = 1;
    for (const auto& br : breaks) total *= br.size() - 1;
    KahanSum s;
    std::vector<std::size_t> idx(breaks.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        if (cell_values[flat] == 0.0) continue;
        std::size_t rem = flat;
        double cnt = 1.0;
        for (std::size_t j = breaks.size(); j-- > 0;) {
            idx[j] = rem % (breaks[j].size() - 1);
            rem /= breaks[j].size() - 1;
        }
        for (std::size_t j = 0; j < breaks.size(); ++j) cnt *= occ[j][idx[j]];
        s.add(cell_values[flat] * cnt);
    }
    return s.value();
}

KHCertificate koksma_hlawka_certificate(const SequenceND& seq, const PiecewiseConstant& f,
                                        const measures::ProductMeasure& pm, double vstar, double disc_unnormalized) {
    KHCertificate cert;
    cert.vstar_bound = vstar;
    cert.discrepancy_bound = disc_unnormalized;
    cert.empirical_sum = f.sum_over(seq);
    cert.main_term = seq.total_points() * f.integral(pm);
    cert.gap = std::abs(cert.empirical_sum - cert.main_term);
    double tol = 1e-9 * std::max(1.0, std::abs(cert.main_term));
    cert.pass = cert.gap <= vstar * disc_unnormalized + tol;
    if (!cert.pass)
        throw CertificateViolation("Koksma-Hlawka certificate failed: gap " + std::to_string(cert.gap) +
                                   " > bound " + std::to_string(vstar * disc_unnormalized));
    return cert;
}

std::string KHCertificate::to_json() const {
    nlohmann::json j;
    j["gap"] = gap;
    j["vstar_bound"] = vstar_bound;
    j["discrepancy_bound"] = discrepancy_bound;
    j["pass"] = pass;
    return j.dump();
}

}  // namespace satolab::disc
