#include "satolab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "vendor_json.hpp"

namespace satolab::lab {

using census::TraceHistogram;
using disc::AxisAtoms;
using disc::SequenceND;
using measures::Density1D;
using measures::FourierCoeffProvider;
using measures::ProductMeasure;
using measures::RegionSpec;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
};

RegionSpec region_from_ast(const expr::ExprAST& F, double j_lo, double j_hi) {
    RegionSpec r;
    r.arity = F.arity;
    r.F = [F](const std::vector<double>& x) { return F.eval(x); };
    r.j_lo = j_lo;
    r.j_hi = j_hi;
    return r;
}

Density1D lebesgue_density() { return Density1D::grid(0.0, 1.0, {1.0, 1.0}); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

AxisAtoms census_axis_x(const TraceHistogram& hist) {
    AxisAtoms ax;
    double denom = 2.0 * std::sqrt(static_cast<double>(hist.p));
    for (const auto& [t, c] : hist.counts) {
        ax.pos.push_back(static_cast<double>(t) / denom);
        ax.weight.push_back(c);
        ax.total += c;
    }
    return ax;
}

AxisAtoms census_axis_angle(const TraceHistogram& hist) {
    AxisAtoms ax;
    double denom = 2.0 * std::sqrt(static_cast<double>(hist.p));
    for (const auto& [t, c] : hist.counts) {
        ax.pos.push_back(std::acos(std::clamp(static_cast<double>(t) / denom, -1.0, 1.0)) / PI);
        ax.weight.push_back(c);
        ax.total += c;
    }
    return ax;
}

AxisAtoms eigen_axis_angle(const hecke::EigenangleSet& E) {
    AxisAtoms ax;
    for (double th : E.angles) {
        double u = th / (2.0 * PI);
        ax.pos.push_back(u);
        ax.weight.push_back(1);
        ax.pos.push_back(1.0 - u);
        ax.weight.push_back(1);
        ax.total += 2;
    }
    return ax;
}

int default_cover_boxes(std::int64_t p, int n) {
    return std::max(2, static_cast<int>(std::lround(4.0 * std::pow(static_cast<double>(p), 1.0 / (4.0 * n)))));
}

int default_elliptic_degree(std::int64_t p) {
    return std::max(2, static_cast<int>(std::lround(std::pow(static_cast<double>(p), 0.25))));
}

int default_modular_degree(double log_dims, std::int64_t p, int n) {
    double c = 1.0 / (4.0 * n);
    return std::max(1, static_cast<int>(std::lround(c * log_dims / std::log(static_cast<double>(p)))));
}

RegionCover build_region_cover(const expr::ExprAST& F, double j_lo, double j_hi, int n, int boxes_per_axis) {
    RegionCover cover;
    cover.n = n;
    cover.boxes_per_axis = boxes_per_axis;
    const int samples = 5;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::size_t n_cells = 1;
    for (int j = 0; j < n; ++j) n_cells *= static_cast<std::size_t>(boxes_per_axis);
    double w = 2.0 / boxes_per_axis;
    for (std::size_t flat = 0; flat < n_cells; ++flat) {
        std::size_t rem = flat;
        for (int j = n - 1; j >= 0; --j) {
            idx[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(boxes_per_axis));
            rem /= static_cast<std::size_t>(boxes_per_axis);
        }
        bool hit = false;
        std::vector<int> sub(static_cast<std::size_t>(n), 0);
        std::size_t n_sub = 1;
        for (int j = 0; j < n; ++j) n_sub *= samples;
        for (std::size_t s = 0; s < n_sub && !hit; ++s) {
            std::size_t sr = s;
            for (int j = 0; j < n; ++j) {
                sub[static_cast<std::size_t>(j)] = static_cast<int>(sr % samples);
                sr /= samples;
                x[static_cast<std::size_t>(j)] = -1.0 + w * (idx[static_cast<std::size_t>(j)] +
                                                             static_cast<double>(sub[static_cast<std::size_t>(j)]) / (samples - 1));
            }
            double v = F.eval(x);
            if (v >= j_lo && v <= j_hi) hit = true;
        }
        if (hit) cover.cells.push_back(idx);
    }
    return cover;
}

hk::BoxUnion RegionCover::as_box_union() const {
    hk::BoxUnion u;
    double w = cell_width();
    for (const auto& cell : cells) {
        hk::Box b;
        for (int j = 0; j < n; ++j) {
            b.lo.push_back(-1.0 + w * cell[static_cast<std::size_t>(j)]);
            b.hi.push_back(-1.0 + w * (cell[static_cast<std::size_t>(j)] + 1));
        }
        u.boxes.push_back(std::move(b));
    }
    return u;
}

std::string reports_to_json(const std::vector<ExperimentReport>& reports, bool include_timings) {
    nlohmann::json out;
    out["schema_version"] = 1;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["experiment"] = r.experiment;
        j["label"] = r.label;
        j["empirical"] = r.empirical;
        j["frequency"] = r.frequency;
        j["main_term"] = r.main_term;
        j["main_quad_error"] = r.main_quad_error;
        j["abs_error"] = r.abs_error;
        j["bound"] = r.bound;
        j["constant"] = r.constant;
        j["pass"] = r.pass;
        if (include_timings) j["runtime_ms"] = r.runtime_ms;
        if (!r.diag.empty()) {
            nlohmann::json d;
            for (const auto& [k, v] : r.diag) d[k] = v;
            j["diag"] = d;
        }
        arr.push_back(std::move(j));
    }
    out["reports"] = arr;
    return out.dump(2);
}

std::string reports_to_csv(const std::vector<ExperimentReport>& reports, bool include_timings) {
    std::ostringstream os;
    os.precision(17);
    os << "experiment,label,empirical,frequency,main_term,main_quad_error,abs_error,bound,constant,pass";
    if (include_timings) os << ",runtime_ms";
    os << "\n";
    for (const auto& r : reports) {
        os << r.experiment << "," << r.label << "," << r.empirical << "," << r.frequency << "," << r.main_term << ","
           << r.main_quad_error << "," << r.abs_error << "," << r.bound << "," << r.constant << ","
           << (r.pass ? "true" : "false");
        if (include_timings) os << "," << r.runtime_ms;
        os << "\n";
    }
    return os.str();
}

SuiteResult run_birch(const std::vector<std::int64_t>& primes, int workers) {
    SuiteResult suite;
    ProductMeasure pm{{Density1D::sato_tate()}};
    double C = 0.0;
    double prev_err = 0.0;
    std::vector<double> logs_p, logs_e;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        Timer t;
        std::int64_t p = primes[i];
        TraceHistogram hist = census::full_family_histogram(p, workers);
        SequenceND seq = SequenceND::product({census_axis_x(hist)});
        auto D = disc::empirical_discrepancy(seq, pm);
        double X = static_cast<double>(hist.total);
        double err = D.upper / X;
        double shape = std::pow(static_cast<double>(p), -0.25);
        if (i == 0) C = 2.0 * err / shape;  // factor-2 calibration slack
        ExperimentReport r;
        r.experiment = "birch";
        r.label = "p=" + std::to_string(p);
        r.empirical = D.lower;
        r.frequency = err;
        r.abs_error = err;
        r.bound = C * shape;
        r.constant = C;
        r.pass = err <= r.bound * (1.0 + 1e-12);
        r.diag.push_back({"strictly_decreasing", (i == 0 || err < prev_err) ? 1.0 : 0.0});
        r.runtime_ms = t.ms();
        logs_p.push_back(std::log(static_cast<double>(p)));
        logs_e.push_back(std::log(std::max(err, 1e-300)));
        prev_err = err;
        suite.add(std::move(r));
    }
    // fitted decay exponent across the sweep
    if (primes.size() >= 2 && !suite.reports.empty()) {
        double n = static_cast<double>(logs_p.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < logs_p.size(); ++i) {
            sx += logs_p[i];
            sy += logs_e[i];
            sxx += logs_p[i] * logs_p[i];
            sxy += logs_p[i] * logs_e[i];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        suite.reports.back().diag.push_back({"fit_exponent", slope});
    }
    return suite;
}

SuiteResult run_joint_ec(const std::vector<std::int64_t>& primes, int n, const std::string& f_text, double j_lo,
                         double j_hi, int boxes, int resolution, int workers) {
    if (n < 2 || n > 3) throw Error("run_joint_ec supports n in {2,3}");
    SuiteResult suite;
    expr::ExprAST F = expr::parse_f_expr(f_text, n);

    ProductMeasure pm;
    for (int j = 0; j < n; ++j) pm.factors.push_back(Density1D::sato_tate());
    auto main = measures::integrate_region(pm, region_from_ast(F, j_lo, j_hi), resolution, workers);

    double C = 0.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        Timer t;
        std::int64_t p = primes[i];
        TraceHistogram hist = census::full_family_histogram(p, workers);
        std::vector<const TraceHistogram*> hists(static_cast<std::size_t>(n), &hist);
        mpz_class count = census::joint_region_count(
            hists, [&](const std::vector<double>& x) { return F.eval(x); }, j_lo, j_hi);
        double totaln = std::pow(static_cast<double>(hist.total), n);
        double freq = count.get_d() / totaln;
        double err = std::abs(freq - main.value);
        double shape = std::pow(static_cast<double>(p), -0.25 + 0.25 / n);
        if (i == 0) C = 2.0 * err / shape;  // factor-2 calibration slack
        ExperimentReport r;
        r.experiment = "joint-ec";
        r.label = "p=" + std::to_string(p) + " F=" + f_text + " J=[" + fmt(j_lo) + "," + fmt(j_hi) + "]";
        r.empirical = count.get_d();
        r.frequency = freq;
        r.main_term = main.value;
        r.main_quad_error = main.error_estimate;
        r.abs_error = err;
        r.constant = C;
        r.bound = C * shape;
        r.pass = err <= r.bound + main.error_estimate + 1e-12;
        r.runtime_ms = t.ms();
        int N = boxes > 0 ? boxes : default_cover_boxes(p, n);
        RegionCover cover = build_region_cover(F, j_lo, j_hi, n, N);
        auto vb = hk::box_union_variation_bound(cover.as_box_union());
        r.diag.push_back({"cover_boxes_per_axis", static_cast<double>(N)});
        r.diag.push_back({"schedule_degree", static_cast<double>(default_elliptic_degree(p))});
        r.diag.push_back({"cover_cells", static_cast<double>(cover.cells.size())});
        r.diag.push_back({"cover_vstar_bound", vb.bound});
        suite.add(std::move(r));
    }
    return suite;
}

SuiteResult run_joint_mf_fixed_prime(std::int64_t p, const std::vector<std::int64_t>& weights,
                                     const std::string& f_text, double j_lo, double j_hi, int resolution,
                                     double recorded_constant, int workers) {
    SuiteResult suite;
    int n = static_cast<int>(weights.size());
    expr::ExprAST F = expr::parse_f_expr(f_text, n);
    Timer t;

    std::vector<hecke::EigenangleSet> sets;
    double dims = 1.0;
    for (std::int64_t k : weights) {
        sets.push_back(hecke::eigen_angles_level1(k, p));
        if (sets.back().d == 0) throw EmptySpace("S_" + std::to_string(k) + "(1) is trivial");
        dims *= sets.back().d;
    }

    // empirical frequency over the d_1 ... d_n tuple grid
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> x(static_cast<std::size_t>(n));
    double count = 0.0;
    while (true) {
        for (int j = 0; j < n; ++j)
            x[static_cast<std::size_t>(j)] = 0.5 * sets[static_cast<std::size_t>(j)].two_cos_theta[idx[static_cast<std::size_t>(j)]];
        double v = F.eval(x);
        if (v >= j_lo && v <= j_hi) count += 1.0;
        int j = 0;
        while (j < n && ++idx[static_cast<std::size_t>(j)] >=
                            sets[static_cast<std::size_t>(j)].two_cos_theta.size()) {
            idx[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == n) break;
    }
    double freq = count / dims;

    ProductMeasure pm;
    for (int j = 0; j < n; ++j) pm.factors.push_back(Density1D::plancherel(p));
    auto main = measures::integrate_region(pm, region_from_ast(F, j_lo, j_hi), resolution, workers);

    double err = std::abs(freq - main.value);
    double shape = std::pow(std::log(static_cast<double>(p)) / std::log(dims), 1.0 - 1.0 / n);
    ExperimentReport r;
    r.experiment = "joint-mf-prime";
    std::string ws;
    for (std::int64_t k : weights) ws += (ws.empty() ? "" : "/") + std::to_string(k);
    r.label = "p=" + std::to_string(p) + " k=" + ws + " F=" + f_text + " J=[" + fmt(j_lo) + "," + fmt(j_hi) + "]";
    r.empirical = count;
    r.frequency = freq;
    r.main_term = main.value;
    r.main_quad_error = main.error_estimate;
    r.abs_error = err;
    if (recorded_constant > 0.0) {
        r.constant = recorded_constant;
        r.bound = recorded_constant * shape;
        r.pass = err <= r.bound + main.error_estimate + 1e-12;
    } else {
        r.constant = err / shape;  // fit mode: record the observed ratio
        r.bound = err;
        r.pass = true;
    }
    r.diag.push_back({"dims", dims});
    r.diag.push_back({"shape", shape});
    r.diag.push_back({"schedule_degree", static_cast<double>(default_modular_degree(std::log(dims), p, n))});
    r.runtime_ms = t.ms();
    suite.add(std::move(r));
    return suite;
}

SuiteResult run_joint_mf_fixed_space(std::int64_t k, const std::vector<std::int64_t>& primes,
                                     const std::string& f_text, double j_lo, double j_hi, int resolution,
                                     double recorded_constant) {
    SuiteResult suite;
    int n = static_cast<int>(primes.size());
    expr::ExprAST F = expr::parse_f_expr(f_text, n);
    Timer t;
    int d = hecke::dim_cuspforms_level1(k);
    if (d == 0) throw EmptySpace("S_" + std::to_string(k) + "(1) is trivial");

    auto tuples = hecke::eigen_angle_tuples_level1(k, primes);
    double count = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (const auto& tu : tuples) {
        for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = std::cos(tu[static_cast<std::size_t>(j)]);
        double v = F.eval(x);
        if (v >= j_lo && v <= j_hi) count += 1.0;
    }
    double freq = count / d;

    ProductMeasure pm;
    double logp = 0.0;
    for (std::int64_t p : primes) {
        pm.factors.push_back(Density1D::plancherel(p));
        logp += std::log(static_cast<double>(p));
    }
    auto main = measures::integrate_region(pm, region_from_ast(F, j_lo, j_hi), resolution);

    double err = std::abs(freq - main.value);
    double shape = std::pow(logp / std::log(static_cast<double>(d)), 1.0 - 1.0 / n);
    ExperimentReport r;
    r.experiment = "joint-mf-space";
    std::string ps;
    for (std::int64_t p : primes) ps += (ps.empty() ? "" : "/") + std::to_string(p);
    r.label = "k=" + std::to_string(k) + " p=" + ps + " F=" + f_text + " J=[" + fmt(j_lo) + "," + fmt(j_hi) + "]";
    r.empirical = count;
    r.frequency = freq;
    r.main_term = main.value;
    r.main_quad_error = main.error_estimate;
    r.abs_error = err;
    if (recorded_constant > 0.0) {
        r.constant = recorded_constant;
        r.bound = recorded_constant * shape;
        r.pass = err <= r.bound + main.error_estimate + 1e-12;
    } else {
        r.constant = err / shape;
        r.bound = err;
        r.pass = true;
    }
    r.diag.push_back({"d", static_cast<double>(d)});
    r.runtime_ms = t.ms();
    suite.add(std::move(r));
    return suite;
}

SuiteResult run_convolution_cor_elliptic(const std::vector<std::int64_t>& primes, const std::vector<double>& lambdas,
                                         double j_lo, double j_hi, int workers) {
    SuiteResult suite;
    int n = static_cast<int>(lambdas.size());
    for (double l : lambdas)
        if (l == 0.0) throw ZeroScale("lambda must be nonzero");

    std::vector<std::pair<double, Density1D>> comps;
    for (double l : lambdas) comps.push_back({l, Density1D::sato_tate()});
    Density1D star_c = measures::convolve(comps, 1e-4);
    Density1D star_f = measures::convolve(comps, 5e-5);
    double main = star_f.mass(j_lo, j_hi);
    double quad = std::abs(main - star_c.mass(j_lo, j_hi));

    bool integral_lambdas = true;
    for (double l : lambdas)
        if (l != std::round(l)) integral_lambdas = false;

    double C = 0.0, Chit = 0.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        Timer t;
        std::int64_t p = primes[i];
        TraceHistogram hist = census::full_family_histogram(p, workers);
        std::vector<const TraceHistogram*> hists(static_cast<std::size_t>(n), &hist);
        mpz_class count = census::joint_region_count(
            hists,
            [&](const std::vector<double>& x) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += lambdas[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
                return s;
            },
            j_lo, j_hi);
        double totaln = std::pow(static_cast<double>(hist.total), n);
        double freq = count.get_d() / totaln;
        double err = std::abs(freq - main);
        double shape = std::pow(static_cast<double>(p), -0.25 + 0.25 / n);
        if (i == 0) C = 2.0 * err / shape;
        ExperimentReport r;
        r.experiment = "convolve-ec";
        r.label = "p=" + std::to_string(p) + " J=[" + fmt(j_lo) + "," + fmt(j_hi) + "]";
        r.empirical = count.get_d();
        r.frequency = freq;
        r.main_term = main;
        r.main_quad_error = quad;
        r.abs_error = err;
        r.constant = C;
        r.bound = C * shape;
        r.pass = err <= r.bound + quad + 1e-12;
        r.runtime_ms = t.ms();
        suite.add(std::move(r));

        if (integral_lambdas) {
            // exact-sum hit rate: frequency of sum lambda_j a_p(E_j) = 0
            // by iterating over the trace-value support
            std::vector<std::int64_t> keys = hist.keys();
            double hits = 0.0;
            std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
            while (true) {
                std::int64_t s = 0;
                double mult = 1.0;
                for (int j = 0; j < n; ++j) {
                    std::int64_t tkey = keys[idx[static_cast<std::size_t>(j)]];
                    s += static_cast<std::int64_t>(std::llround(lambdas[static_cast<std::size_t>(j)])) * tkey;
                    mult *= static_cast<double>(hist.count(tkey));
                }
                if (s == 0) hits += mult;
                int j = 0;
                while (j < n && ++idx[static_cast<std::size_t>(j)] >= keys.size()) {
                    idx[static_cast<std::size_t>(j)] = 0;
                    ++j;
                }
                if (j == n) break;
            }
            double hit_rate = hits / totaln;
            if (i == 0) Chit = 2.0 * hit_rate / shape;
            ExperimentReport h;
            h.experiment = "convolve-ec";
            h.label = "p=" + std::to_string(p) + " t=0 hit rate";
            h.empirical = hits;
            h.frequency = hit_rate;
            h.abs_error = hit_rate;
            h.constant = Chit;
            h.bound = Chit * shape;
            h.pass = hit_rate <= h.bound + 1e-12;
            suite.add(std::move(h));
        }
    }
    return suite;
}

SuiteResult run_convolution_cor_modular(std::int64_t p, const std::vector<std::vector<std::int64_t>>& weight_tuples,
                                        const std::vector<double>& lambdas, double j_lo, double j_hi, int resolution) {
    SuiteResult suite;
    int n = static_cast<int>(lambdas.size());
    (void)resolution;
    std::vector<std::pair<double, Density1D>> comps;
    for (double l : lambdas) comps.push_back({l, Density1D::plancherel(p)});
    Density1D star_c = measures::convolve(comps, 1e-4);
    Density1D star_f = measures::convolve(comps, 5e-5);
    double main = star_f.mass(j_lo, j_hi);
    double quad = std::abs(main - star_c.mass(j_lo, j_hi));

    double C = 0.0;
    for (std::size_t i = 0; i < weight_tuples.size(); ++i) {
        Timer t;
        const auto& ks = weight_tuples[i];
        if (static_cast<int>(ks.size()) != n) throw ArityMismatch("weight tuple arity");
        std::vector<hecke::EigenangleSet> sets;
        double dims = 1.0;
        for (std::int64_t k : ks) {
            sets.push_back(hecke::eigen_angles_level1(k, p));
            if (sets.back().d == 0) throw EmptySpace("trivial space in weight tuple");
            dims *= sets.back().d;
        }
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        double count = 0.0;
        while (true) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += lambdas[static_cast<std::size_t>(j)] * 0.5 *
                     sets[static_cast<std::size_t>(j)].two_cos_theta[idx[static_cast<std::size_t>(j)]];
            if (s >= j_lo && s <= j_hi) count += 1.0;
            int j = 0;
            while (j < n && ++idx[static_cast<std::size_t>(j)] >= sets[static_cast<std::size_t>(j)].two_cos_theta.size()) {
                idx[static_cast<std::size_t>(j)] = 0;
                ++j;
            }
            if (j == n) break;
        }
        double freq = count / dims;
        double err = std::abs(freq - main);
        double shape = std::pow(std::log(static_cast<double>(p)) / std::log(dims), 1.0 - 1.0 / n);
        if (i == 0) C = 2.0 * err / shape;
        ExperimentReport r;
        r.experiment = "convolve-mf";
        std::string ws;
        for (std::int64_t k : ks) ws += (ws.empty() ? "" : "/") + std::to_string(k);
        r.label = "p=" + std::to_string(p) + " k=" + ws;
        r.empirical = count;
        r.frequency = freq;
        r.main_term = main;
        r.main_quad_error = quad;
        r.abs_error = err;
        r.constant = C;
        r.bound = C * shape;
        r.pass = err <= r.bound + quad + 1e-12;
        r.runtime_ms = t.ms();
        suite.add(std::move(r));
    }
    return suite;
}

SuiteResult run_moment_suite(const std::vector<std::int64_t>& primes, int R_max, int k_max, int workers) {
    SuiteResult suite;
    double michel_C = 0.0;
    census::FamilySpec fam = census::FamilySpec::one_param({0, 1}, {1});
    for (std::size_t i = 0; i < primes.size(); ++i) {
        std::int64_t p = primes[i];
        Timer t;
        TraceHistogram hist = census::full_family_histogram(p, workers);
        // Birch moments against Catalan(R) p^R
        for (int R = 0; R <= R_max; ++R) {
            mpq_class mom = census::power_moment(hist, R);
            double catalan = 1.0;
            for (int j = 2; j <= R; ++j) catalan = catalan * (2 * (2 * j - 1)) / (j + 1.0);
            double target = catalan * std::pow(static_cast<double>(p), R);
            double ratio = mom.get_d() / target;
            ExperimentReport r;
            r.experiment = "moments";
            r.label = "birch p=" + std::to_string(p) + " R=" + std::to_string(R);
            r.frequency = ratio;
            r.main_term = 1.0;
            r.abs_error = std::abs(ratio - 1.0);
            r.bound = R == 0 ? 1e-15 : 0.15;
            r.constant = 0.15;
            r.pass = r.abs_error <= r.bound;
            suite.add(std::move(r));
        }
        // Katz envelope
        for (int k = 1; k <= k_max; ++k) {
            double v = census::sym_power_sum(hist, k);
            ExperimentReport r;
            r.experiment = "moments";
            r.label = "katz p=" + std::to_string(p) + " k=" + std::to_string(k);
            r.frequency = v;
            r.abs_error = std::abs(v);
            r.bound = 5.0 * (k + 1) / std::sqrt(static_cast<double>(p));
            r.constant = 5.0;
            r.pass = r.abs_error <= r.bound;
            suite.add(std::move(r));
        }
        // Michel envelope for A = T, B = 1
        TraceHistogram oh = census::one_param_histogram(fam, p, workers);
        double worst_ratio = 0.0;
        for (int k = 1; k <= 6; ++k) {
            double v = census::sym_power_sum(oh, k);
            worst_ratio = std::max(worst_ratio, std::abs(v) * std::sqrt(static_cast<double>(p)) / (k + 1));
        }
        if (i == 0) michel_C = 2.0 * worst_ratio;  // factor-2 calibration slack
        for (int k = 1; k <= 6; ++k) {
            double v = census::sym_power_sum(oh, k);
            ExperimentReport r;
            r.experiment = "moments";
            r.label = "michel p=" + std::to_string(p) + " k=" + std::to_string(k);
            r.frequency = v;
            r.abs_error = std::abs(v);
            r.bound = michel_C * (k + 1) / std::sqrt(static_cast<double>(p));
            r.constant = michel_C;
            r.pass = r.abs_error <= r.bound * (1.0 + 1e-12);
            r.runtime_ms = t.ms();
            suite.add(std::move(r));
        }
    }
    return suite;
}

SuiteResult run_variation_demo(const std::vector<double>& targets) {
    SuiteResult suite;
    for (double X : targets) {
        Timer t;
        auto res = hk::appendix_partition(1.0, 1.0, -0.1, 0.1, X);
        // shortfall encoding keeps the report invariants exact:
        // |frequency - main_term| = abs_error and pass iff abs_error <= bound
        double shortfall = std::max(0.0, X - res.achieved);
        ExperimentReport r;
        r.experiment = "variation-demo";
        r.label = "X=" + fmt(X);
        r.empirical = res.achieved;
        r.frequency = X - shortfall;
        r.main_term = X;
        r.bound = 0.0;
        r.abs_error = shortfall;
        r.pass = shortfall <= 0.0;
        r.diag.push_back({"x_cuts", static_cast<double>(res.partition.x_cuts.size())});
        r.diag.push_back({"y_cuts", static_cast<double>(res.partition.y_cuts.size())});
        r.runtime_ms = t.ms();
        suite.add(std::move(r));
    }
    return suite;
}

namespace {

ExperimentReport et_report(const std::string& label, const SequenceND& seq, const ProductMeasure& pm,
                           const FourierCoeffProvider& coeffs, int degree, int n_boxes, std::mt19937_64& rng) {
    int n = seq.dims();
    std::vector<int> degrees(static_cast<std::size_t>(n), degree);
    disc::WeylSumTable W = disc::weyl_sums(seq, degrees);
    double X = seq.total_points();
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    ExperimentReport r;
    r.experiment = "et-check";
    r.label = label;
    double worst_margin = -1e300, obs_at_worst = 0.0, bound_at_worst = 0.0;
    for (int b = 0; b < n_boxes; ++b) {
        std::vector<selberg::IntervalMod1> box;
        std::vector<std::pair<double, double>> box_pairs;
        for (int j = 0; j < n; ++j) {
            double a = 0.98 * u01(rng);
            double w = (1.0 - a - 0.01) * u01(rng) + 0.005;
            box.emplace_back(a, std::min(1.0, a + w));
            box_pairs.push_back({box.back().a, box.back().b});
        }
        double observed = std::abs(seq.count_box(box_pairs) / X - pm.box_mass(box_pairs));
        double bound = disc::erdos_turan_bound(W, coeffs, coeffs.height(), box, degrees);
        if (observed - bound > worst_margin) {
            worst_margin = observed - bound;
            obs_at_worst = observed;
            bound_at_worst = bound;
        }
    }
    r.empirical = obs_at_worst;
    r.frequency = obs_at_worst;
    r.abs_error = obs_at_worst;
    r.bound = bound_at_worst;
    r.constant = static_cast<double>(n_boxes);
    r.pass = obs_at_worst <= bound_at_worst + 1e-9;
    return r;
}

}  // namespace

SuiteResult run_et_check(const std::vector<std::int64_t>& primes, int max_n, int n_boxes, std::uint64_t seed,
                         int degree, int workers) {
    SuiteResult suite;
    std::mt19937_64 rng(seed);
    for (std::int64_t p : primes) {
        Timer t;
        TraceHistogram hist = census::full_family_histogram(p, workers);
        AxisAtoms ax = census_axis_angle(hist);
        for (int n = 1; n <= max_n; ++n) {
            std::vector<AxisAtoms> axes(static_cast<std::size_t>(n), ax);
            SequenceND seq = SequenceND::product(axes);
            ProductMeasure pm;
            std::vector<FourierCoeffProvider> provs;
            for (int j = 0; j < n; ++j) {
                pm.factors.push_back(Density1D::angle_st());
                provs.push_back(FourierCoeffProvider::elliptic_st());
            }
            FourierCoeffProvider coeffs =
                n == 1 ? FourierCoeffProvider::elliptic_st() : FourierCoeffProvider::product_of(provs);
            ExperimentReport r =
                et_report("census p=" + std::to_string(p) + " n=" + std::to_string(n), seq, pm, coeffs, degree,
                          n_boxes, rng);
            r.runtime_ms = t.ms();
            suite.add(std::move(r));
        }
    }
    // synthetic uniform sequence against Lebesgue
    for (int n = 1; n <= max_n; ++n) {
        Timer t;
        AxisAtoms ax;
        const int X = 2520;
        for (int i = 0; i < X; ++i) {
            ax.pos.push_back((i + 0.5) / X);
            ax.weight.push_back(1);
        }
        ax.total = X;
        SequenceND seq = SequenceND::product(std::vector<AxisAtoms>(static_cast<std::size_t>(n), ax));
        ProductMeasure pm;
        std::vector<FourierCoeffProvider> provs;
        for (int j = 0; j < n; ++j) {
            pm.factors.push_back(lebesgue_density());
            provs.push_back(FourierCoeffProvider::lebesgue());
        }
        FourierCoeffProvider coeffs = n == 1 ? FourierCoeffProvider::lebesgue() : FourierCoeffProvider::product_of(provs);
        ExperimentReport r = et_report("uniform n=" + std::to_string(n), seq, pm, coeffs, degree, n_boxes, rng);
        r.runtime_ms = t.ms();
        suite.add(std::move(r));
    }
    return suite;
}

namespace {

// exact H-K variation of a piecewise-constant function: evaluate on the
// breakpoint grid refined by +-eps collars, where the function is constant on
// every refinement cell
double exact_pc_variation(const disc::PiecewiseConstant& f) {
    std::vector<std::vector<double>> grids;
    for (const auto& br : f.breaks) {
        std::vector<double> g;
        double span = br.back() - br.front();
        double eps = 1e-9 * span;
        for (double v : br) {
            g.push_back(std::max(br.front(), v - eps));
            g.push_back(std::min(br.back(), v + eps));
        }
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        grids.push_back(std::move(g));
    }
    hk::GridFunction gf = hk::GridFunction::from_function(grids, [&](const std::vector<double>& x) { return f.eval(x); });
    return hk::hk_variation(gf);
}

}  // namespace

SuiteResult run_kh_check(const std::vector<std::int64_t>& primes, const std::string& f_text, double j_lo, double j_hi,
                         int boxes, int workers) {
    SuiteResult suite;
    for (std::int64_t p : primes) {
        Timer t;
        TraceHistogram hist = census::full_family_histogram(p, workers);

        // n = 1: indicator of the x-interval [j_lo, j_hi] on the angle side
        {
            AxisAtoms ax = census_axis_angle(hist);
            SequenceND seq = SequenceND::product({ax});
            ProductMeasure pm{{Density1D::angle_st()}};
            double u1 = std::acos(std::clamp(j_hi, -1.0, 1.0)) / PI;
            double u2 = std::acos(std::clamp(j_lo, -1.0, 1.0)) / PI;
            disc::PiecewiseConstant f;
            f.breaks = {{0.0, u1, u2, 1.0}};
            f.cell_values = {0.0, 1.0, 0.0};
            double vstar = exact_pc_variation(f);
            auto D = disc::empirical_discrepancy(seq, pm);
            auto cert = disc::koksma_hlawka_certificate(seq, f, pm, vstar, D.upper);
            ExperimentReport r;
            r.experiment = "kh-check";
            r.label = "p=" + std::to_string(p) + " n=1 J=[" + fmt(j_lo) + "," + fmt(j_hi) + "]";
            r.empirical = cert.gap;
            r.frequency = cert.empirical_sum;
            r.main_term = cert.main_term;
            r.abs_error = cert.gap;
            r.bound = cert.vstar_bound * cert.discrepancy_bound;
            r.constant = vstar;
            r.pass = cert.pass;
            r.diag.push_back({"discrepancy", D.upper});
            suite.add(std::move(r));
        }

        // n = 2: box-cover approximant of F^{-1}(J) on the angle side
        {
            expr::ExprAST F = expr::parse_f_expr(f_text, 2);
            int N = boxes > 0 ? boxes : default_cover_boxes(p, 2);
            RegionCover cover = build_region_cover(F, j_lo, j_hi, 2, N);

            // theta-side breakpoints: u = acos(x)/pi reverses the x grid
            std::vector<double> xg, ug;
            for (int i = 0; i <= N; ++i) xg.push_back(-1.0 + 2.0 * i / N);
            for (int i = N; i >= 0; --i) ug.push_back(std::acos(std::clamp(xg[static_cast<std::size_t>(i)], -1.0, 1.0)) / PI);
            disc::PiecewiseConstant f;
            f.breaks = {ug, ug};
            f.cell_values.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0.0);
            for (const auto& cell : cover.cells) {
                // x-cell (i, j) maps to theta-cell (N-1-i, N-1-j)
                std::size_t ti = static_cast<std::size_t>(N - 1 - cell[0]);
                std::size_t tj = static_cast<std::size_t>(N - 1 - cell[1]);
                f.cell_values[ti * static_cast<std::size_t>(N) + tj] = 1.0;
            }
            double vstar = exact_pc_variation(f);
            AxisAtoms ax = census_axis_angle(hist);
            SequenceND seq = SequenceND::product({ax, ax});
            ProductMeasure pm{{Density1D::angle_st(), Density1D::angle_st()}};
            auto D = disc::empirical_discrepancy(seq, pm);
            auto cert = disc::koksma_hlawka_certificate(seq, f, pm, vstar, D.upper);
            ExperimentReport r;
            r.experiment = "kh-check";
            r.label = "p=" + std::to_string(p) + " n=2 F=" + f_text + " cover N=" + std::to_string(N);
            r.empirical = cert.gap;
            r.frequency = cert.empirical_sum;
            r.main_term = cert.main_term;
            r.abs_error = cert.gap;
            r.bound = cert.vstar_bound * cert.discrepancy_bound;
            r.constant = vstar;
            r.pass = cert.pass;
            r.diag.push_back({"discrepancy", D.upper});
            r.diag.push_back({"cover_cells", static_cast<double>(cover.cells.size())});
            r.runtime_ms = t.ms();
            suite.add(std::move(r));
        }
    }
    return suite;
}

}  // namespace satolab::lab
