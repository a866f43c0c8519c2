// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Every tolerance and constant is pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qexp_oracle.hpp"
#include "satolab/experiments.hpp"
#include "satolab/selberg.hpp"

using namespace satolab;
using namespace satolab::lab;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void report(int id, const std::string& name, bool pass, double seconds, const std::string& detail = "") {
    std::printf("[%s] criterion %02d (%6.2f s): %s%s%s\n", pass ? "PASS" : "FAIL", id, seconds, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

std::vector<std::string> g_sublines;

void subline(const std::string& text) { g_sublines.push_back(text); }

void flush_sublines() {
    for (const auto& s : g_sublines) std::printf("         - %s\n", s.c_str());
    g_sublines.clear();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// head-to-tail decay with a negative fitted log-log slope; the operational
// reading of "error column decreasing" for the sweep criteria
bool column_decays(const std::vector<double>& ps, const std::vector<double>& errs, double* slope_out) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double x = std::log(ps[i]), y = std::log(std::max(errs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (slope_out) *slope_out = slope;
    return errs.back() < errs.front() && slope < 0.0;
}

census::TraceHistogram naive_census(std::int64_t p) {
    census::PrimeField F(p);
    census::TraceHistogram h;
    h.p = p;
    for (std::int64_t a = 0; a < p; ++a)
        for (std::int64_t b = 0; b < p; ++b) {
            if ((4 * a * a % p * a + 27 * b * b) % p == 0) continue;
            std::int64_t s = 0;
            for (std::int64_t x = 0; x < p; ++x) s += F.chi(((x * x % p) * x + a * x + b) % p);
            h.counts[-s] += 1;
            h.total += 1;
        }
    return h;
}

void criterion_1() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (std::int64_t p : {5, 7, 11, 13}) {
        census::TraceHistogram fast = census::full_family_histogram(p);
        census::TraceHistogram slow = naive_census(p);
        if (fast.counts != slow.counts || fast.total != p * (p - 1)) {
            ok = false;
            detail = "mismatch at p=" + std::to_string(p);
        }
    }
    double secs = t.s();
    if (secs >= 1.0) {
        ok = false;
        detail += " runtime over 1 s";
    }
    report(1, "census equals the naive enumeration for p in {5,7,11,13}", ok, secs, detail);
}

void criterion_2() {
    Timer t;
    auto suite = run_birch({101, 211, 401, 1009}, 4);
    bool ok = suite.all_pass;
    std::string col;
    for (std::size_t i = 0; i < suite.reports.size(); ++i) {
        const auto& r = suite.reports[i];
        col += fmt(r.abs_error) + " ";
        if (i > 0 && r.abs_error >= suite.reports[i - 1].abs_error) ok = false;
    }
    double secs = t.s();
    if (secs >= 30.0) ok = false;
    report(2, "Birch one-dimensional sweep: sup-interval error <= C p^(-1/4), strictly decreasing", ok, secs,
           "errors: " + col + "(C=" + fmt(suite.reports[0].constant) + ")");
}

void criterion_3() {
    Timer t;
    bool ok = true;
    std::string detail;
    census::TraceHistogram h1009 = census::full_family_histogram(1009, 4);
    for (int R : {1, 2, 3}) {
        mpq_class mom = census::power_moment(h1009, R);
        double catalan = 1.0;
        for (int j = 2; j <= R; ++j) catalan = catalan * (2 * (2 * j - 1)) / (j + 1.0);
        double ratio = mom.get_d() / (catalan * std::pow(1009.0, R));
        if (std::abs(ratio - 1.0) > 0.15) {
            ok = false;
            detail += "R=" + std::to_string(R) + " ratio=" + fmt(ratio) + " ";
        }
    }
    // exact rational moments match brute force for p <= 13
    for (std::int64_t p : {5, 7, 11, 13}) {
        census::TraceHistogram h = census::full_family_histogram(p);
        census::TraceHistogram naive = naive_census(p);
        for (int R : {0, 1, 2, 3}) {
            mpz_class s(0);
            for (const auto& [tt, c] : naive.counts) {
                mpz_class tp(1);
                for (int i = 0; i < 2 * R; ++i) tp *= tt;
                s += tp * c;
            }
            mpq_class expect(s, mpz_class(p) * mpz_class(p - 1));
            expect.canonicalize();
            if (census::power_moment(h, R) != expect) {
                ok = false;
                detail += "exact mismatch p=" + std::to_string(p) + " ";
            }
        }
    }
    report(3, "Birch moments: |moment/(Catalan(R) p^R) - 1| <= 0.15 at p=1009; exact moments for p <= 13", ok, t.s(),
           detail);
}

void criterion_4() {
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (std::int64_t p : {101, 1009}) {
        census::TraceHistogram h = census::full_family_histogram(p, 4);
        for (int k = 1; k <= 10; ++k) {
            double v = std::abs(census::sym_power_sum(h, k));
            double bound = 5.0 * (k + 1) / std::sqrt(static_cast<double>(p));
            worst = std::max(worst, v / bound);
            if (v > bound) ok = false;
        }
    }
    double secs = t.s();
    if (secs >= 30.0) ok = false;
    report(4, "Katz envelope: |sym sums| <= 5 (k+1)/sqrt(p) for p in {101,1009}, k <= 10", ok, secs,
           "worst ratio " + fmt(worst));
}

void criterion_5() {
    Timer t;
    census::FamilySpec fam = census::FamilySpec::one_param({0, 1}, {1});
    double C = 0.0;
    bool ok = true;
    std::string detail;
    for (std::int64_t p : {101, 1009}) {
        census::TraceHistogram h = census::one_param_histogram(fam, p, 4);
        double worst = 0.0;
        for (int k = 1; k <= 6; ++k)
            worst = std::max(worst, std::abs(census::sym_power_sum(h, k)) * std::sqrt(static_cast<double>(p)) / (k + 1));
        if (p == 101) {
            C = 2.0 * worst;  // factor-2 calibration slack, recorded
            detail = "fit ratio " + fmt(worst) + " -> C=" + fmt(C);
        } else if (worst > C) {
            ok = false;
            detail += "; violated at p=" + std::to_string(p) + " ratio " + fmt(worst);
        } else {
            detail += "; p=1009 worst ratio " + fmt(worst);
        }
    }
    report(5, "Michel envelope for A=T, B=1: |sym sums| <= C (k+1)/sqrt(p), C fitted at p=101", ok, t.s(), detail);
}

void criterion_6() {
    Timer t;
    std::mt19937_64 rng(20260809);
    std::uniform_real_distribution<double> ua(0.0, 0.85), ux(0.0, 1.0);
    std::uniform_int_distribution<int> um(1, 12);
    bool ok = true;
    std::string detail;
    for (int n = 1; n <= 3 && ok; ++n) {
        for (int inst = 0; inst < 200 && ok; ++inst) {
            std::vector<selberg::IntervalMod1> Is;
            std::vector<int> Ms;
            std::vector<selberg::AxisPolys> axes;
            for (int j = 0; j < n; ++j) {
                double a = ua(rng);
                std::uniform_real_distribution<double> ub(a + 0.02, std::min(1.0, a + 0.9));
                double b = std::min(ub(rng), 1.0);
                Is.emplace_back(a, b);
                Ms.push_back(um(rng));
                axes.push_back(selberg::periodized_axis_polys(Is.back(), Ms.back()));
            }
            // sandwich at 1000 sampled points, 1e-3 exclusion around endpoints
            for (int s = 0; s < 1000; ++s) {
                std::vector<double> x(static_cast<std::size_t>(n));
                bool edge = false;
                double chi = 1.0;
                for (int j = 0; j < n; ++j) {
                    x[static_cast<std::size_t>(j)] = ux(rng);
                    if (std::abs(x[static_cast<std::size_t>(j)] - Is[static_cast<std::size_t>(j)].a) < 1e-3 ||
                        std::abs(x[static_cast<std::size_t>(j)] - Is[static_cast<std::size_t>(j)].b) < 1e-3)
                        edge = true;
                    if (!(x[static_cast<std::size_t>(j)] >= Is[static_cast<std::size_t>(j)].a &&
                          x[static_cast<std::size_t>(j)] <= Is[static_cast<std::size_t>(j)].b))
                        chi = 0.0;
                }
                if (edge) continue;
                double pv = 1.0, pv2w = 1.0, pvw = 1.0;
                for (int j = 0; j < n; ++j) {
                    double v = axes[static_cast<std::size_t>(j)].eval_v(x[static_cast<std::size_t>(j)]);
                    double w = axes[static_cast<std::size_t>(j)].eval_w(x[static_cast<std::size_t>(j)]);
                    pv *= v;
                    pv2w *= v + 2.0 * w;
                    pvw *= v + w;
                }
                double plus = pvw;
                double minus = pv - pv2w + pvw;
                if (!(minus <= chi + 1e-8 && plus >= chi - 1e-8)) {
                    ok = false;
                    detail = "sandwich violated, n=" + std::to_string(n) + " inst=" + std::to_string(inst);
                    break;
                }
            }
            // coefficient bound and L1 bound of the majorant pair
            double dM = selberg::delta_M(Is, Ms);
            double lam = 1.0;
            for (const auto& I : Is) lam *= I.length();
            for (auto sign : {selberg::MajorantSign::Plus, selberg::MajorantSign::Minus}) {
                selberg::TrigPolynomial Fp = selberg::cochrane_nd(Is, Ms, sign);
                std::size_t total = Fp.table.size();
                for (std::size_t flat = 0; flat < total && ok; ++flat) {
                    std::size_t rem = flat;
                    double pprod = 1.0;
                    for (int j = n - 1; j >= 0; --j) {
                        int width = 2 * Ms[static_cast<std::size_t>(j)] + 1;
                        int mj = static_cast<int>(rem % static_cast<std::size_t>(width)) - Ms[static_cast<std::size_t>(j)];
                        rem /= static_cast<std::size_t>(width);
                        pprod *= selberg::p_m(Is[static_cast<std::size_t>(j)], mj);
                    }
                    if (std::abs(Fp.table[flat]) > dM + pprod + 1e-9) {
                        ok = false;
                        detail = "coefficient bound violated";
                    }
                }
                double c0 = Fp.coeff(std::vector<int>(static_cast<std::size_t>(n), 0)).real();
                double l1 = sign == selberg::MajorantSign::Plus ? c0 - lam : lam - c0;
                if (!(l1 >= -1e-9 && l1 <= dM + 1e-9)) {
                    ok = false;
                    detail = "L1 bound violated";
                }
            }
        }
    }
    report(6, "Selberg sandwich, coefficient and L1 bounds: 200 random instances per n in {1,2,3}", ok, t.s(), detail);
}

void criterion_7() {
    Timer t;
    auto suite = run_et_check({101, 401}, 2, 500, 424243, 30, 4);
    bool ok = suite.all_pass;
    std::string detail;
    for (const auto& r : suite.reports) detail += r.label + " worst " + fmt(r.abs_error) + "; ";
    report(7, "Erdos-Turan bound never violated on 500 random boxes per sequence", ok, t.s(), detail);
}

void criterion_8() {
    Timer t;
    bool ok = true;
    int certs = 0;
    try {
        // n=1 interval certificates on the Birch primes, n=2 cover
        // certificates on the joint runs
        for (std::int64_t p : {101, 211, 401, 1009}) {
            for (auto [f, lo, hi] : {std::tuple{"x1+x2", -0.5, 0.5}, std::tuple{"x1*x2", 0.0, 1.0}}) {
                auto kh = run_kh_check({p}, f, lo, hi, 0, 4);
                ok = ok && kh.all_pass;
                certs += static_cast<int>(kh.reports.size());
            }
        }
    } catch (const CertificateViolation&) {
        ok = false;
    }
    report(8, "Koksma-Hlawka certificates pass on the Birch and joint-run sequences", ok, t.s(),
           std::to_string(certs) + " certificates");
}

void criterion_9() {
    Timer t;
    std::vector<std::tuple<std::string, double, double>> combos{
        {"x1+x2", -0.5, 0.5}, {"x1+x2", 0.0, 1.0}, {"x1*x2", -0.5, 0.5}, {"x1*x2", 0.0, 1.0}};
    std::vector<std::int64_t> primes{101, 211, 401, 1009};
    bool ok = true;
    // one constant for the whole (F, J) grid, fitted at p=101: the error bound
    // of the reproduced theorem is uniform in F and J
    double fitC = 0.0;
    std::vector<SuiteResult> suites;
    for (auto& [f, lo, hi] : combos) {
        suites.push_back(run_joint_ec(primes, 2, f, lo, hi, 0, 1024, 4));
        fitC = std::max(fitC, suites.back().reports[0].abs_error / std::pow(101.0, -0.125));
    }
    fitC *= 2.0;  // factor-2 calibration slack
    for (std::size_t c = 0; c < combos.size(); ++c) {
        std::vector<double> ps, errs;
        std::string col;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const auto& r = suites[c].reports[i];
            double bound = fitC * std::pow(static_cast<double>(primes[i]), -0.125);
            if (r.abs_error > bound + r.main_quad_error) ok = false;
            ps.push_back(static_cast<double>(primes[i]));
            errs.push_back(r.abs_error);
            col += fmt(r.abs_error) + " ";
        }
        double slope = 0.0;
        bool decays = column_decays(ps, errs, &slope);
        if (!decays) ok = false;
        subline(std::get<0>(combos[c]) + " J=[" + fmt(std::get<1>(combos[c])) + "," + fmt(std::get<2>(combos[c])) +
                "]: errors " + col + "(slope " + fmt(slope) + (decays ? ", decays)" : ", NO DECAY)"));
    }
    double secs = t.s();
    if (secs >= 60.0) ok = false;
    report(9, "joint elliptic counts vs product Sato-Tate: |emp - main| <= C p^(-1/8), C uniform over (F,J)", ok, secs,
           "C=" + fmt(fitC));
    flush_sublines();
}

void criterion_10() {
    Timer t;
    bool ok = true;
    // recorded constants, frozen from the calibration runs
    const double envelope_C = 2.0;  // |deviation| <= envelope_C / d over the sweep
    const double joint_C = 0.12;    // joint n=2 errors <= joint_C (log p / log(d1 d2))^{1/2}
    for (int m : {2, 4}) {
        std::vector<double> ds, devs;
        std::string col;
        bool env_ok = true;
        for (std::int64_t k = 50; k <= 500; k += 50) {
            int d = hecke::dim_cuspforms_level1(k);
            double dev = std::abs(hecke::weyl_cos_sum_level1(k, 2, m) / d - hecke::plancherel_cm(2, m));
            ds.push_back(static_cast<double>(d));
            devs.push_back(dev);
            col += fmt(dev) + " ";
            if (dev > envelope_C / d) env_ok = false;
        }
        double slope = 0.0;
        bool decays = column_decays(ds, devs, &slope);
        if (!decays || !env_ok) ok = false;
        subline("m=" + std::to_string(m) + " deviations: " + col + "(slope " + fmt(slope) +
                (decays ? ", decays" : ", NO DECAY") + (env_ok ? ", envelope ok)" : ", envelope violated)"));
    }
    for (auto& ks : std::vector<std::vector<std::int64_t>>{{120, 144}, {240, 248}}) {
        auto s = run_joint_mf_fixed_prime(2, ks, "x1+x2", -0.5, 0.5, 1024, joint_C);
        const auto& r = s.reports[0];
        if (!r.pass) ok = false;
        subline(r.label + ": err " + fmt(r.abs_error) + " vs bound " + fmt(r.bound));
    }
    report(10, "modular vertical Sato-Tate: coefficient decay across k=50..500 and certified joint runs", ok, t.s(),
           "envelope C=" + fmt(envelope_C) + ", joint C=" + fmt(joint_C));
    flush_sublines();
}

void criterion_11() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (std::int64_t k : {12, 16, 18, 20, 22, 26, 24, 28})
        for (std::int64_t n : {2, 3, 4, 5, 9, 25})
            if (hecke::trace_hecke_level1(k, n) != qexp_oracle::trace_oracle(k, n)) {
                ok = false;
                detail += "k=" + std::to_string(k) + ",n=" + std::to_string(n) + " ";
            }
    report(11, "Eichler-Selberg traces equal the q-expansion oracle (48 pairs, exact)", ok, t.s(), detail);
}

void criterion_12() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (std::int64_t k : {24, 28}) {
        for (std::int64_t p : {2, 3}) {
            hecke::EigenangleSet E = hecke::eigen_angles_level1(k, p);
            for (double tc : E.two_cos_theta)
                if (std::abs(tc) > 2.0) ok = false;
            std::int64_t pm = 1;
            for (int m = 1; m <= E.d; ++m) {
                pm *= p;
                double sm = 0.0;
                for (double tc : E.two_cos_theta) sm += census::sym_eval(m, tc);
                // s_m from the exact trace of T_{p^m}
                mpz_class tr = hecke::trace_hecke_level1(k, pm);
                mpq_class q(tr);
                mpz_class den;
                long e2 = static_cast<long>(m) * static_cast<long>(k - 1);
                mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e2 / 2));
                q /= mpq_class(den);
                double expect = q.get_d();
                if (e2 % 2) expect /= std::sqrt(static_cast<double>(p));
                if (std::abs(sm - expect) > 1e-8) {
                    ok = false;
                    detail += "k=" + std::to_string(k) + ",p=" + std::to_string(p) + ",m=" + std::to_string(m) + " ";
                }
            }
        }
    }
    report(12, "eigen-angle recovery reproduces power sums to 1e-8 with all roots in [-2,2]", ok, t.s(), detail);
}

void criterion_13() {
    Timer t;
    auto suite = run_variation_demo({10, 100, 1000});
    bool ok = suite.all_pass;
    // partition sizes grow about linearly with the target
    double s10 = 0, s100 = 0, s1000 = 0;
    for (const auto& r : suite.reports)
        for (const auto& [k, v] : r.diag)
            if (k == "x_cuts") {
                if (r.label == "X=10") s10 = v;
                if (r.label == "X=100") s100 = v;
                if (r.label == "X=1000") s1000 = v;
            }
    if (!(s100 / s10 > 3 && s100 / s10 < 30 && s1000 / s100 > 3 && s1000 / s100 < 30)) ok = false;
    double secs = t.s();
    if (secs >= 5.0) ok = false;
    report(13, "staircase construction achieves variation >= X for X in {10,100,1000}, ~linear size", ok, secs,
           "cuts: " + fmt(s10) + "/" + fmt(s100) + "/" + fmt(s1000));
}

void criterion_14() {
    Timer t;
    bool ok = true;
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> uv(-1.0, 1.0), ul(-2.0, 2.0);
    auto ugrid = [](int n) {
        std::vector<double> g;
        for (int i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) / n);
        return g;
    };
    auto random_gf = [&](int axes, int pts) {
        hk::GridFunction g;
        for (int j = 0; j < axes; ++j) g.grids.push_back(ugrid(pts));
        std::size_t total = 1;
        for (const auto& ax : g.grids) total *= ax.size();
        g.values.resize(total);
        for (auto& v : g.values) v = uv(rng);
        return g;
    };
    for (int trial = 0; trial < 100; ++trial) {
        hk::GridFunction f = random_gf(2, 6), g = random_gf(2, 6);
        double l1 = ul(rng), l2 = ul(rng);
        hk::GridFunction combo = f;
        for (std::size_t i = 0; i < combo.values.size(); ++i) combo.values[i] = l1 * f.values[i] + l2 * g.values[i];
        if (hk::hk_variation(combo) > std::abs(l1) * hk::hk_variation(f) + std::abs(l2) * hk::hk_variation(g) + 1e-9)
            ok = false;
    }
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        hk::GridFunction f = random_gf(1, 8), g = random_gf(1, 8);
        hk::GridFunction prod;
        prod.grids = {f.grids[0], g.grids[0]};
        prod.values.resize(f.values.size() * g.values.size());
        for (std::size_t i = 0; i < f.values.size(); ++i)
            for (std::size_t j = 0; j < g.values.size(); ++j)
                prod.values[i * g.values.size() + j] = f.values[i] * g.values[j];
        double finf = 0, ginf = 0;
        for (double v : f.values) finf = std::max(finf, std::abs(v));
        for (double v : g.values) ginf = std::max(ginf, std::abs(v));
        double rhs = finf * hk::hk_variation(g) + ginf * hk::hk_variation(f);
        if (rhs > 0) worst_ratio = std::max(worst_ratio, hk::hk_variation(prod) / rhs);
    }
    if (worst_ratio > 5.0) ok = false;  // recorded constant for the fixed suite

    auto xy = hk::GridFunction::from_function({ugrid(7), ugrid(5)},
                                              [](const std::vector<double>& x) { return x[0] * x[1]; });
    if (std::abs(hk::vitali_variation(xy) - 1.0) > 1e-12) ok = false;
    report(14, "H-K variation algebra: subadditivity, product bound (C=5), xy telescoping exact", ok, t.s(),
           "product ratio " + fmt(worst_ratio));
}

void criterion_15() {
    Timer t;
    bool ok = true;
    std::string detail;
    // criterion 1 runs: census histograms
    for (std::int64_t p : {13, 101}) {
        if (census::full_family_histogram(p, 1).to_json() != census::full_family_histogram(p, 4).to_json()) {
            ok = false;
            detail += "census p=" + std::to_string(p) + " differs; ";
        }
    }
    // criterion 9 runs
    auto a9 = run_joint_ec({101, 211}, 2, "x1+x2", -0.5, 0.5, 0, 512, 1);
    auto b9 = run_joint_ec({101, 211}, 2, "x1+x2", -0.5, 0.5, 0, 512, 4);
    if (reports_to_json(a9.reports) != reports_to_json(b9.reports)) {
        ok = false;
        detail += "joint-ec reports differ; ";
    }
    // criterion 10 runs
    auto a10 = run_joint_mf_fixed_prime(2, {120, 144}, "x1+x2", -0.5, 0.5, 512, 0.12, 1);
    auto b10 = run_joint_mf_fixed_prime(2, {120, 144}, "x1+x2", -0.5, 0.5, 512, 0.12, 4);
    if (reports_to_json(a10.reports) != reports_to_json(b10.reports)) {
        ok = false;
        detail += "joint-mf reports differ; ";
    }
    report(15, "byte-identical reports across worker counts {1,4} for criteria 1, 9, 10 runs", ok, t.s(), detail);
}

}  // namespace

int main() {
    Timer total;
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14();
    criterion_15();
    std::printf("%s: %d/15 criteria passed in %.1f s\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                15 - g_failures, total.s());
    return g_failures == 0 ? 0 : 1;
}
