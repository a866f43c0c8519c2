#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "satolab/measures.hpp"

using namespace satolab;
using namespace satolab::measures;

namespace {

// composite 10-point Gauss-Legendre, used as an independent quadrature oracle
double gl10(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double xs[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                 0.8650633666889845, 0.9739065285171717};
    static const double ws[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                 0.1494513491505806, 0.0666713443086881};
    double total = 0.0;
    double h = (b - a) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double c = a + (pnl + 0.5) * h, r = 0.5 * h;
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += ws[i] * (f(c - r * xs[i]) + f(c + r * xs[i]));
        total += s * r;
    }
    return total;
}

double sample_sato_tate(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 1.0);
    while (true) {
        double x = ux(rng);
        if (uy(rng) <= std::sqrt(1.0 - x * x)) return x;
    }
}

}  // namespace

TEST_SUITE_BEGIN("measures");

TEST_CASE("density point values") {
    Density1D st = Density1D::sato_tate();
    CHECK(st(0.0) == doctest::Approx(2.0 / PI).epsilon(1e-15));
    CHECK(st(1.0) == 0.0);
    CHECK(st(-1.0) == 0.0);
    CHECK(st(1.5) == 0.0);

    Density1D h2 = Density1D::plancherel(2);
    CHECK(h2(0.0) == doctest::Approx(6.0 / (4.5 * PI)).epsilon(1e-12));
    CHECK(h2(0.0) == doctest::Approx(0.42441).epsilon(1e-4));

    Density1D g = Density1D::angle_st();
    CHECK(g(0.25) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g(0.5) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("densities are normalized") {
    for (auto d : {Density1D::sato_tate(), Density1D::plancherel(2), Density1D::plancherel(5),
                   Density1D::plancherel(1009), Density1D::angle_st(), Density1D::angle_plancherel(2),
                   Density1D::angle_plancherel(101)}) {
        CHECK(d.mass(d.support_lo(), d.support_hi()) == doctest::Approx(1.0).epsilon(1e-9));
    }
    Density1D s = Density1D::scaled(-2.0, Density1D::sato_tate());
    CHECK(s.mass(-2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.support_lo() == -2.0);
    CHECK(s.support_hi() == 2.0);
}

TEST_CASE("box masses against closed forms and the quadrature oracle") {
    ProductMeasure st1{{Density1D::sato_tate()}};
    CHECK(integrate_box(st1, {{-1.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_box(st1, {{0.0, 1.0}}) == doctest::Approx(0.5).epsilon(1e-12));

    // independent oracle: theta-side Gauss-Legendre at ~1e-12
    Density1D h5 = Density1D::plancherel(5);
    Density1D a5 = Density1D::angle_plancherel(5);
    double oracle = 2.0 * gl10([&](double t) { return a5(t); }, 1.0 / 6.0, 0.25, 64);
    CHECK(h5.mass(0.0, 0.5) == doctest::Approx(oracle).epsilon(1e-10));

    ProductMeasure pm2{{Density1D::sato_tate(), Density1D::plancherel(5)}};
    double m = integrate_box(pm2, {{0.0, 1.0}, {0.0, 0.5}});
    CHECK(m == doctest::Approx(0.5 * oracle).epsilon(1e-9));
}

TEST_CASE("fourier coefficients") {
    auto mp5 = FourierCoeffProvider::modular_plancherel(5);
    CHECK(mp5.coeff1(0) == 1.0);
    CHECK(mp5.coeff1(2) == doctest::Approx(0.1 - 0.5).epsilon(1e-15));
    CHECK(mp5.coeff1(1) == 0.0);
    CHECK(mp5.coeff1(-2) == mp5.coeff1(2));

    auto est = FourierCoeffProvider::elliptic_st();
    CHECK(est.coeff1(1) == -0.5);
    CHECK(est.coeff1(0) == 1.0);
    CHECK(est.coeff1(3) == 0.0);

    auto prod = FourierCoeffProvider::product_of({est, est});
    CHECK(prod.coeff({1, 1}) == 0.25);
    CHECK(prod.coeff({0, 0}) == 1.0);
    CHECK(prod.coeff({1, 2}) == 0.0);
    CHECK_THROWS_AS(prod.coeff({1}), ArityMismatch);
}

TEST_CASE("angle densities match their fourier coefficients") {
    // c_m = int_0^1 G(t) cos(2 pi m t) dt; G is smooth and periodic so the
    // rectangle rule converges spectrally
    const int N = 8192;
    auto numeric_cm = [&](const Density1D& g, int m) {
        KahanSum re;
        for (int i = 0; i < N; ++i) {
            double t = (i + 0.5) / N;
            re.add(g(t) * std::cos(2.0 * PI * m * t));
        }
        return re.value() / N;
    };
    Density1D gst = Density1D::angle_st();
    auto est = FourierCoeffProvider::elliptic_st();
    for (int m = 0; m <= 10; ++m) CHECK(std::abs(numeric_cm(gst, m) - est.coeff1(m)) < 1e-8);
    for (std::int64_t p : {2, 5, 101}) {
        Density1D gp = Density1D::angle_plancherel(p);
        auto mp = FourierCoeffProvider::modular_plancherel(p);
        for (int m = 0; m <= 10; ++m) CHECK(std::abs(numeric_cm(gp, m) - mp.coeff1(m)) < 1e-8);
    }
}

TEST_CASE("plancherel converges to sato-tate") {
    Density1D st = Density1D::sato_tate();
    for (std::int64_t p : {1009, 2003, 5003}) {
        Density1D hp = Density1D::plancherel(p);
        double sup = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            double x = -0.99 + 1.98 * i / 2000.0;
            sup = std::max(sup, std::abs(hp(x) - st(x)));
        }
        CHECK(sup <= 10.0 / static_cast<double>(p));
    }
}

TEST_CASE("mu heights") {
    CHECK(FourierCoeffProvider::elliptic_st().height() == 2.0);
    auto mp2 = FourierCoeffProvider::modular_plancherel(2);
    // sup of the angle density is attained at cos(2 pi t) = 0
    Density1D g2 = Density1D::angle_plancherel(2);
    CHECK(mp2.height() == doctest::Approx(g2(0.25)).epsilon(1e-12));
    CHECK(Density1D::angle_plancherel(101).sup_density() <= 2.0);
}

TEST_CASE("region integration") {
    ProductMeasure st2{{Density1D::sato_tate(), Density1D::sato_tate()}};
    RegionSpec full{2, [](const std::vector<double>& x) { return x[0] + x[1]; }, -2.0, 2.0};
    auto r = integrate_region(st2, full, 512);
    CHECK(r.value == doctest::Approx(1.0).epsilon(2e-3));

    ProductMeasure st1{{Density1D::sato_tate()}};
    RegionSpec half{1, [](const std::vector<double>& x) { return x[0]; }, 0.0, 1.0};
    auto r1 = integrate_region(st1, half, 512);
    CHECK(r1.value == doctest::Approx(0.5).epsilon(1e-3));

    // product region has mass exactly 1/2 by sign symmetry
    RegionSpec prod{2, [](const std::vector<double>& x) { return x[0] * x[1]; }, 0.0, 1.0};
    auto r2 = integrate_region(st2, prod, 512);
    CHECK(r2.value == doctest::Approx(0.5).epsilon(2e-3));

    // Monte Carlo oracle for the same region
    std::mt19937_64 rng(20260809);
    int hits = 0;
    const int NMC = 2'000'000;
    for (int i = 0; i < NMC; ++i) {
        double v = sample_sato_tate(rng) * sample_sato_tate(rng);
        if (v >= 0.0 && v <= 1.0) ++hits;
    }
    CHECK(r2.value == doctest::Approx(static_cast<double>(hits) / NMC).epsilon(3e-3));

    CHECK_THROWS_AS(integrate_region(st1, prod, 64), ArityMismatch);
    // worker independence, bit for bit
    auto w1 = integrate_region(st2, prod, 256, 1);
    auto w4 = integrate_region(st2, prod, 256, 4);
    CHECK(w1.value == w4.value);
}

TEST_CASE("convolution: identity, symmetry, mass") {
    Density1D st = Density1D::sato_tate();
    Density1D single = convolve({{1.0, st}});
    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        double x = -1.0 + 2.0 * i / 20000.0;
        sup = std::max(sup, std::abs(single(x) - st(x)));
    }
    CHECK(sup <= 2e-3);
    CHECK(single.mass(-1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));

    Density1D two = convolve({{1.0, st}, {1.0, st}});
    CHECK(two.support_lo() == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(two.support_hi() == doctest::Approx(2.0).epsilon(2e-4));
    CHECK(two.mass(-2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
    for (double x : {0.1, 0.5, 0.9, 1.5}) CHECK(two(x) == doctest::Approx(two(-x)).epsilon(1e-9));

    CHECK_THROWS_AS(convolve({{0.0, st}}), ZeroScale);
}

TEST_CASE("convolution against a monte carlo histogram") {
    Density1D st = Density1D::sato_tate();
    Density1D conv = convolve({{1.0, st}, {2.0, st}});
    std::mt19937_64 rng(987654321);
    const int NMC = 10'000'000;
    const double width = 0.02;
    const int bins = static_cast<int>(std::round(6.0 / width));
    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    for (int i = 0; i < NMC; ++i) {
        double v = sample_sato_tate(rng) + 2.0 * sample_sato_tate(rng);
        auto b = static_cast<int>((v + 3.0) / width);
        if (b >= 0 && b < bins) hist[static_cast<std::size_t>(b)] += 1.0;
    }
    double supdist = 0.0;
    for (int b = 0; b < bins; ++b) {
        double lo = -3.0 + b * width, hi = lo + width;
        double mc = hist[static_cast<std::size_t>(b)] / NMC / width;
        double cv = conv.mass(lo, hi) / width;
        supdist = std::max(supdist, std::abs(mc - cv));
    }
    CHECK(supdist <= 5e-3);
}

TEST_CASE("convolution commutes with component reordering") {
    Density1D a = convolve({{1.0, Density1D::sato_tate()}, {2.0, Density1D::plancherel(5)}});
    Density1D b = convolve({{2.0, Density1D::plancherel(5)}, {1.0, Density1D::sato_tate()}});
    double sup = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        double x = -3.0 + 6.0 * i / 5000.0;
        sup = std::max(sup, std::abs(a(x) - b(x)));
    }
    CHECK(sup <= 1e-9);
}

TEST_CASE("grid csv serialization") {
    Density1D g = convolve({{1.0, Density1D::sato_tate()}}, 1e-3);
    std::string csv = g.to_csv();
    CHECK(csv.substr(0, 10) == std::string("x,density\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') > 1000);
}

TEST_SUITE_END();
