#include "satolab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace satolab::measures {

namespace {

double plancherel_A(std::int64_t p) {
    double sp = std::sqrt(static_cast<double>(p));
    return (sp + 1.0 / sp) * (sp + 1.0 / sp);
}

// adaptive Simpson on a smooth integrand
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) < 15 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

// antiderivative of the Sato-Tate density: d/dx [ (x sqrt(1-x^2) + asin x)/pi ] = (2/pi) sqrt(1-x^2)
double st_cdf_part(double x) {
    x = std::clamp(x, -1.0, 1.0);
    return (x * std::sqrt(std::max(0.0, 1.0 - x * x)) + std::asin(x)) / PI;
}

}  // namespace

Density1D Density1D::sato_tate() {
    Density1D d;
    d.kind_ = DensityKind::SatoTate;
    d.lo_ = -1.0;
    d.hi_ = 1.0;
    return d;
}

Density1D Density1D::plancherel(std::int64_t p) {
    Density1D d;
    d.kind_ = DensityKind::Plancherel;
    d.p_ = p;
    d.lo_ = -1.0;
    d.hi_ = 1.0;
    return d;
}

Density1D Density1D::angle_st() {
    Density1D d;
    d.kind_ = DensityKind::AngleG;
    d.lo_ = 0.0;
    d.hi_ = 1.0;
    return d;
}

Density1D Density1D::angle_plancherel(std::int64_t p) {
    Density1D d;
    d.kind_ = DensityKind::AngleGp;
    d.p_ = p;
    d.lo_ = 0.0;
    d.hi_ = 1.0;
    return d;
}

Density1D Density1D::scaled(double lambda, Density1D inner) {
    if (lambda == 0.0) throw ZeroScale("scale factor must be nonzero");
    Density1D d;
    d.kind_ = DensityKind::Scaled;
    d.lambda_ = lambda;
    d.inner_ = std::make_shared<Density1D>(std::move(inner));
    double a = d.inner_->lo_ * lambda, b = d.inner_->hi_ * lambda;
    d.lo_ = std::min(a, b);
    d.hi_ = std::max(a, b);
    return d;
}

Density1D Density1D::grid(double x0, double step, std::vector<double> values) {
    Density1D d;
    d.kind_ = DensityKind::Grid;
    d.x0_ = x0;
    d.step_ = step;
    d.values_ = std::move(values);
    d.lo_ = x0;
    d.hi_ = x0 + step * static_cast<double>(d.values_.size() - 1);
    return d;
}

double Density1D::operator()(double x) const {
    switch (kind_) {
        case DensityKind::SatoTate: {
            if (x < -1.0 || x > 1.0) return 0.0;
            return 2.0 / PI * std::sqrt(std::max(0.0, 1.0 - x * x));
        }
        case DensityKind::Plancherel: {
            if (x < -1.0 || x > 1.0) return 0.0;
            double A = plancherel_A(p_);
            return 2.0 * static_cast<double>(p_ + 1) / PI * std::sqrt(std::max(0.0, 1.0 - x * x)) / (A - 4.0 * x * x);
        }
        case DensityKind::AngleG: {
            if (x < 0.0 || x > 1.0) return 0.0;
            double s = std::sin(PI * x);
            return 2.0 * s * s;
        }
        case DensityKind::AngleGp: {
            if (x < 0.0 || x > 1.0) return 0.0;
            double A = plancherel_A(p_);
            double s = std::sin(2.0 * PI * x), c = std::cos(2.0 * PI * x);
            return 2.0 * static_cast<double>(p_ + 1) * s * s / (A - 4.0 * c * c);
        }
        case DensityKind::Scaled:
            return (*inner_)(x / lambda_) / std::abs(lambda_);
        case DensityKind::Grid: {
            if (x < lo_ || x > hi_) return 0.0;
            double u = (x - x0_) / step_;
            auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(values_.size() - 2)));
            double frac = u - static_cast<double>(i);
            return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
        }
    }
    return 0.0;
}

double Density1D::mass(double a, double b) const {
    a = std::max(a, lo_);
    b = std::min(b, hi_);
    if (b <= a) return 0.0;
    switch (kind_) {
        case DensityKind::SatoTate:
            return st_cdf_part(b) - st_cdf_part(a);
        case DensityKind::AngleG: {
            auto cdf = [](double t) { return t - std::sin(2.0 * PI * t) / (2.0 * PI); };
            return cdf(b) - cdf(a);
        }
        case DensityKind::Plancherel: {
            // integrate on the theta side, x = cos(2 pi theta); the integrand
            // is twice the angle-side density, which is analytic
            double ta = std::acos(std::clamp(b, -1.0, 1.0)) / (2.0 * PI);
            double tb = std::acos(std::clamp(a, -1.0, 1.0)) / (2.0 * PI);
            Density1D ang = angle_plancherel(p_);
            return 2.0 * integrate_smooth([&](double t) { return ang(t); }, ta, tb, 1e-12);
        }
        case DensityKind::AngleGp:
            return integrate_smooth([&](double t) { return (*this)(t); }, a, b, 1e-12);
        case DensityKind::Scaled: {
            double u = a / lambda_, v = b / lambda_;
            return inner_->mass(std::min(u, v), std::max(u, v));
        }
        case DensityKind::Grid: {
            // trapezoidal mass with linear interpolation at the cut points
            double ua = (a - x0_) / step_, ub = (b - x0_) / step_;
            auto ia = static_cast<std::size_t>(std::clamp(std::floor(ua), 0.0, static_cast<double>(values_.size() - 2)));
            auto ib = static_cast<std::size_t>(std::clamp(std::floor(ub), 0.0, static_cast<double>(values_.size() - 2)));
            auto lerp = [&](double u) {
                auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(values_.size() - 2)));
                double f = u - static_cast<double>(i);
                return values_[i] * (1.0 - f) + values_[i + 1] * f;
            };
            if (ia == ib) return 0.5 * (lerp(ua) + lerp(ub)) * (b - a);
            double total = 0.5 * (lerp(ua) + values_[ia + 1]) * (static_cast<double>(ia + 1) - ua) * step_;
            KahanSum ks;
            for (std::size_t i = ia + 1; i < ib; ++i) ks.add(0.5 * (values_[i] + values_[i + 1]) * step_);
            total += ks.value();
            total += 0.5 * (values_[ib] + lerp(ub)) * (ub - static_cast<double>(ib)) * step_;
            return total;
        }
    }
    return 0.0;
}

double Density1D::sup_density() const {
    switch (kind_) {
        case DensityKind::SatoTate:
            return 2.0 / PI;
        case DensityKind::Plancherel: {
            double best = 0.0;
            for (int i = 0; i <= 4096; ++i) best = std::max(best, (*this)(-1.0 + 2.0 * i / 4096.0));
            return best;
        }
        case DensityKind::AngleG:
            return 2.0;
        case DensityKind::AngleGp: {
            // maximized where cos(2 pi theta) = 0
            double sp = std::sqrt(static_cast<double>(p_));
            return 2.0 * static_cast<double>(p_ + 1) / ((sp + 1.0 / sp) * (sp + 1.0 / sp));
        }
        case DensityKind::Scaled:
            return inner_->sup_density() / std::abs(lambda_);
        case DensityKind::Grid: {
            double m = 0.0;
            for (double v : values_) m = std::max(m, v);
            return m;
        }
    }
    return 0.0;
}

std::string Density1D::to_csv(int samples) const {
    std::ostringstream os;
    os.precision(17);
    os << "x,density\n";
    if (kind_ == DensityKind::Grid) {
        for (std::size_t i = 0; i < values_.size(); ++i)
            os << x0_ + step_ * static_cast<double>(i) << "," << values_[i] << "\n";
    } else {
        for (int i = 0; i <= samples; ++i) {
            double x = lo_ + (hi_ - lo_) * i / samples;
            os << x << "," << (*this)(x) << "\n";
        }
    }
    return os.str();
}

double ProductMeasure::box_mass(const std::vector<std::pair<double, double>>& box) const {
    if (box.size() != factors.size()) throw ArityMismatch("box arity mismatch");
    double m = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j) m *= factors[j].mass(box[j].first, box[j].second);
    return m;
}

double integrate_box(const ProductMeasure& pm, const std::vector<std::pair<double, double>>& box) {
    return pm.box_mass(box);
}

FourierCoeffProvider FourierCoeffProvider::modular_plancherel(std::int64_t p) {
    FourierCoeffProvider f;
    f.kind_ = Kind::ModularPlancherel;
    f.p_ = p;
    return f;
}

FourierCoeffProvider FourierCoeffProvider::elliptic_st() {
    FourierCoeffProvider f;
    f.kind_ = Kind::EllipticST;
    return f;
}

FourierCoeffProvider FourierCoeffProvider::lebesgue() {
    FourierCoeffProvider f;
    f.kind_ = Kind::Lebesgue;
    return f;
}

FourierCoeffProvider FourierCoeffProvider::product_of(std::vector<FourierCoeffProvider> factors) {
    FourierCoeffProvider f;
    f.kind_ = Kind::Product;
    f.factors_ = std::move(factors);
    return f;
}

double FourierCoeffProvider::coeff1(int m) const {
    switch (kind_) {
        case Kind::ModularPlancherel: {
            int a = std::abs(m);
            if (a == 0) return 1.0;
            if (a % 2) return 0.0;
            double pd = static_cast<double>(p_);
            return 0.5 * std::pow(pd, -0.5 * a) - 0.5 * std::pow(pd, -0.5 * (a - 2));
        }
        case Kind::EllipticST:
            return m == 0 ? 1.0 : (std::abs(m) == 1 ? -0.5 : 0.0);
        case Kind::Lebesgue:
            return m == 0 ? 1.0 : 0.0;
        case Kind::Product:
            throw ArityMismatch("product provider is multi-dimensional");
    }
    return 0.0;
}

double FourierCoeffProvider::coeff(const std::vector<int>& m) const {
    if (kind_ != Kind::Product) {
        if (m.size() != 1) throw ArityMismatch("scalar provider got a vector index");
        return coeff1(m[0]);
    }
    if (m.size() != factors_.size()) throw ArityMismatch("coefficient index arity mismatch");
    double c = 1.0;
    for (std::size_t j = 0; j < m.size(); ++j) c *= factors_[j].coeff1(m[j]);
    return c;
}

double FourierCoeffProvider::height() const {
    switch (kind_) {
        case Kind::ModularPlancherel: {
            double pd = static_cast<double>(p_);
            return 2.0 * pd / (pd + 1.0);
        }
        case Kind::EllipticST:
            return 2.0;
        case Kind::Lebesgue:
            return 1.0;
        case Kind::Product: {
            double h = 1.0;
            for (const auto& f : factors_) h *= f.height();
            return h;
        }
    }
    return 1.0;
}

RegionIntegral integrate_region(const ProductMeasure& pm, const RegionSpec& region, int resolution, int workers) {
    if (region.arity != static_cast<int>(pm.arity())) throw ArityMismatch("region arity != measure arity");
    const int n = region.arity;
    if (n < 1 || n > 3) throw DimensionTooLarge("region integration supports n in {1,2,3}");

    auto evaluate = [&](int Q) {
        std::vector<std::vector<double>> mids(static_cast<std::size_t>(n)), dens(static_cast<std::size_t>(n));
        double cell = 1.0;
        for (int j = 0; j < n; ++j) {
            const auto& f = pm.factors[static_cast<std::size_t>(j)];
            double lo = f.support_lo(), hi = f.support_hi();
            double h = (hi - lo) / Q;
            cell *= h;
            for (int i = 0; i < Q; ++i) {
                double x = lo + (i + 0.5) * h;
                mids[static_cast<std::size_t>(j)].push_back(x);
                dens[static_cast<std::size_t>(j)].push_back(f(x));
            }
        }

        // fixed block decomposition over the first axis keeps the sum
        // bit-identical for any worker count
        const std::int64_t block = 16;
        const std::int64_t n_blocks = (Q + block - 1) / block;
        std::vector<double> partial(static_cast<std::size_t>(n_blocks), 0.0);
        parallel_blocks(Q, block, workers, [&](std::int64_t bi, std::int64_t lo_i, std::int64_t hi_i) {
            KahanSum local;
            std::vector<double> x(static_cast<std::size_t>(n));
            for (std::int64_t i0 = lo_i; i0 < hi_i; ++i0) {
                x[0] = mids[0][static_cast<std::size_t>(i0)];
                double w0 = dens[0][static_cast<std::size_t>(i0)];
                if (n == 1) {
                    double v = region.F(x);
                    if (v >= region.j_lo && v <= region.j_hi) local.add(w0);
                } else {
                    for (std::size_t i1 = 0; i1 < mids[1].size(); ++i1) {
                        x[1] = mids[1][i1];
                        double w1 = w0 * dens[1][i1];
                        if (n == 2) {
                            double v = region.F(x);
                            if (v >= region.j_lo && v <= region.j_hi) local.add(w1);
                        } else {
                            for (std::size_t i2 = 0; i2 < mids[2].size(); ++i2) {
                                x[2] = mids[2][i2];
                                double v = region.F(x);
                                if (v >= region.j_lo && v <= region.j_hi) local.add(w1 * dens[2][i2]);
                            }
                        }
                    }
                }
            }
            partial[static_cast<std::size_t>(bi)] = local.value();
        });
        KahanSum total;
        for (double v : partial) total.add(v);
        return total.value() * cell;
    };

    double coarse = evaluate(resolution);
    double fine = evaluate(2 * resolution);
    return {fine, std::abs(fine - coarse)};
}

Density1D convolve(const std::vector<std::pair<double, Density1D>>& components, double step) {
    if (components.empty()) throw Error("convolve needs at least one component");
    for (const auto& [lam, d] : components)
        if (lam == 0.0) throw ZeroScale("zero scale in convolution");

    struct Sampled {
        double lo;
        std::vector<double> v;
    };
    auto sample = [&](const Density1D& d) {
        Sampled s;
        s.lo = d.support_lo();
        auto count = static_cast<std::size_t>(std::ceil((d.support_hi() - d.support_lo()) / step)) + 1;
        s.v.resize(count);
        for (std::size_t i = 0; i < count; ++i) s.v[i] = d(s.lo + step * static_cast<double>(i));
        return s;
    };

    Sampled acc = sample(Density1D::scaled(components[0].first, components[0].second));
    for (std::size_t c = 1; c < components.size(); ++c) {
        Sampled nxt = sample(Density1D::scaled(components[c].first, components[c].second));
        std::size_t out_n = acc.v.size() + nxt.v.size() - 1;
        std::vector<double> out(out_n, 0.0);
        if (std::max(acc.v.size(), nxt.v.size()) <= 8192) {
            for (std::size_t i = 0; i < acc.v.size(); ++i) {
                if (acc.v[i] == 0.0) continue;
                for (std::size_t j = 0; j < nxt.v.size(); ++j) out[i + j] += acc.v[i] * nxt.v[j];
            }
        } else {
            std::size_t m = 1;
            while (m < out_n) m <<= 1;
            std::vector<cplx> fa(m), fb(m);
            for (std::size_t i = 0; i < acc.v.size(); ++i) fa[i] = acc.v[i];
            for (std::size_t i = 0; i < nxt.v.size(); ++i) fb[i] = nxt.v[i];
            fft_inplace(fa, false);
            fft_inplace(fb, false);
            for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
            fft_inplace(fa, true);
            for (std::size_t i = 0; i < out_n; ++i) out[i] = std::max(0.0, fa[i].real());
        }
        for (auto& x : out) x *= step;
        acc.lo += nxt.lo;
        acc.v = std::move(out);
    }
    return Density1D::grid(acc.lo, step, std::move(acc.v));
}

}  // namespace satolab::measures
