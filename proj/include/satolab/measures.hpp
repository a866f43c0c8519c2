#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "satolab/common.hpp"

namespace satolab::measures {

enum class DensityKind { SatoTate, Plancherel, AngleG, AngleGp, Scaled, Grid };

// One-dimensional probability density with exact or high-accuracy interval
// masses.  x-side kinds live on [-1,1] (or a scaled copy), angle-side kinds
// on [0,1].
class Density1D {
  public:
    static Density1D sato_tate();
    static Density1D plancherel(std::int64_t p);
    static Density1D angle_st();                   // 2 sin^2(pi theta) on [0,1]
    static Density1D angle_plancherel(std::int64_t p);
    static Density1D scaled(double lambda, Density1D inner);  // inner(x/lambda)/|lambda|
    static Density1D grid(double x0, double step, std::vector<double> values);

    DensityKind kind() const { return kind_; }
    std::int64_t p() const { return p_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }

    double operator()(double x) const;

    // integral of the density over [a,b] (clipped to the support), accurate
    // to ~1e-12 for closed forms and ~1e-9 for quadrature-backed kinds
    double mass(double a, double b) const;

    double sup_density() const;

    std::string to_csv(int samples = 512) const;  // "x,density"

  private:
    DensityKind kind_ = DensityKind::SatoTate;
    std::int64_t p_ = 0;
    double lambda_ = 1.0;
    std::shared_ptr<Density1D> inner_;
    double x0_ = 0.0, step_ = 0.0;
    std::vector<double> values_;
    double lo_ = -1.0, hi_ = 1.0;
};

struct ProductMeasure {
    std::vector<Density1D> factors;

    std::size_t arity() const { return factors.size(); }
    double box_mass(const std::vector<std::pair<double, double>>& box) const;
    double height() const {
        double h = 1.0;
        for (const auto& f : factors) h *= f.sup_density();
        return h;
    }
};

// Fourier coefficients c_m of the angle-side density G (c_0 = 1, |c_m| <= 1).
class FourierCoeffProvider {
  public:
    static FourierCoeffProvider modular_plancherel(std::int64_t p);
    static FourierCoeffProvider elliptic_st();
    static FourierCoeffProvider lebesgue();  // c_0 = 1, all other c_m = 0
    static FourierCoeffProvider product_of(std::vector<FourierCoeffProvider> factors);

    std::size_t arity() const { return factors_.empty() ? 1 : factors_.size(); }
    double coeff1(int m) const;                      // one-dimensional c_m
    double coeff(const std::vector<int>& m) const;   // componentwise product
    double height() const;                           // sup |G|, the mu-height

  private:
    enum class Kind { ModularPlancherel, EllipticST, Lebesgue, Product };
    Kind kind_ = Kind::EllipticST;
    std::int64_t p_ = 0;
    std::vector<FourierCoeffProvider> factors_;
};

// Region F^{-1}([j_lo, j_hi]) inside [-1,1]^arity.
struct RegionSpec {
    int arity = 1;
    std::function<double(const std::vector<double>&)> F;
    double j_lo = 0.0, j_hi = 0.0;
};

struct RegionIntegral {
    double value = 0.0;
    double error_estimate = 0.0;  // |I(resolution) - I(2*resolution)|
};

double integrate_box(const ProductMeasure& pm, const std::vector<std::pair<double, double>>& box);

// Midpoint tensor-grid quadrature of the region indicator against the product
// density; the reported error estimate is the two-resolution difference.
RegionIntegral integrate_region(const ProductMeasure& pm, const RegionSpec& region, int resolution, int workers = 1);

// Convolution h_1 * ... * h_n of scaled densities h_j(x) = inner_j(x/lambda_j)/|lambda_j|,
// returned as a Grid density on [-sum |lambda_j| .., sum ..].  Direct summation
// for small grids, cyclic FFT convolution with zero padding for large ones.
Density1D convolve(const std::vector<std::pair<double, Density1D>>& components, double step = 5e-5);

}  // namespace satolab::measures
