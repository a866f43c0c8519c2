#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "satolab/common.hpp"

namespace satolab::selberg {

struct IntervalMod1 {
    double a = 0.0, b = 0.0;

    IntervalMod1(double a_, double b_) : a(a_), b(b_) {
        if (!(0.0 <= a && a <= b && b <= 1.0)) throw Error("interval must satisfy 0 <= a <= b <= 1");
    }
    double length() const { return b - a; }
};

struct SelbergKernelParams {
    int truncation_radius = 8;  // r-sum summed directly for |r| <= R, tail by polygamma asymptotics
    int fft_size = 4096;

    SelbergKernelParams() = default;
    SelbergKernelParams(int R, int fft) : truncation_radius(R), fft_size(fft) {
        if (R < 8) throw Error("truncation radius must be >= 8");
        if (fft < 4096 || (fft & (fft - 1)) != 0) throw Error("fft size must be a power of two >= 4096");
    }
};

// Finitely supported Fourier coefficient table, |m_j| <= M_j per axis.
struct TrigPolynomial {
    int dims = 0;
    std::vector<int> degrees;
    std::vector<cplx> table;  // index offsets m_j + M_j, row-major

    cplx coeff(const std::vector<int>& m) const;
    double eval(const std::vector<double>& x) const;
    std::string to_csv() const;  // "m1,...,mn,re,im"
};

// One axis of the construction: Fourier coefficients (index m + M) of the
// 1-periodizations of V((M+1)(x-a)),(M+1)(b-x)) and the Fejer pair W.
struct AxisPolys {
    int degree = 0;
    std::vector<cplx> perV;
    std::vector<cplx> perW;
    double tail_bound = 0.0;

    cplx v(int m) const { return perV[static_cast<std::size_t>(m + degree)]; }
    cplx w(int m) const { return perW[static_cast<std::size_t>(m + degree)]; }
    double eval_v(double x) const;
    double eval_w(double x) const;
};

AxisPolys periodized_axis_polys(const IntervalMod1& I, int M, const SelbergKernelParams& params = {});

enum class MajorantSign { Plus, Minus };

// Cochrane's n-dimensional majorant (+) / minorant (-) of the box indicator.
TrigPolynomial cochrane_nd(const std::vector<IntervalMod1>& intervals, const std::vector<int>& M, MajorantSign sign,
                           const SelbergKernelParams& params = {});

// Delta_M = prod(lambda_j + 2/(M_j+1)) - prod(lambda_j + 1/(M_j+1))
double delta_M(const std::vector<IntervalMod1>& intervals, const std::vector<int>& M);

// P_m(I) = min(1/(pi|m|), lambda, 1-lambda); for m = 0 the last two only.
double p_m(const IntervalMod1& I, int m);

// product of 1/|m_i| over the nonzero components (empty product = 1)
double script_P(const std::vector<int>& m);

double eval_trig_poly(const TrigPolynomial& P, const std::vector<double>& x);

// Vaaler's sign-approximating entire function, evaluated through the trigamma
// closed form; |H(x) - sgn(x)| <= K(x) on the reals.
double vaaler_H(double x);

// Fejer kernel (sin(pi x)/(pi x))^2.
double fejer_K(double x);

}  // namespace satolab::selberg
