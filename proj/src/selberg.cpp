#include "satolab/selberg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace satolab::selberg {

namespace {

// trigamma, ~1e-15 relative
double psi1(double w) {
    double acc = 0.0;
    while (w < 10.0) {
        acc += 1.0 / (w * w);
        w += 1.0;
    }
    double iw = 1.0 / w, iw2 = iw * iw;
    // 1/w + 1/(2w^2) + sum B_{2j} / w^{2j+1}
    double s = iw + 0.5 * iw2;
    double t = iw * iw2;  // w^{-3}
    s += t / 6.0;
    t *= iw2;
    s -= t / 30.0;
    t *= iw2;
    s += t / 42.0;
    t *= iw2;
    s -= t / 30.0;
    t *= iw2;
    s += t * (5.0 / 66.0);
    t *= iw2;
    s -= t * (691.0 / 2730.0);
    t *= iw2;
    s += t * (7.0 / 6.0);
    return s + acc;
}

// Z_s(y) = sum_{j >= 0} (y+j)^{-s} by Euler-Maclaurin, y >= 8
double hurwitz_tail(int s, double y) {
    double iy = 1.0 / y;
    double ys = std::pow(iy, s);
    double v = y * ys / (s - 1) + 0.5 * ys + (s / 12.0) * ys * iy;
    double s3 = static_cast<double>(s) * (s + 1) * (s + 2);
    v -= s3 / 720.0 * ys * iy * iy * iy;
    v += s3 * (s + 3) * (s + 4) / 30240.0 * ys * iy * iy * iy * iy * iy;
    return v;
}

// T(w) = 2 psi1(w) - 1/w^2 - 2/w, the correction H(w) = 1 - sin^2(pi w)/pi^2 * T(w)
double corr_T(double w) { return 2.0 * psi1(w) - 1.0 / (w * w) - 2.0 / w; }

// sum_{r >= R+1} T(delta (c + r)) via the w^{-3}, w^{-5}, w^{-7} expansion
double tail_TS(double c, double delta, int R) {
    double y = c + R + 1;
    double d3 = 1.0 / (delta * delta * delta);
    double d5 = d3 / (delta * delta);
    double d7 = d5 / (delta * delta);
    return d3 / 3.0 * hurwitz_tail(3, y) - d5 / 15.0 * hurwitz_tail(5, y) + d7 / 21.0 * hurwitz_tail(7, y);
}

double sin_sq_pi(double x) {
    double s = std::sin(PI * x);
    return s * s;
}

}  // namespace

double fejer_K(double x) {
    if (std::abs(x) < 1e-8) {
        double z = PI * x;
        return 1.0 - z * z / 3.0;
    }
    double s = std::sin(PI * x) / (PI * x);
    return s * s;
}

double vaaler_H(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -vaaler_H(-x);
    return 1.0 - sin_sq_pi(x) / (PI * PI) * corr_T(x);
}

AxisPolys periodized_axis_polys(const IntervalMod1& I, int M, const SelbergKernelParams& params) {
    if (M < 1) throw Error("degree must be >= 1");
    const int N = params.fft_size;
    const int R = params.truncation_radius;
    const double delta = M + 1;
    const double a = I.a, b = I.b;

    AxisPolys out;
    out.degree = M;
    // residual of the polygamma tail: next expansion order per interval end
    out.tail_bound = 0.04 * std::pow(delta, -9.0) * std::pow(static_cast<double>(R), -8.0) + 2e-13;
    if (out.tail_bound > 1e-10)
        throw TruncationBudgetExceeded("periodization tail bound " + std::to_string(out.tail_bound));

    // sample the periodized V on a uniform grid, then FFT
    std::vector<cplx> samples(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        double x = static_cast<double>(k) / N;
        KahanSum s;
        for (int r = -R; r <= R; ++r) {
            double u = x + r;
            s.add(0.5 * (vaaler_H(delta * (u - a)) + vaaler_H(delta * (b - u))));
        }
        double tail = -(0.5 / (PI * PI)) *
                      (sin_sq_pi(delta * (x - a)) * (tail_TS(x - a, delta, R) - tail_TS(a - x, delta, R)) +
                       sin_sq_pi(delta * (x - b)) * (tail_TS(b - x, delta, R) - tail_TS(x - b, delta, R)));
        samples[static_cast<std::size_t>(k)] = s.value() + tail;
    }
    fft_inplace(samples, false);

    out.perV.assign(static_cast<std::size_t>(2 * M + 1), cplx(0.0, 0.0));
    for (int m = -M; m <= M; ++m) {
        int idx = m >= 0 ? m : N + m;
        out.perV[static_cast<std::size_t>(m + M)] = samples[static_cast<std::size_t>(idx)] / static_cast<double>(N);
    }
    // enforce Hermitian symmetry exactly
    for (int m = 1; m <= M; ++m) {
        cplx cp = out.perV[static_cast<std::size_t>(M + m)];
        cplx cm = out.perV[static_cast<std::size_t>(M - m)];
        cplx avg = 0.5 * (cp + std::conj(cm));
        out.perV[static_cast<std::size_t>(M + m)] = avg;
        out.perV[static_cast<std::size_t>(M - m)] = std::conj(avg);
    }
    out.perV[static_cast<std::size_t>(M)] = cplx(out.perV[static_cast<std::size_t>(M)].real(), 0.0);

    // periodized Fejer pair from the closed-form coefficients:
    // w(m) = (1 - |m|/delta) (e(-ma) + e(-mb)) / (2 delta)
    out.perW.assign(static_cast<std::size_t>(2 * M + 1), cplx(0.0, 0.0));
    for (int m = -M; m <= M; ++m) {
        double fe = (1.0 - std::abs(m) / delta) / (2.0 * delta);
        cplx ph = std::polar(1.0, -2.0 * PI * m * a) + std::polar(1.0, -2.0 * PI * m * b);
        out.perW[static_cast<std::size_t>(m + M)] = fe * ph;
    }
    return out;
}

double AxisPolys::eval_v(double x) const {
    KahanSum re;
    for (int m = -degree; m <= degree; ++m) {
        cplx c = v(m);
        re.add(c.real() * std::cos(2.0 * PI * m * x) - c.imag() * std::sin(2.0 * PI * m * x));
    }
    return re.value();
}

double AxisPolys::eval_w(double x) const {
    KahanSum re;
    for (int m = -degree; m <= degree; ++m) {
        cplx c = w(m);
        re.add(c.real() * std::cos(2.0 * PI * m * x) - c.imag() * std::sin(2.0 * PI * m * x));
    }
    return re.value();
}

TrigPolynomial cochrane_nd(const std::vector<IntervalMod1>& intervals, const std::vector<int>& M, MajorantSign sign,
                           const SelbergKernelParams& params) {
    if (intervals.size() != M.size() || intervals.empty()) throw DimensionMismatch("intervals / degrees mismatch");
    const int n = static_cast<int>(intervals.size());
    std::vector<AxisPolys> axes;
    axes.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) axes.push_back(periodized_axis_polys(intervals[static_cast<std::size_t>(j)], M[static_cast<std::size_t>(j)], params));

    TrigPolynomial P;
    P.dims = n;
    P.degrees = M;
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= static_cast<std::size_t>(2 * M[static_cast<std::size_t>(j)] + 1);
    P.table.resize(total);

    std::vector<int> m(static_cast<std::size_t>(n), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int j = n - 1; j >= 0; --j) {
            int width = 2 * M[static_cast<std::size_t>(j)] + 1;
            m[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(width)) - M[static_cast<std::size_t>(j)];
            rem /= static_cast<std::size_t>(width);
        }
        if (sign == MajorantSign::Plus) {
            cplx prod(1.0, 0.0);
            for (int j = 0; j < n; ++j) prod *= axes[static_cast<std::size_t>(j)].v(m[static_cast<std::size_t>(j)]) + axes[static_cast<std::size_t>(j)].w(m[static_cast<std::size_t>(j)]);
            P.table[flat] = prod;
        } else {
            cplx pv(1.0, 0.0), pv2w(1.0, 0.0), pvw(1.0, 0.0);
            for (int j = 0; j < n; ++j) {
                cplx vv = axes[static_cast<std::size_t>(j)].v(m[static_cast<std::size_t>(j)]);
                cplx ww = axes[static_cast<std::size_t>(j)].w(m[static_cast<std::size_t>(j)]);
                pv *= vv;
                pv2w *= vv + 2.0 * ww;
                pvw *= vv + ww;
            }
            P.table[flat] = pv - pv2w + pvw;
        }
    }
    return P;
}

double delta_M(const std::vector<IntervalMod1>& intervals, const std::vector<int>& M) {
    if (intervals.size() != M.size()) throw DimensionMismatch("intervals / degrees mismatch");
    double p2 = 1.0, p1 = 1.0;
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        double lam = intervals[j].length();
        double inv = 1.0 / (M[j] + 1.0);
        p2 *= lam + 2.0 * inv;
        p1 *= lam + inv;
    }
    return p2 - p1;
}

double p_m(const IntervalMod1& I, int m) {
    // |chi_I^(m)| = |sin(pi m lambda)| / (pi |m|) <= min(1/(pi|m|), lambda, 1-lambda)
    // for m != 0; the zeroth coefficient is lambda itself.
    double lam = I.length();
    if (m == 0) return lam;
    return std::min(1.0 / (PI * std::abs(m)), std::min(lam, 1.0 - lam));
}

double script_P(const std::vector<int>& m) {
    double p = 1.0;
    for (int mi : m)
        if (mi != 0) p /= std::abs(mi);
    return p;
}

cplx TrigPolynomial::coeff(const std::vector<int>& m) const {
    if (static_cast<int>(m.size()) != dims) throw DimensionMismatch("coefficient index arity");
    std::size_t flat = 0;
    for (int j = 0; j < dims; ++j) {
        if (std::abs(m[static_cast<std::size_t>(j)]) > degrees[static_cast<std::size_t>(j)]) return {0.0, 0.0};
        flat = flat * static_cast<std::size_t>(2 * degrees[static_cast<std::size_t>(j)] + 1) +
               static_cast<std::size_t>(m[static_cast<std::size_t>(j)] + degrees[static_cast<std::size_t>(j)]);
    }
    return table[flat];
}

double TrigPolynomial::eval(const std::vector<double>& x) const { return eval_trig_poly(*this, x); }

double eval_trig_poly(const TrigPolynomial& P, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != P.dims) throw DimensionMismatch("evaluation point arity");
    KahanSum re;
    std::vector<int> m(static_cast<std::size_t>(P.dims));
    for (std::size_t flat = 0; flat < P.table.size(); ++flat) {
        std::size_t rem = flat;
        double phase = 0.0;
        for (int j = P.dims - 1; j >= 0; --j) {
            int width = 2 * P.degrees[static_cast<std::size_t>(j)] + 1;
            int mj = static_cast<int>(rem % static_cast<std::size_t>(width)) - P.degrees[static_cast<std::size_t>(j)];
            rem /= static_cast<std::size_t>(width);
            phase += mj * x[static_cast<std::size_t>(j)];
        }
        cplx c = P.table[flat];
        re.add(c.real() * std::cos(2.0 * PI * phase) - c.imag() * std::sin(2.0 * PI * phase));
    }
    return re.value();
}

std::string TrigPolynomial::to_csv() const {
    std::ostringstream os;
    for (int j = 1; j <= dims; ++j) os << "m" << j << ",";
    os << "re,im\n";
    os.precision(17);
    std::vector<int> m(static_cast<std::size_t>(dims));
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        std::size_t rem = flat;
        for (int j = dims - 1; j >= 0; --j) {
            int width = 2 * degrees[static_cast<std::size_t>(j)] + 1;
            m[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(width)) - degrees[static_cast<std::size_t>(j)];
            rem /= static_cast<std::size_t>(width);
        }
        for (int j = 0; j < dims; ++j) os << m[static_cast<std::size_t>(j)] << ",";
        os << table[flat].real() << "," << table[flat].imag() << "\n";
    }
    return os.str();
}

}  // namespace satolab::selberg
