#include "satolab/hecke.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <numeric>
#include <cstring>
#include <mutex>
#include <sstream>

namespace satolab::hecke {

namespace {

// Largest discriminant the shared class-number table may grow to.  Traces of
// T_n need H(4n - t^2), so this caps n at HURWITZ_CAP/4.
constexpr std::int64_t HURWITZ_CAP = 1ll << 25;

}  // namespace

mpq_class HurwitzTable::H(std::int64_t n) const {
    mpq_class q(h12[static_cast<std::size_t>(n)], 12);
    q.canonicalize();
    return q;
}

HurwitzTable hurwitz_table(std::int64_t limit) {
    if (limit < 4) throw Error("hurwitz_table limit must be >= 4");
    if (limit > HURWITZ_CAP) throw Error("hurwitz_table limit exceeds cap");
    HurwitzTable T;
    T.limit = limit;
    T.h12.assign(static_cast<std::size_t>(limit) + 1, 0);
    T.h12[0] = -1;
    // One pass over reduced forms (a,b,c), 0 <= b <= a <= c, N = 4ac - b^2.
    for (std::int64_t a = 1; 3 * a * a <= limit; ++a) {
        for (std::int64_t b = 0; b <= a; ++b) {
            std::int64_t N = 4 * a * a - b * b;
            for (std::int64_t c = a; N <= limit; ++c, N += 4 * a) {
                std::int32_t w;
                if (b == 0)
                    w = (a == c) ? 6 : 12;
                else if (b == a)
                    w = (a == c) ? 4 : 12;
                else
                    w = (a < c) ? 24 : 12;
                T.h12[static_cast<std::size_t>(N)] += w;
            }
        }
    }
    return T;
}

std::int64_t hurwitz12_single(std::int64_t n) {
    if (n < 0) throw Error("negative discriminant index");
    if (n == 0) return -1;
    std::int64_t r = n % 4;
    if (r == 1 || r == 2) return 0;
    std::int64_t total = 0;
    for (std::int64_t b = (r == 3) ? 1 : 0; 3 * b * b <= n; b += 2) {
        std::int64_t q = (n + b * b) / 4;
        for (std::int64_t a = std::max<std::int64_t>(b, 1); a * a <= q; ++a) {
            if (q % a) continue;
            std::int64_t c = q / a;
            std::int64_t w;
            if (b == 0)
                w = (a == c) ? 6 : 12;
            else if (b == a)
                w = (a == c) ? 4 : 12;
            else
                w = (a < c) ? 24 : 12;
            total += w;
        }
    }
    return total;
}

std::shared_ptr<const HurwitzTable> shared_hurwitz(std::int64_t limit) {
    static std::shared_ptr<const HurwitzTable> table;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (!table || table->limit < limit) {
        std::int64_t grow = std::max<std::int64_t>(limit, table ? 2 * table->limit : 4096);
        table = std::make_shared<const HurwitzTable>(hurwitz_table(std::min<std::int64_t>(grow, HURWITZ_CAP)));
    }
    return table;
}

void HurwitzTable::save(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("cannot open " + path + " for writing");
    const char magic[8] = {'S', 'L', 'H', 'U', 'R', 'W', '0', '1'};
    std::fwrite(magic, 1, 8, f);
    std::fwrite(&limit, sizeof(limit), 1, f);
    std::vector<std::int32_t> num(h12.size()), den(h12.size());
    for (std::size_t i = 0; i < h12.size(); ++i) {
        std::int32_t g = static_cast<std::int32_t>(std::gcd<std::int64_t>(std::abs(h12[i]), 12));
        if (g == 0) g = 12;
        num[i] = h12[i] / g;
        den[i] = 12 / g;
    }
    std::fwrite(num.data(), sizeof(std::int32_t), num.size(), f);
    std::fwrite(den.data(), sizeof(std::int32_t), den.size(), f);
    std::fclose(f);
}

HurwitzTable HurwitzTable::load(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw Error("cannot open " + path);
    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, "SLHURW01", 8) != 0) {
        std::fclose(f);
        throw Error("bad Hurwitz cache header in " + path);
    }
    HurwitzTable T;
    if (std::fread(&T.limit, sizeof(T.limit), 1, f) != 1) {
        std::fclose(f);
        throw Error("truncated Hurwitz cache");
    }
    std::size_t n = static_cast<std::size_t>(T.limit) + 1;
    std::vector<std::int32_t> num(n), den(n);
    if (std::fread(num.data(), sizeof(std::int32_t), n, f) != n ||
        std::fread(den.data(), sizeof(std::int32_t), n, f) != n) {
        std::fclose(f);
        throw Error("truncated Hurwitz cache");
    }
    std::fclose(f);
    T.h12.resize(n);
    for (std::size_t i = 0; i < n; ++i) T.h12[i] = num[i] * (12 / den[i]);
    return T;
}

int dim_cuspforms_level1(std::int64_t k) {
    if (k % 2 != 0 || k < 0) throw OddWeight("weight must be even and nonnegative");
    if (k < 12) return 0;
    return static_cast<int>(k % 12 == 2 ? k / 12 - 1 : k / 12);
}

mpz_class gegenbauer_pk(std::int64_t k, const mpz_class& t, const mpz_class& n) {
    // coefficient of x^{k-2} in 1/(1 - t x + n x^2)
    mpz_class gm1(1), g(t);
    if (k == 2) return gm1;
    for (std::int64_t m = 2; m <= k - 2; ++m) {
        mpz_class next = t * g - n * gm1;
        gm1 = g;
        g = next;
    }
    return g;
}

mpz_class trace_hecke_level1(std::int64_t k, std::int64_t n) {
    if (k % 2 != 0) throw OddWeight("weight must be even");
    if (k < 12) throw WeightTooSmall("trace formula exposed for k >= 12");
    if (n < 1) throw Error("n must be positive");
    if (4 * n > HURWITZ_CAP) throw Error("trace_hecke_level1: n too large for the class-number table");

    auto HT = shared_hurwitz(4 * n);
    mpz_class nz(static_cast<long>(n));

    // elliptic + parabolic part
    mpz_class A(0);
    std::int64_t tmax = isqrt_i64(4 * n);
    for (std::int64_t t = -tmax; t <= tmax; ++t) {
        std::int64_t disc = 4 * n - t * t;
        std::int32_t h12 = HT->H12(disc);
        if (h12 == 0) continue;
        A += gegenbauer_pk(k, mpz_class(static_cast<long>(t)), nz) * h12;
    }
    // hyperbolic part: sum over dd' = n of min(d,d')^{k-1}
    mpz_class B(0);
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        std::int64_t dp = n / d;
        mpz_class m(static_cast<long>(d));
        mpz_class term;
        mpz_pow_ui(term.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(k - 1));
        B += (d == dp) ? term : 2 * term;
    }
    mpz_class num = A + 12 * B;
    mpz_class tr, rem;
    mpz_fdiv_qr_ui(tr.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), 24);
    if (rem != 0) throw Error("trace formula: non-integral result (internal bug)");
    return -tr;
}

// ---------------------------------------------------------------------------
// q-expansion matrices (exact), used when the class-number route is out of
// range and for pairing eigenvalues across primes.
// ---------------------------------------------------------------------------

namespace {

// power series with mpz coefficients, truncated to a fixed order
struct SeriesZ {
    std::vector<mpz_class> c;  // c[i] multiplies q^i

    explicit SeriesZ(std::size_t order) : c(order, mpz_class(0)) {}
    std::size_t order() const { return c.size(); }

    SeriesZ mul(const SeriesZ& o) const {
        SeriesZ r(order());
        for (std::size_t i = 0; i < order(); ++i) {
            if (c[i] == 0) continue;
            for (std::size_t j = 0; i + j < order(); ++j) {
                if (o.c[j] == 0) continue;
                r.c[i + j] += c[i] * o.c[j];
            }
        }
        return r;
    }
};

mpz_class sigma_pow(std::int64_t n, unsigned e) {
    mpz_class s(0);
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        mpz_class a, b;
        mpz_ui_pow_ui(a.get_mpz_t(), static_cast<unsigned long>(d), e);
        s += a;
        if (d != n / d) {
            mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(n / d), e);
            s += b;
        }
    }
    return s;
}

SeriesZ eisenstein(std::size_t order, unsigned weight) {
    SeriesZ E(order);
    E.c[0] = 1;
    std::int64_t mult = weight == 4 ? 240 : -504;
    unsigned e = weight == 4 ? 3 : 5;
    for (std::size_t n = 1; n < order; ++n) E.c[n] = mult * sigma_pow(static_cast<std::int64_t>(n), e);
    return E;
}

SeriesZ delta_series(std::size_t order) {
    SeriesZ e4 = eisenstein(order, 4);
    SeriesZ e6 = eisenstein(order, 6);
    SeriesZ num = e4.mul(e4).mul(e4);
    SeriesZ e62 = e6.mul(e6);
    SeriesZ d(order);
    for (std::size_t i = 0; i < order; ++i) {
        mpz_class diff = num.c[i] - e62.c[i];
        mpz_class q, r;
        mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), diff.get_mpz_t(), 1728);
        if (r != 0) throw Error("delta series: 1728 does not divide (internal bug)");
        d.c[i] = q;
    }
    return d;
}

// Triangular basis g_i = Delta^i E4^a E6^b of S_k, g_i = q^i + O(q^{i+1}).
std::vector<SeriesZ> cusp_basis(std::int64_t k, std::size_t order) {
    int d = dim_cuspforms_level1(k);
    std::vector<SeriesZ> basis;
    if (d == 0) return basis;
    SeriesZ e4 = eisenstein(order, 4);
    SeriesZ e6 = eisenstein(order, 6);
    SeriesZ dlt = delta_series(order);
    SeriesZ cur = dlt;  // Delta^i
    for (std::int64_t i = 1; i <= k / 12; ++i) {
        if (i > 1) cur = cur.mul(dlt);
        std::int64_t w = k - 12 * i;
        if (w == 2) continue;
        std::int64_t beta = (w % 4 == 0) ? 0 : 1;
        std::int64_t alpha = (w - 6 * beta) / 4;
        SeriesZ g = cur;
        for (std::int64_t a = 0; a < alpha; ++a) g = g.mul(e4);
        for (std::int64_t b = 0; b < beta; ++b) g = g.mul(e6);
        basis.push_back(std::move(g));
    }
    if (static_cast<int>(basis.size()) != d) throw Error("cusp basis dimension mismatch");
    return basis;
}

using MatZ = std::vector<std::vector<mpz_class>>;  // column-major: M[j][i] = entry (row j, col i)

MatZ mat_identity(int d) {
    MatZ I(static_cast<std::size_t>(d), std::vector<mpz_class>(static_cast<std::size_t>(d), mpz_class(0)));
    for (int i = 0; i < d; ++i) I[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    return I;
}

MatZ mat_mul(const MatZ& A, const MatZ& B) {
    int d = static_cast<int>(A.size());
    MatZ C(static_cast<std::size_t>(d), std::vector<mpz_class>(static_cast<std::size_t>(d), mpz_class(0)));
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) {
            const mpz_class& a = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
            if (a == 0) continue;
            for (int j = 0; j < d; ++j)
                C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    a * B[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        }
    return C;
}

// Matrix of T_p on the triangular basis, exact integers.
MatZ hecke_matrix(std::int64_t k, std::int64_t p) {
    int d = dim_cuspforms_level1(k);
    std::size_t order = static_cast<std::size_t>(d) * static_cast<std::size_t>(p) + 2;
    auto basis = cusp_basis(k, order);
    mpz_class pk1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));

    MatZ M(static_cast<std::size_t>(d), std::vector<mpz_class>(static_cast<std::size_t>(d), mpz_class(0)));
    for (int i = 0; i < d; ++i) {
        // a_m(T_p g) = a_{pm}(g) + p^{k-1} a_{m/p}(g)
        std::vector<mpz_class> v(static_cast<std::size_t>(d) + 1, mpz_class(0));
        for (int m = 1; m <= d; ++m) {
            mpz_class a = basis[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(m) * static_cast<std::size_t>(p)];
            if (m % p == 0) a += pk1 * basis[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(m / p)];
            v[static_cast<std::size_t>(m)] = a;
        }
        // forward substitution against the unit-diagonal triangular basis
        for (int j = 1; j <= d; ++j) {
            mpz_class coef = v[static_cast<std::size_t>(j)];
            for (int l = 1; l < j; ++l)
                coef -= M[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(i)] *
                        basis[static_cast<std::size_t>(l - 1)].c[static_cast<std::size_t>(j)];
            M[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)] = coef;
        }
    }
    return M;
}

mpz_class mat_trace(const MatZ& M) {
    mpz_class t(0);
    for (std::size_t i = 0; i < M.size(); ++i) t += M[i][i];
    return t;
}

// Traces of T_{p^l}, l = 0..count, via N_l = M_p N_{l-1} - p^{k-1} N_{l-2}.
std::vector<mpz_class> prime_power_traces_matrix(std::int64_t k, std::int64_t p, int count) {
    int d = dim_cuspforms_level1(k);
    std::vector<mpz_class> S(static_cast<std::size_t>(count) + 1);
    S[0] = d;
    if (count == 0) return S;
    MatZ Mp = hecke_matrix(k, p);
    mpz_class pk1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
    MatZ Nm2 = mat_identity(d), Nm1 = Mp;
    S[1] = mat_trace(Mp);
    for (int l = 2; l <= count; ++l) {
        MatZ N = mat_mul(Mp, Nm1);
        for (std::size_t i = 0; i < N.size(); ++i)
            for (std::size_t j = 0; j < N.size(); ++j) N[i][j] -= pk1 * Nm2[i][j];
        S[static_cast<std::size_t>(l)] = mat_trace(N);
        Nm2 = std::move(Nm1);
        Nm1 = std::move(N);
    }
    return S;
}

std::vector<mpz_class> prime_power_traces(std::int64_t k, std::int64_t p, int count) {
    // Class-number route when the table reaches 4 p^count, else matrices.
    double budget = 4.0 * std::pow(static_cast<double>(p), static_cast<double>(count));
    if (budget <= static_cast<double>(HURWITZ_CAP)) {
        std::vector<mpz_class> S(static_cast<std::size_t>(count) + 1);
        S[0] = dim_cuspforms_level1(k);
        std::int64_t pw = 1;
        for (int l = 1; l <= count; ++l) {
            pw *= p;
            S[static_cast<std::size_t>(l)] = trace_hecke_level1(k, pw);
        }
        return S;
    }
    return prime_power_traces_matrix(k, p, count);
}

mpq_class normalized_trace(const mpz_class& tr, std::int64_t p, std::int64_t k, int m) {
    // s_m = Tr T_{p^m} / p^{m(k-1)/2}; for odd m(k-1) the residual sqrt(p)
    // factor is applied by the caller in floating point.
    long e2 = static_cast<long>(m) * static_cast<long>(k - 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e2 / 2));
    mpq_class q(tr, den);
    q.canonicalize();
    return q;
}

double normalized_trace_d(const mpz_class& tr, std::int64_t p, std::int64_t k, int m) {
    long e2 = static_cast<long>(m) * static_cast<long>(k - 1);
    double v = normalized_trace(tr, p, k, m).get_d();
    if (e2 % 2) v /= std::sqrt(static_cast<double>(p));
    return v;
}

}  // namespace

double plancherel_cm(std::int64_t p, int m) {
    int a = std::abs(m);
    if (a == 0) return 1.0;
    if (a % 2) return 0.0;
    double ph = std::pow(static_cast<double>(p), -0.5 * a);
    double ph2 = std::pow(static_cast<double>(p), -0.5 * (a - 2));
    return 0.5 * ph - 0.5 * ph2;
}

double weyl_cos_sum_level1(std::int64_t k, std::int64_t p, int m) {
    if (m < 1) throw Error("weyl_cos_sum_level1 needs m >= 1");
    auto S = prime_power_traces(k, p, m);
    double sm = normalized_trace_d(S[static_cast<std::size_t>(m)], p, k, m);
    double sm2 = m >= 2 ? normalized_trace_d(S[static_cast<std::size_t>(m - 2)], p, k, m - 2) : 0.0;
    return 0.5 * (sm - sm2);
}

// ---------------------------------------------------------------------------
// Exact rational polynomial arithmetic + Sturm isolation
// ---------------------------------------------------------------------------

namespace {

struct QPoly {
    std::vector<mpq_class> c;  // ascending degree

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool zero() const { return c.empty(); }
    mpq_class eval(const mpq_class& x) const {
        mpq_class v(0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
        return v;
    }
    QPoly derivative() const {
        QPoly r;
        for (std::size_t i = 1; i < c.size(); ++i) r.c.push_back(c[i] * static_cast<long>(i));
        r.trim();
        return r;
    }
    void make_monic() {
        if (zero()) return;
        mpq_class lead = c.back();
        for (auto& x : c) x /= lead;
    }
};

QPoly poly_rem(QPoly a, const QPoly& b) {
    while (!a.zero() && a.deg() >= b.deg()) {
        mpq_class f = a.c.back() / b.c.back();
        int shift = a.deg() - b.deg();
        for (int i = 0; i <= b.deg(); ++i) a.c[static_cast<std::size_t>(i + shift)] -= f * b.c[static_cast<std::size_t>(i)];
        a.c.pop_back();
        a.trim();
    }
    return a;
}

QPoly poly_gcd(QPoly a, QPoly b) {
    a.trim();
    b.trim();
    while (!b.zero()) {
        QPoly r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
        b.make_monic();
    }
    a.make_monic();
    return a;
}

QPoly poly_divide_exact(const QPoly& a, const QPoly& b) {
    QPoly rem = a, q;
    q.c.assign(static_cast<std::size_t>(a.deg() - b.deg()) + 1, mpq_class(0));
    while (!rem.zero() && rem.deg() >= b.deg()) {
        mpq_class f = rem.c.back() / b.c.back();
        int shift = rem.deg() - b.deg();
        q.c[static_cast<std::size_t>(shift)] = f;
        for (int i = 0; i <= b.deg(); ++i)
            rem.c[static_cast<std::size_t>(i + shift)] -= f * b.c[static_cast<std::size_t>(i)];
        rem.c.pop_back();
        rem.trim();
    }
    if (!rem.zero()) throw Error("poly_divide_exact: nonzero remainder");
    q.trim();
    return q;
}

std::vector<QPoly> sturm_chain(const QPoly& f) {
    std::vector<QPoly> chain;
    chain.push_back(f);
    QPoly d = f.derivative();
    if (d.zero()) return chain;
    chain.push_back(d);
    while (true) {
        QPoly r = poly_rem(chain[chain.size() - 2], chain.back());
        if (r.zero()) break;
        for (auto& x : r.c) x = -x;
        // scale by a positive constant to tame coefficient growth
        mpq_class lead = abs(r.c.back());
        for (auto& x : r.c) x /= lead;
        chain.push_back(std::move(r));
        if (chain.back().deg() == 0) break;
    }
    return chain;
}

int sign_mpq(const mpq_class& v) { return v == 0 ? 0 : (v > 0 ? 1 : -1); }

int sign_variations(const std::vector<QPoly>& chain, const mpq_class& x) {
    int var = 0, prev = 0;
    for (const auto& f : chain) {
        int s = sign_mpq(f.eval(x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

struct RootInterval {
    mpq_class lo, hi;
    int multiplicity = 1;
};

// Isolate and refine all real roots of f in [lo, hi] to width <= tol, with
// multiplicities (via squarefree decomposition).
std::vector<RootInterval> real_roots(const QPoly& f_in, const mpq_class& lo, const mpq_class& hi, const mpq_class& tol) {
    QPoly f = f_in;
    f.trim();
    if (f.deg() <= 0) return {};
    QPoly g = poly_gcd(f, f.derivative());
    std::vector<RootInterval> deeper;
    if (g.deg() > 0) deeper = real_roots(g, lo, hi, tol);
    QPoly sf = g.deg() > 0 ? poly_divide_exact(f, g) : f;

    auto chain = sturm_chain(sf);
    auto count = [&](const mpq_class& a, const mpq_class& b) { return sign_variations(chain, a) - sign_variations(chain, b); };

    std::vector<RootInterval> roots;
    std::vector<std::pair<mpq_class, mpq_class>> stack{{lo, hi}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        int n = count(a, b);
        if (n == 0) continue;
        if (n == 1) {
            // bisect to tolerance; keep endpoints off the root by nudging on exact hits
            mpq_class aa = a, bb = b;
            while (bb - aa > tol) {
                mpq_class mid = (aa + bb) / 2;
                int sm = sign_mpq(sf.eval(mid));
                if (sm == 0) {
                    mpq_class eps = tol / 16;
                    aa = mid - eps;
                    bb = mid + eps;
                    break;
                }
                if (sign_mpq(sf.eval(aa)) * sm < 0)
                    bb = mid;
                else
                    aa = mid;
            }
            roots.push_back({aa, bb, 1});
            continue;
        }
        mpq_class mid = (a + b) / 2;
        if (sf.eval(mid) == 0) mid += (b - a) / 1000;
        stack.push_back({a, mid});
        stack.push_back({mid, b});
    }
    // merge multiplicities from the gcd part
    for (auto& r : roots)
        for (const auto& dr : deeper)
            if (!(dr.hi < r.lo || r.hi < dr.lo)) r.multiplicity += dr.multiplicity;
    std::sort(roots.begin(), roots.end(), [](const RootInterval& x, const RootInterval& y) { return x.lo < y.lo; });
    return roots;
}

// Characteristic-polynomial roots of T_p in the variable Y = a_p / p^{(k-2)/2},
// i.e. Y = 2 sqrt(p) cos(theta).
std::vector<std::pair<mpq_class, int>> eigenvalue_roots_scaled(std::int64_t k, std::int64_t p) {
    int d = dim_cuspforms_level1(k);
    if (d > 60) throw DimensionTooLarge("dimension " + std::to_string(d) + " > 60");
    std::vector<std::pair<mpq_class, int>> out;
    if (d == 0) return out;

    auto P = eigenvalue_power_sums(k, p, d);

    // Newton's identities: j e_j = sum_{i=1..j} (-1)^{i-1} e_{j-i} P_i
    std::vector<mpq_class> e(static_cast<std::size_t>(d) + 1);
    e[0] = 1;
    for (int j = 1; j <= d; ++j) {
        mpq_class s(0);
        int sign = 1;
        for (int i = 1; i <= j; ++i) {
            mpq_class term = e[static_cast<std::size_t>(j - i)] * mpq_class(P[static_cast<std::size_t>(i - 1)]);
            s += sign > 0 ? term : -term;
            sign = -sign;
        }
        e[static_cast<std::size_t>(j)] = s / j;
        if (e[static_cast<std::size_t>(j)].get_den() != 1)
            throw Error("Newton identities produced a non-integer (internal bug)");
    }

    // scaled char poly: coefficients of Y^{d-j} are (-1)^j e_j / p^{j(k-2)/2}
    QPoly q;
    q.c.assign(static_cast<std::size_t>(d) + 1, mpq_class(0));
    mpz_class scale;  // p^{(k-2)/2}
    mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>((k - 2) / 2));
    mpz_class spow(1);
    for (int j = 0; j <= d; ++j) {
        mpq_class coef(j % 2 == 0 ? e[static_cast<std::size_t>(j)] : -e[static_cast<std::size_t>(j)]);
        coef /= mpq_class(spow);
        q.c[static_cast<std::size_t>(d - j)] = coef;
        spow *= scale;
    }

    std::int64_t bound = 2 * (isqrt_i64(p) + 1);
    mpq_class tol(mpz_class(1), mpz_class("100000000000"));  // 1e-11 in Y
    auto roots = real_roots(q, mpq_class(-bound), mpq_class(bound), tol);
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    if (total != d) throw Error("root count " + std::to_string(total) + " != dim " + std::to_string(d));
    out.reserve(roots.size());
    for (const auto& r : roots) out.push_back({(r.lo + r.hi) / 2, r.multiplicity});
    return out;
}

}  // namespace

std::vector<mpz_class> eigenvalue_power_sums(std::int64_t k, std::int64_t p, int count) {
    auto S = prime_power_traces(k, p, count);
    mpz_class pk1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));

    // A_l = sum_i 2cos(l theta_i) p^{l(k-1)/2}
    std::vector<mpz_class> A(static_cast<std::size_t>(count) + 1);
    if (count >= 1) A[1] = S[1];
    for (int l = 2; l <= count; ++l) A[static_cast<std::size_t>(l)] = S[static_cast<std::size_t>(l)] - pk1 * S[static_cast<std::size_t>(l - 2)];

    std::vector<mpz_class> P(static_cast<std::size_t>(count));
    for (int m = 1; m <= count; ++m) {
        mpz_class acc(0);
        mpz_class binom(1);  // C(m, j)
        mpz_class ppow(1);   // p^{j(k-1)}
        for (int j = 0; 2 * j < m; ++j) {
            if (j > 0) {
                binom = binom * (m - j + 1) / j;
                ppow *= pk1;
            }
            acc += binom * ppow * A[static_cast<std::size_t>(m - 2 * j)];
        }
        if (m % 2 == 0) {
            mpz_class mid;
            mpz_bin_uiui(mid.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(m / 2));
            mpz_class ph;
            mpz_pow_ui(ph.get_mpz_t(), pk1.get_mpz_t(), static_cast<unsigned long>(m / 2));
            acc += mid * ph * dim_cuspforms_level1(k);
        }
        P[static_cast<std::size_t>(m - 1)] = acc;
    }
    return P;
}

EigenangleSet eigen_angles_level1(std::int64_t k, std::int64_t p) {
    EigenangleSet E;
    E.k = k;
    E.p = p;
    E.d = dim_cuspforms_level1(k);
    if (E.d == 0) return E;
    double sp = std::sqrt(static_cast<double>(p));
    for (const auto& [y, mult] : eigenvalue_roots_scaled(k, p)) {
        double two_cos = y.get_d() / sp;
        if (std::abs(two_cos) > 2.0 + 1e-8)
            throw RootOutOfRange("recovered root " + std::to_string(two_cos) + " outside [-2,2]");
        two_cos = std::clamp(two_cos, -2.0, 2.0);
        for (int i = 0; i < mult; ++i) {
            E.two_cos_theta.push_back(two_cos);
            E.angles.push_back(std::acos(0.5 * two_cos));
        }
    }
    return E;
}

std::vector<std::vector<double>> eigen_angle_tuples_level1(std::int64_t k, const std::vector<std::int64_t>& primes) {
    int d = dim_cuspforms_level1(k);
    if (d == 0) throw EmptySpace("S_" + std::to_string(k) + "(1) is trivial");
    std::size_t n = primes.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (primes[i] == primes[j]) throw Error("primes must be pairwise distinct");

    std::vector<std::vector<double>> tuples(static_cast<std::size_t>(d), std::vector<double>(n));
    auto roots1 = eigenvalue_roots_scaled(k, primes[0]);
    std::vector<mpq_class> alpha;  // X-coordinates (actual eigenvalues of T_{p_1})
    mpz_class scale1;
    mpz_ui_pow_ui(scale1.get_mpz_t(), static_cast<unsigned long>(primes[0]), static_cast<unsigned long>((k - 2) / 2));
    for (const auto& [y, mult] : roots1)
        for (int i = 0; i < mult; ++i) alpha.push_back(y * mpq_class(scale1));
    double sp1 = std::sqrt(static_cast<double>(primes[0]));
    for (int i = 0; i < d; ++i) {
        mpq_class y = alpha[static_cast<std::size_t>(i)] / mpq_class(scale1);
        tuples[static_cast<std::size_t>(i)][0] = std::acos(std::clamp(y.get_d() / (2.0 * sp1), -1.0, 1.0));
    }

    if (n == 1) return tuples;
    if (d == 1) {
        for (std::size_t j = 1; j < n; ++j) {
            auto Ej = eigen_angles_level1(k, primes[j]);
            for (auto& t : tuples) t[j] = Ej.angles[0];
        }
        return tuples;
    }

    // Krylov basis K = [v, M1 v, ..., M1^{d-1} v]; solve K q = M_j v, then
    // eigenvalue of T_{p_j} on the form with T_{p_1}-eigenvalue alpha is
    // sum_c q_c alpha^c.
    MatZ M1 = hecke_matrix(k, primes[0]);
    MatZ K;
    int pivot_col = -1;
    std::vector<std::vector<mpq_class>> Kq;
    for (int start = 0; start < d; ++start) {
        std::vector<std::vector<mpz_class>> cols;
        std::vector<mpz_class> v(static_cast<std::size_t>(d), mpz_class(0));
        v[static_cast<std::size_t>(start)] = 1;
        cols.push_back(v);
        for (int c = 1; c < d; ++c) {
            std::vector<mpz_class> w(static_cast<std::size_t>(d), mpz_class(0));
            for (int r = 0; r < d; ++r)
                for (int l = 0; l < d; ++l)
                    w[static_cast<std::size_t>(r)] += M1[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] *
                                                      cols.back()[static_cast<std::size_t>(l)];
            cols.push_back(std::move(w));
        }
        // test invertibility by rational elimination
        std::vector<std::vector<mpq_class>> A(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d)));
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = mpq_class(cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
        std::vector<std::vector<mpq_class>> B = A;
        bool singular = false;
        for (int col = 0; col < d && !singular; ++col) {
            int piv = -1;
            for (int r = col; r < d; ++r)
                if (B[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) {
                singular = true;
                break;
            }
            std::swap(B[static_cast<std::size_t>(piv)], B[static_cast<std::size_t>(col)]);
            for (int r = col + 1; r < d; ++r) {
                if (B[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] == 0) continue;
                mpq_class f = B[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / B[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
                for (int c = col; c < d; ++c)
                    B[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * B[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            }
        }
        if (!singular) {
            Kq = std::move(A);
            pivot_col = start;
            break;
        }
    }
    if (pivot_col < 0) throw Error("T_{p_1} admits no cyclic coordinate vector");

    auto solve = [&](const std::vector<mpq_class>& rhs) {
        int dd = d;
        std::vector<std::vector<mpq_class>> A = Kq;
        std::vector<mpq_class> b = rhs;
        for (int col = 0; col < dd; ++col) {
            int piv = -1;
            for (int r = col; r < dd; ++r)
                if (A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) throw Error("singular Krylov system");
            std::swap(A[static_cast<std::size_t>(piv)], A[static_cast<std::size_t>(col)]);
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
            for (int r = 0; r < dd; ++r) {
                if (r == col || A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] == 0) continue;
                mpq_class f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / A[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
                for (int c = col; c < dd; ++c)
                    A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * A[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
                b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
            }
        }
        std::vector<mpq_class> x(static_cast<std::size_t>(dd));
        for (int i = 0; i < dd; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] / A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        return x;
    };

    for (std::size_t j = 1; j < n; ++j) {
        MatZ Mj = hecke_matrix(k, primes[j]);
        std::vector<mpq_class> rhs(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r) rhs[static_cast<std::size_t>(r)] = mpq_class(Mj[static_cast<std::size_t>(r)][static_cast<std::size_t>(pivot_col)]);
        auto q = solve(rhs);

        auto Ej = eigen_angles_level1(k, primes[j]);
        mpz_class scalej;
        mpz_ui_pow_ui(scalej.get_mpz_t(), static_cast<unsigned long>(primes[j]), static_cast<unsigned long>((k - 2) / 2));
        double spj = std::sqrt(static_cast<double>(primes[j]));
        std::vector<bool> used(static_cast<std::size_t>(d), false);
        for (int i = 0; i < d; ++i) {
            mpq_class beta(0);
            for (int c = d - 1; c >= 0; --c) beta = beta * alpha[static_cast<std::size_t>(i)] + q[static_cast<std::size_t>(c)];
            mpq_class ynorm = beta / mpq_class(scalej);
            double two_cos = ynorm.get_d() / spj;
            if (std::abs(two_cos) > 2.0 + 1e-6) throw RootOutOfRange("paired eigenvalue outside [-2,2]");
            double theta = std::acos(std::clamp(0.5 * two_cos, -1.0, 1.0));
            // cross-check against the independently recovered angle list
            int best = -1;
            double bestd = 1e18;
            for (int l = 0; l < d; ++l) {
                if (used[static_cast<std::size_t>(l)]) continue;
                double dd = std::abs(Ej.angles[static_cast<std::size_t>(l)] - theta);
                if (dd < bestd) {
                    bestd = dd;
                    best = l;
                }
            }
            if (best < 0 || bestd > 1e-6) throw Error("cross-prime eigenvalue pairing failed");
            used[static_cast<std::size_t>(best)] = true;
            tuples[static_cast<std::size_t>(i)][j] = theta;
        }
    }
    return tuples;
}

double trace_error_envelope(std::int64_t p, int m, std::int64_t N) {
    if (N < 1) throw Error("level must be positive");
    std::int64_t tau = 0, omega = 0, rem = N;
    for (std::int64_t d = 1; d * d <= N; ++d)
        if (N % d == 0) tau += (d * d == N) ? 1 : 2;
    for (std::int64_t q = 2; q * q <= rem; ++q)
        if (rem % q == 0) {
            ++omega;
            while (rem % q == 0) rem /= q;
        }
    if (rem > 1) ++omega;
    double pm = std::pow(static_cast<double>(p), static_cast<double>(m));
    return std::pow(static_cast<double>(p), 1.5 * m) * std::pow(2.0, static_cast<double>(omega)) * std::log(pm) +
           static_cast<double>(tau) * std::sqrt(static_cast<double>(N));
}

JointCosResidual joint_cos_residual(const std::vector<std::int64_t>& k_list, std::int64_t p, const std::vector<int>& m_vector) {
    if (k_list.size() != m_vector.size()) throw ArityMismatch("k_list and m_vector sizes differ");
    std::size_t r = k_list.size();
    double prod_sums = 1.0, prod_main = 1.0;
    std::vector<double> B(r);
    std::vector<double> dims(r);
    for (std::size_t j = 0; j < r; ++j) {
        if (m_vector[j] == 0) throw Error("joint_cos_residual requires m_j != 0");
        int m = std::abs(m_vector[j]);
        prod_sums *= weyl_cos_sum_level1(k_list[j], p, m);
        int dj = dim_cuspforms_level1(k_list[j]);
        dims[j] = dj;
        prod_main *= dj * plancherel_cm(p, m);
        B[j] = trace_error_envelope(p, m);
    }
    JointCosResidual out;
    out.residual = std::abs(prod_sums - prod_main);
    // sum over proper subsets L of {1..r}: (prod_{l in L} d_l) (prod_{j not in L} B_j)
    double bound = 0.0;
    for (std::size_t mask = 0; mask + 1 < (1ull << r); ++mask) {
        double term = 1.0;
        for (std::size_t j = 0; j < r; ++j) term *= (mask >> j & 1) ? dims[j] : B[j];
        bound += term;
    }
    out.bound = bound;
    return out;
}

std::string traces_csv(std::int64_t k, const std::vector<std::int64_t>& ns) {
    std::ostringstream os;
    os << "k,n,trace\n";
    for (std::int64_t n : ns) os << k << "," << n << "," << trace_hecke_level1(k, n).get_str() << "\n";
    return os.str();
}

std::string EigenangleSet::to_csv() const {
    std::ostringstream os;
    os << "i,theta,two_cos_theta\n";
    os.precision(17);
    for (std::size_t i = 0; i < angles.size(); ++i) os << (i + 1) << "," << angles[i] << "," << two_cos_theta[i] << "\n";
    return os.str();
}

}  // namespace satolab::hecke
