#include "satolab/field_census.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "vendor_json.hpp"

namespace satolab::census {

PrimeField::PrimeField(std::int64_t p_) : p(p_) {
    if (p < 5 || !is_prime_u64(static_cast<std::uint64_t>(p)))
        throw CompositeModulus("modulus must be a prime >= 5, got " + std::to_string(p));
    qr.assign(static_cast<std::size_t>(p), -1);
    qr[0] = 0;
    for (std::int64_t x = 1; x < p; ++x) {
        std::int64_t s = static_cast<std::int64_t>(mulmod_u64(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(x),
                                                              static_cast<std::uint64_t>(p)));
        qr[static_cast<std::size_t>(s)] = 1;
    }
}

int legendre_symbol(std::int64_t a, const PrimeField& field) { return field.chi(a); }

namespace {

std::int64_t mod_p(std::int64_t a, std::int64_t p) {
    a %= p;
    return a < 0 ? a + p : a;
}

std::int64_t mul_p(std::int64_t a, std::int64_t b, std::int64_t p) {
    return static_cast<std::int64_t>(mulmod_u64(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b),
                                                static_cast<std::uint64_t>(p)));
}

std::int64_t pow_p(std::int64_t b, std::int64_t e, std::int64_t p) {
    return static_cast<std::int64_t>(powmod_u64(static_cast<std::uint64_t>(mod_p(b, p)), static_cast<std::uint64_t>(e),
                                                static_cast<std::uint64_t>(p)));
}

std::int64_t inv_p(std::int64_t a, std::int64_t p) { return pow_p(a, p - 2, p); }

std::int64_t discriminant_p(std::int64_t a, std::int64_t b, std::int64_t p) {
    std::int64_t a3 = mul_p(mul_p(a, a, p), a, p);
    std::int64_t b2 = mul_p(b, b, p);
    return mod_p(4 * a3 % p + 27 * b2 % p, p);
}

// Character sum over x of chi(x^3 + a x + b), table-driven.
std::int64_t char_sum(std::int64_t a, std::int64_t b, const PrimeField& F) {
    std::int64_t p = F.p;
    std::int64_t s = 0;
    for (std::int64_t x = 0; x < p; ++x) {
        std::int64_t x2 = mul_p(x, x, p);
        std::int64_t f = mod_p(mul_p(x2, x, p) + mul_p(a, x, p) + b, p);
        s += F.qr[static_cast<std::size_t>(f)];
    }
    return s;
}

std::int64_t primitive_root(std::int64_t p) {
    std::int64_t n = p - 1;
    std::vector<std::int64_t> fac;
    std::int64_t m = n;
    for (std::int64_t d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            fac.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) fac.push_back(m);
    for (std::int64_t g = 2; g < p; ++g) {
        bool ok = true;
        for (std::int64_t q : fac) {
            if (pow_p(g, n / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw Error("no primitive root found (non-prime modulus?)");
}

struct PolyZ {
    std::vector<mpz_class> c;  // ascending degree

    static PolyZ from_i64(const std::vector<std::int64_t>& v) {
        PolyZ r;
        r.c.reserve(v.size());
        for (auto x : v) r.c.emplace_back(x);
        r.trim();
        return r;
    }
    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool zero() const { return c.empty(); }
    PolyZ operator*(const PolyZ& o) const {
        if (zero() || o.zero()) return {};
        PolyZ r;
        r.c.assign(c.size() + o.c.size() - 1, mpz_class(0));
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
        return r;
    }
    PolyZ scaled(std::int64_t s) const {
        PolyZ r = *this;
        for (auto& x : r.c) x *= s;
        r.trim();
        return r;
    }
    PolyZ operator+(const PolyZ& o) const {
        PolyZ r;
        r.c.assign(std::max(c.size(), o.c.size()), mpz_class(0));
        for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
        for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
        r.trim();
        return r;
    }
};

bool proportional(const PolyZ& u, const PolyZ& v) {
    if (u.zero() || v.zero()) return true;
    std::size_t n = std::max(u.c.size(), v.c.size());
    auto at = [n](const PolyZ& f, std::size_t i) { return i < f.c.size() ? f.c[i] : mpz_class(0); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (at(u, i) * at(v, j) != at(u, j) * at(v, i)) return false;
    return true;
}

std::int64_t eval_poly_mod(const std::vector<std::int64_t>& coeffs, std::int64_t t, std::int64_t p) {
    std::int64_t v = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = mod_p(mul_p(v, t, p) + mod_p(*it, p), p);
    return v;
}

}  // namespace

bool j_invariant_nonconstant(const FamilySpec& spec) {
    // j(T) is constant iff 4A^3 and Delta = 4A^3 + 27B^2 are linearly
    // dependent over Q (covers A == 0, B == 0 and Delta == 0).
    PolyZ A = PolyZ::from_i64(spec.a_coeffs);
    PolyZ B = PolyZ::from_i64(spec.b_coeffs);
    PolyZ u = (A * A * A).scaled(4);
    PolyZ delta = u + (B * B).scaled(27);
    return !proportional(u, delta);
}

std::int64_t frobenius_trace(std::int64_t a, std::int64_t b, const PrimeField& field) {
    std::int64_t p = field.p;
    a = mod_p(a, p);
    b = mod_p(b, p);
    if (discriminant_p(a, b, p) == 0)
        throw SingularCurve("4a^3 + 27b^2 = 0 mod " + std::to_string(p));
    return -char_sum(a, b, field);
}

TraceHistogram full_family_histogram(std::int64_t p, int workers) {
    PrimeField F(p);
    const std::int64_t span = 2 * isqrt_i64(4 * p) + 1;
    const std::int64_t off = span / 2;

    // j = 1728 (b = 0): quartic twist classes; j = 0 (a = 0): sextic classes;
    // all other j: one representative plus its quadratic twist.
    const std::int64_t j1728 = mod_p(1728, p);
    const std::int64_t g = primitive_root(p);
    const std::int64_t r4 = std::gcd<std::int64_t>(4, p - 1);
    const std::int64_t r6 = std::gcd<std::int64_t>(6, p - 1);

    // Generic j are processed in fixed blocks so any worker count reduces to
    // the same integer histogram.
    const std::int64_t block = 64;
    const std::int64_t n_blocks = (p + block - 1) / block;
    std::vector<std::vector<std::int64_t>> partial(static_cast<std::size_t>(n_blocks));

    parallel_blocks(p, block, workers, [&](std::int64_t bi, std::int64_t lo, std::int64_t hi) {
        std::vector<std::int64_t> local(static_cast<std::size_t>(span), 0);
        for (std::int64_t j = lo; j < hi; ++j) {
            if (j == 0 || j == j1728) continue;
            // Model y^2 = x^3 + 3k x + 2k with k = j/(1728-j) has invariant j.
            std::int64_t k = mul_p(j, inv_p(mod_p(j1728 - j, p), p), p);
            std::int64_t t = -char_sum(mod_p(3 * k, p), mod_p(2 * k, p), F);
            local[static_cast<std::size_t>(t + off)] += (p - 1) / 2;
            local[static_cast<std::size_t>(-t + off)] += (p - 1) / 2;
        }
        partial[static_cast<std::size_t>(bi)] = std::move(local);
    });

    std::vector<std::int64_t> acc(static_cast<std::size_t>(span), 0);
    for (const auto& part : partial)
        if (!part.empty())
            for (std::int64_t i = 0; i < span; ++i) acc[static_cast<std::size_t>(i)] += part[static_cast<std::size_t>(i)];

    for (std::int64_t e = 0; e < r4; ++e) {
        std::int64_t a = pow_p(g, e, p);
        std::int64_t t = -char_sum(a, 0, F);
        acc[static_cast<std::size_t>(t + off)] += (p - 1) / r4;
    }
    for (std::int64_t e = 0; e < r6; ++e) {
        std::int64_t b = pow_p(g, e, p);
        std::int64_t t = -char_sum(0, b, F);
        acc[static_cast<std::size_t>(t + off)] += (p - 1) / r6;
    }

    TraceHistogram h;
    h.p = p;
    h.family = FamilySpec::full();
    for (std::int64_t i = 0; i < span; ++i) {
        if (acc[static_cast<std::size_t>(i)] != 0) {
            std::int64_t t = i - off;
            if (t * t > 4 * p) throw Error("Hasse bound violated in census");
            h.counts[t] = acc[static_cast<std::size_t>(i)];
            h.total += acc[static_cast<std::size_t>(i)];
        }
    }
    return h;
}

TraceHistogram one_param_histogram(const FamilySpec& spec, std::int64_t p, int workers) {
    if (spec.kind != FamilyKind::OneParam)
        throw Error("one_param_histogram requires a OneParam family");
    if (!j_invariant_nonconstant(spec))
        throw ConstantJInvariant("family has constant j-invariant");
    PrimeField F(p);
    const std::int64_t span = 2 * isqrt_i64(4 * p) + 1;
    const std::int64_t off = span / 2;

    const std::int64_t block = 64;
    const std::int64_t n_blocks = (p + block - 1) / block;
    std::vector<std::vector<std::int64_t>> partial(static_cast<std::size_t>(n_blocks));
    parallel_blocks(p, block, workers, [&](std::int64_t bi, std::int64_t lo, std::int64_t hi) {
        std::vector<std::int64_t> local(static_cast<std::size_t>(span), 0);
        for (std::int64_t t = lo; t < hi; ++t) {
            std::int64_t a = eval_poly_mod(spec.a_coeffs, t, p);
            std::int64_t b = eval_poly_mod(spec.b_coeffs, t, p);
            if (discriminant_p(a, b, p) == 0) continue;
            std::int64_t tr = -char_sum(a, b, F);
            local[static_cast<std::size_t>(tr + off)] += 1;
        }
        partial[static_cast<std::size_t>(bi)] = std::move(local);
    });

    TraceHistogram h;
    h.p = p;
    h.family = spec;
    std::vector<std::int64_t> acc(static_cast<std::size_t>(span), 0);
    for (const auto& part : partial)
        if (!part.empty())
            for (std::int64_t i = 0; i < span; ++i) acc[static_cast<std::size_t>(i)] += part[static_cast<std::size_t>(i)];
    for (std::int64_t i = 0; i < span; ++i) {
        if (acc[static_cast<std::size_t>(i)] != 0) {
            h.counts[i - off] = acc[static_cast<std::size_t>(i)];
            h.total += acc[static_cast<std::size_t>(i)];
        }
    }
    return h;
}

mpq_class power_moment(const TraceHistogram& hist, int R) {
    if (hist.family.kind != FamilyKind::Full)
        throw Error("power_moment is defined for the full family");
    mpz_class num(0);
    for (const auto& [t, c] : hist.counts) {
        mpz_class tp(1);
        mpz_class tt(t);
        for (int i = 0; i < 2 * R; ++i) tp *= tt;
        num += tp * c;
    }
    mpq_class q(num, mpz_class(hist.p) * mpz_class(hist.p - 1));
    q.canonicalize();
    return q;
}

double sym_eval(int k, double two_cos_theta) {
    // U_0 = 1, U_1 = 2cos(theta), U_{m+1} = 2cos(theta) U_m - U_{m-1}
    double um1 = 0.0, u = 1.0;
    for (int m = 0; m < k; ++m) {
        double next = two_cos_theta * u - um1;
        um1 = u;
        u = next;
    }
    return u;
}

double sym_power_sum(const TraceHistogram& hist, int k) {
    const double sp = std::sqrt(static_cast<double>(hist.p));
    KahanSum s;
    for (const auto& [t, c] : hist.counts) s.add(static_cast<double>(c) * sym_eval(k, static_cast<double>(t) / sp));
    double norm = hist.family.kind == FamilyKind::Full
                      ? static_cast<double>(hist.p - 1) * static_cast<double>(hist.p - 1)
                      : static_cast<double>(hist.p);
    return s.value() / norm;
}

mpz_class joint_region_count(const std::vector<const TraceHistogram*>& hists,
                             const std::function<double(const std::vector<double>&)>& F, double lo, double hi) {
    if (hists.empty()) throw ArityMismatch("need at least one histogram");
    std::int64_t p = hists[0]->p;
    for (const auto* h : hists)
        if (h->p != p) throw MixedPrimes("histograms use different primes");
    const std::size_t n = hists.size();
    const double denom = 2.0 * std::sqrt(static_cast<double>(p));

    std::vector<std::vector<std::pair<double, std::int64_t>>> atoms(n);
    for (std::size_t j = 0; j < n; ++j)
        for (const auto& [t, c] : hists[j]->counts)
            atoms[j].push_back({static_cast<double>(t) / denom, c});

    mpz_class total(0);
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
        mpz_class mult(1);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = atoms[j][idx[j]].first;
            mult *= atoms[j][idx[j]].second;
        }
        double v = F(x);
        if (v >= lo && v <= hi) total += mult;
        std::size_t j = 0;
        while (j < n && ++idx[j] == atoms[j].size()) {
            idx[j] = 0;
            ++j;
        }
        if (j == n) break;
    }
    return total;
}

std::vector<std::int64_t> TraceHistogram::keys() const {
    std::vector<std::int64_t> ks;
    ks.reserve(counts.size());
    for (const auto& [t, c] : counts) ks.push_back(t);
    return ks;
}

std::string TraceHistogram::to_csv() const {
    std::ostringstream os;
    os << "t,count\n";
    for (const auto& [t, c] : counts) os << t << "," << c << "\n";
    return os.str();
}

namespace {
nlohmann::json family_json(const FamilySpec& f) {
    nlohmann::json j;
    j["kind"] = f.kind == FamilyKind::Full ? "full" : "one_param";
    if (f.kind == FamilyKind::OneParam) {
        j["a_coeffs"] = f.a_coeffs;
        j["b_coeffs"] = f.b_coeffs;
    }
    return j;
}
FamilySpec family_from_json(const nlohmann::json& j) {
    FamilySpec f;
    if (j.at("kind") == "one_param") {
        f.kind = FamilyKind::OneParam;
        f.a_coeffs = j.at("a_coeffs").get<std::vector<std::int64_t>>();
        f.b_coeffs = j.at("b_coeffs").get<std::vector<std::int64_t>>();
    }
    return f;
}
}  // namespace

std::string TraceHistogram::to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["family"] = family_json(family);
    j["total"] = total;
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [t, n] : counts) c[std::to_string(t)] = n;
    j["counts"] = c;
    return j.dump();
}

TraceHistogram TraceHistogram::from_csv(const std::string& text, std::int64_t p, FamilySpec fam) {
    TraceHistogram h;
    h.p = p;
    h.family = std::move(fam);
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        std::int64_t t = std::stoll(line.substr(0, comma));
        std::int64_t c = std::stoll(line.substr(comma + 1));
        h.counts[t] = c;
        h.total += c;
    }
    return h;
}

TraceHistogram TraceHistogram::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    TraceHistogram h;
    h.p = j.at("p").get<std::int64_t>();
    h.family = family_from_json(j.at("family"));
    for (const auto& [key, val] : j.at("counts").items()) h.counts[std::stoll(key)] = val.get<std::int64_t>();
    for (const auto& [t, c] : h.counts) h.total += c;
    if (h.total != j.at("total").get<std::int64_t>()) throw Error("histogram JSON total mismatch");
    return h;
}

}  // namespace satolab::census
