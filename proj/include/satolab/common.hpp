#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace satolab {

using cplx = std::complex<double>;

constexpr double PI = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SATOLAB_ERROR(NAME)                    \
    struct NAME : Error {                      \
        using Error::Error;                    \
    }

SATOLAB_ERROR(SingularCurve);
SATOLAB_ERROR(CompositeModulus);
SATOLAB_ERROR(ConstantJInvariant);
SATOLAB_ERROR(ArityMismatch);
SATOLAB_ERROR(MixedPrimes);
SATOLAB_ERROR(ZeroScale);
SATOLAB_ERROR(TruncationBudgetExceeded);
SATOLAB_ERROR(DimensionMismatch);
SATOLAB_ERROR(DegreeBoxMismatch);
SATOLAB_ERROR(DimensionTooLarge);
SATOLAB_ERROR(CertificateViolation);
SATOLAB_ERROR(InfiniteLevelSet);
SATOLAB_ERROR(InfeasibleTarget);
SATOLAB_ERROR(OddWeight);
SATOLAB_ERROR(WeightTooSmall);
SATOLAB_ERROR(RootOutOfRange);
SATOLAB_ERROR(EmptySpace);
SATOLAB_ERROR(ArityError);
SATOLAB_ERROR(UsageError);

#undef SATOLAB_ERROR

// Parse failure with the byte offset of the offending character.
struct SyntaxError : Error {
    std::size_t offset;
    SyntaxError(const std::string& msg, std::size_t off)
        : Error(msg + " (byte " + std::to_string(off) + ")"), offset(off) {}
};

// ---------------------------------------------------------------------------
// Numeric helpers
// ---------------------------------------------------------------------------

inline double e_re(double x) { return std::cos(2.0 * PI * x); }
inline double e_im(double x) { return std::sin(2.0 * PI * x); }
inline cplx e_of(double x) { return {e_re(x), e_im(x)}; }

// Compensated accumulator; keeps long sums of doubles honest.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, b, m);
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::int64_t isqrt_i64(std::int64_t n) {
    if (n <= 0) return 0;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// ---------------------------------------------------------------------------
// Deterministic parallelism
// ---------------------------------------------------------------------------
//
// Work is cut into fixed-size blocks that do not depend on the worker count,
// each block is processed sequentially, and per-block results are combined in
// block order.  Output is therefore identical for any number of workers.

inline void parallel_blocks(std::int64_t n_items, std::int64_t block_size, int workers,
                            const std::function<void(std::int64_t block_index, std::int64_t begin, std::int64_t end)>& body) {
    if (n_items <= 0) return;
    if (block_size <= 0) block_size = 1;
    std::int64_t n_blocks = (n_items + block_size - 1) / block_size;
    if (workers < 1) workers = 1;
    if (workers == 1 || n_blocks == 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b)
            body(b, b * block_size, std::min(n_items, (b + 1) * block_size));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::int64_t b = w; b < n_blocks; b += workers)
                body(b, b * block_size, std::min(n_items, (b + 1) * block_size));
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace satolab
