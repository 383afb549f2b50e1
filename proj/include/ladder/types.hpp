#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ladder {

// Vertex of the ladder graph Z x {0,1}. y = 0 is the bottom line.
struct Vertex {
    int64_t x = 0;
    int y = 0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

// The three edges introduced at column i, packed into the low bits of a byte:
//   bit 0 (h0): horizontal <(i-1,0),(i,0)>
//   bit 1 (h1): horizontal <(i-1,1),(i,1)>
//   bit 2 (v):  vertical   <(i,0),(i,1)>
// This (h0,h1,v) little-endian order is also the on-disk layout.
using Slab = uint8_t;

inline constexpr Slab kSlabH0 = 1;
inline constexpr Slab kSlabH1 = 2;
inline constexpr Slab kSlabV = 4;
inline constexpr int kSlabPatterns = 8;

inline constexpr bool slab_h0(Slab s) { return s & kSlabH0; }
inline constexpr bool slab_h1(Slab s) { return s & kSlabH1; }
inline constexpr bool slab_v(Slab s) { return s & kSlabV; }
inline constexpr int slab_open_count(Slab s) {
    return static_cast<int>(slab_h0(s)) + static_cast<int>(slab_h1(s)) + static_cast<int>(slab_v(s));
}

// Which of the two vertices at a column are backwards communicating,
// encoded as (bottom << 1) | top. The all-dead code 0 is absorbing and
// never appears in conditioned configurations.
enum class TState : uint8_t {
    dead = 0,         // neither
    top_only = 1,     // (i,1) only
    bottom_only = 2,  // (i,0) only
    both = 3,
};

inline constexpr bool tstate_bottom(TState t) { return static_cast<uint8_t>(t) & 2; }
inline constexpr bool tstate_top(TState t) { return static_cast<uint8_t>(t) & 1; }

// Deterministic compatibility update: the t-state at column i as a function
// of the t-state at i-1 and the slab at i. May return TState::dead.
inline constexpr TState slab_update(TState ab, Slab eta) {
    const bool a = tstate_bottom(ab);
    const bool b = tstate_top(ab);
    const bool h0 = slab_h0(eta), h1 = slab_h1(eta), v = slab_v(eta);
    const bool na = (h0 && a) || (v && h1 && b);
    const bool nb = (h1 && b) || (v && h0 && a);
    return static_cast<TState>((static_cast<uint8_t>(na) << 1) | static_cast<uint8_t>(nb));
}

// Critical bias. Written with the conjugate so it stays stable as p -> 1,
// where the naive denominator cancels to zero.
inline double compute_lambda_c(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("compute_lambda_c: p must be in (0,1)");
    const double u = 1.0 + 2.0 * p - 2.0 * p * p;
    const double s = std::sqrt(1.0 + 4.0 * p * p * (1.0 - p) * (1.0 - p));
    // 2 / (u - s) == (u + s) / (2 p (1-p))
    return 0.5 * std::log((u + s) / (2.0 * p * (1.0 - p)));
}

struct ModelParams {
    double p = 0.5;
    double lambda = 0.0;
    double lambda_c = 0.0;

    ModelParams() = default;
    ModelParams(double p_, double lambda_) : p(p_), lambda(lambda_), lambda_c(compute_lambda_c(p_)) {
        if (lambda < 0.0) throw std::domain_error("ModelParams: lambda must be >= 0");
    }
};

} // namespace ladder
