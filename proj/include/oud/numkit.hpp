#ifndef OUD_NUMKIT_HPP
#define OUD_NUMKIT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oud/errors.hpp"

// Dense row-major matrix/vector kernel plus a counter-based deterministic RNG.
// Everything is double precision; no BLAS, no SIMD, just enough for the models
// in this project and tight finite-difference checks.

namespace oud {

using Vec = std::vector<double>;

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec values; // row-major, values.size() == rows * cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    std::size_t size() const { return values.size(); }

    std::string shape_str() const;

    static Matrix identity(std::size_t n);
};

// splitmix64: tiny, platform-independent, good enough statistical quality
// for initialization and shuffling.
struct RngState {
    std::uint64_t state = 0;

    RngState() = default;
    explicit RngState(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64();

    // uniform in [0, 1)
    double next_double();

    // uniform integer in [0, n), n > 0
    std::uint64_t next_below(std::uint64_t n);

    // Independent stream for a named purpose. Derivations from one root seed
    // keep e.g. fold assignment stable when another consumer is added.
    RngState fork(std::string_view purpose) const;
};

// FNV-1a, used for stable token hashes and RNG stream derivation.
std::uint64_t hash64(std::string_view s);

Matrix matmul(const Matrix& a, const Matrix& b);

// y = A x  (x.size() == A.cols, y.size() == A.rows); y is overwritten.
void matvec(const Matrix& a, const Vec& x, Vec& y);

// y += A^T x  (x.size() == A.rows, y.size() == A.cols)
void matvec_t_add(const Matrix& a, const Vec& x, Vec& y);

// A += u v^T
void add_outer(Matrix& a, const Vec& u, const Vec& v);

double dot(const Vec& a, const Vec& b);

Vec sigmoid(const Vec& x);
Vec tanh_vec(const Vec& x);

// Softmax over positions where mask is true; masked positions get exactly 0.
// Uses max-subtraction. Throws DataError when no position is valid.
Vec softmax_masked(const Vec& logits, const std::vector<bool>& mask);

// Entries i.i.d. uniform in [lo, hi). Throws ConfigError when lo >= hi.
Matrix rand_uniform(RngState& rng, std::size_t rows, std::size_t cols, double lo, double hi);
Vec rand_uniform_vec(RngState& rng, std::size_t n, double lo, double hi);

} // namespace oud

#endif
