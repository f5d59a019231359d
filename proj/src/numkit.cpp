#include "oud/numkit.hpp"

#include <cmath>
#include <limits>

namespace oud {

std::string Matrix::shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

std::uint64_t RngState::next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double RngState::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngState::next_below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

RngState RngState::fork(std::string_view purpose) const {
    RngState child(state ^ hash64(purpose));
    child.next_u64(); // decorrelate from the raw xor
    return child;
}

std::uint64_t hash64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul: incompatible shapes " + a.shape_str() + " and " + b.shape_str());
    }
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.values[i * a.cols + k];
            if (aik == 0.0) continue;
            const double* brow = &b.values[k * b.cols];
            double* orow = &out.values[i * out.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

void matvec(const Matrix& a, const Vec& x, Vec& y) {
    if (x.size() != a.cols || y.size() != a.rows) {
        throw ShapeError("matvec: matrix " + a.shape_str() + " with x[" + std::to_string(x.size()) +
                         "], y[" + std::to_string(y.size()) + "]");
    }
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = &a.values[i * a.cols];
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_t_add(const Matrix& a, const Vec& x, Vec& y) {
    if (x.size() != a.rows || y.size() != a.cols) {
        throw ShapeError("matvec_t_add: matrix " + a.shape_str() + " with x[" + std::to_string(x.size()) +
                         "], y[" + std::to_string(y.size()) + "]");
    }
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = &a.values[i * a.cols];
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols; ++j) y[j] += row[j] * xi;
    }
}

void add_outer(Matrix& a, const Vec& u, const Vec& v) {
    if (u.size() != a.rows || v.size() != a.cols) {
        throw ShapeError("add_outer: matrix " + a.shape_str() + " with u[" + std::to_string(u.size()) +
                         "], v[" + std::to_string(v.size()) + "]");
    }
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* row = &a.values[i * a.cols];
        const double ui = u[i];
        for (std::size_t j = 0; j < a.cols; ++j) row[j] += ui * v[j];
    }
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot: length mismatch " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Vec sigmoid(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
    return out;
}

Vec tanh_vec(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
    return out;
}

Vec softmax_masked(const Vec& logits, const std::vector<bool>& mask) {
    if (logits.size() != mask.size()) {
        throw ShapeError("softmax_masked: logits[" + std::to_string(logits.size()) + "] vs mask[" +
                         std::to_string(mask.size()) + "]");
    }
    double maxv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i] && logits[i] > maxv) maxv = logits[i];
    }
    if (maxv == -std::numeric_limits<double>::infinity()) {
        throw DataError("softmax_masked: empty sequence (no valid position)");
    }
    Vec out(logits.size(), 0.0);
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) continue;
        out[i] = std::exp(logits[i] - maxv);
        denom += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) out[i] /= denom;
    }
    return out;
}

Matrix rand_uniform(RngState& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    if (!(lo < hi)) {
        throw ConfigError("rand_uniform: lo must be < hi (got lo=" + std::to_string(lo) +
                          ", hi=" + std::to_string(hi) + ")");
    }
    Matrix out(rows, cols);
    for (auto& v : out.values) v = lo + (hi - lo) * rng.next_double();
    return out;
}

Vec rand_uniform_vec(RngState& rng, std::size_t n, double lo, double hi) {
    if (!(lo < hi)) {
        throw ConfigError("rand_uniform_vec: lo must be < hi (got lo=" + std::to_string(lo) +
                          ", hi=" + std::to_string(hi) + ")");
    }
    Vec out(n);
    for (auto& v : out) v = lo + (hi - lo) * rng.next_double();
    return out;
}

} // namespace oud
