#include "pbglaser/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pbglaser/errors.hpp"

namespace pbglaser {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(ld_ * n, 0.0) {
    if (n == 0) throw DomainError("banded matrix must be non-empty");
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? at(i, j) : 0.0;
}

void BandedMatrix::set(std::size_t i, std::size_t j, double v) {
    if (!in_band(i, j)) throw DomainError("banded matrix: entry outside band");
    at(i, j) = v;
}

void BandedMatrix::add(std::size_t i, std::size_t j, double v) {
    if (!in_band(i, j)) throw DomainError("banded matrix: entry outside band");
    at(i, j) += v;
}

void BandedMatrix::clear_row(std::size_t i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    for (std::size_t j = j0; j <= j1; ++j) at(i, j) = 0.0;
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i > kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
}

double BandedMatrix::row_norm(std::size_t i) const {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += std::abs(at(i, j));
    return s;
}

BandedLU::BandedLU(BandedMatrix a) : lu_(std::move(a)), pivots_(lu_.n_) {
    const std::size_t n = lu_.n_;
    const std::size_t kl = lu_.kl_;
    // Row interchanges can move entries up to kl rows above their band, into
    // the extra storage rows, which start zeroed.
    std::size_t ju = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t km = std::min(kl, n - 1 - j);

        std::size_t p = 0;
        double best = std::abs(lu_.at(j, j));
        for (std::size_t r = 1; r <= km; ++r) {
            const double v = std::abs(lu_.at(j + r, j));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        pivots_[j] = j + p;
        if (best == 0.0) {
            throw SingularSystemError("banded LU: zero pivot in column " + std::to_string(j));
        }

        ju = std::max(ju, std::min(j + lu_.ku_ + p, n - 1));
        if (p != 0) {
            for (std::size_t c = j; c <= ju; ++c) std::swap(lu_.at(j, c), lu_.at(j + p, c));
        }
        const double inv = 1.0 / lu_.at(j, j);
        for (std::size_t r = 1; r <= km; ++r) lu_.at(j + r, j) *= inv;
        for (std::size_t c = j + 1; c <= ju; ++c) {
            const double u = lu_.at(j, c);
            if (u == 0.0) continue;
            for (std::size_t r = 1; r <= km; ++r) lu_.at(j + r, c) -= lu_.at(j + r, j) * u;
        }
    }
}

void BandedLU::solve(std::span<double> b) const {
    const std::size_t n = lu_.n_;
    const std::size_t kl = lu_.kl_;
    const std::size_t kv = lu_.kl_ + lu_.ku_;
    if (b.size() != n) throw DomainError("banded solve: size mismatch");

    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t p = pivots_[j];
        if (p != j) std::swap(b[j], b[p]);
        const std::size_t km = std::min(kl, n - 1 - j);
        const double bj = b[j];
        if (bj == 0.0) continue;
        for (std::size_t r = 1; r <= km; ++r) b[j + r] -= lu_.at(j + r, j) * bj;
    }
    for (std::size_t jj = n; jj-- > 0;) {
        b[jj] /= lu_.at(jj, jj);
        const double bj = b[jj];
        if (bj == 0.0) continue;
        const std::size_t i0 = jj > kv ? jj - kv : 0;
        for (std::size_t i = i0; i < jj; ++i) b[i] -= lu_.at(i, jj) * bj;
    }
}

}  // namespace pbglaser
