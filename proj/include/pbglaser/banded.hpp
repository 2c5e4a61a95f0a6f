// banded.hpp: general banded matrix with an LU factorization using partial
// (row) pivoting. Storage follows the LAPACK band layout so that the fill-in
// produced by row interchanges fits in place.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pbglaser {

class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }

    /// True if (i, j) lies inside the declared band.
    bool in_band(std::size_t i, std::size_t j) const {
        return i <= j + kl_ && j <= i + ku_;
    }

    double get(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double v);
    void add(std::size_t i, std::size_t j, double v);

    /// Zero the band part of row i.
    void clear_row(std::size_t i);

    /// y = A x.
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// Sum of |a_ij| over row i.
    double row_norm(std::size_t i) const;

private:
    friend class BandedLU;

    double& at(std::size_t i, std::size_t j) { return ab_[kl_ + ku_ + i - j + j * ld_]; }
    double at(std::size_t i, std::size_t j) const { return ab_[kl_ + ku_ + i - j + j * ld_]; }

    std::size_t n_, kl_, ku_, ld_;
    std::vector<double> ab_;
};

/// In-place LU factorization P A = L U of a banded matrix.
class BandedLU {
public:
    /// Throws SingularSystemError on an exactly zero pivot.
    explicit BandedLU(BandedMatrix a);

    /// Solves A x = b, overwriting b with x.
    void solve(std::span<double> b) const;

private:
    BandedMatrix lu_;
    std::vector<std::size_t> pivots_;
};

}  // namespace pbglaser
