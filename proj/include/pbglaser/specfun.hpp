#pragma once

#include <cstddef>

namespace pbglaser {

struct SeriesControl {
    double rel_tol = 1e-14;  // stop once next term / partial sum < rel_tol
    std::size_t max_terms = 200000;

    void validate() const;
};

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Kummer's confluent hypergeometric function 1F1(1; b; z) for b > 0, z >= 0,
/// summed from its Taylor series sum_k z^k / (b)_k.
double kummer_1f1_a1(double b, double z, const SeriesControl& ctl = {});

/// Natural logarithm of 1F1(1; b; z). The series is accumulated relative to
/// its largest term, so this stays finite for z far beyond the overflow
/// point of kummer_1f1_a1.
double log_kummer_1f1_a1(double b, double z, const SeriesControl& ctl = {});

}  // namespace pbglaser
