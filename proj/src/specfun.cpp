#include "pbglaser/specfun.hpp"

#include <cmath>
#include <string>

#include "pbglaser/errors.hpp"

namespace pbglaser {

void SeriesControl::validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
    if (max_terms < 1) throw DomainError("max_terms must be >= 1");
}

double ln_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("ln_gamma: x must be > 0");
    // lgamma_r leaves the global signgam untouched, so this stays reentrant.
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

namespace {

struct ScaledSum {
    long double sum;         // series value divided by exp(log_offset)
    long double log_offset;
};

ScaledSum kummer_series(double b, double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!(b > 0.0)) throw DomainError("1F1(1;b;z): b must be > 0");
    if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("1F1(1;b;z): z must be finite and >= 0");
    if (z == 0.0) return {1.0L, 0.0L};

    // Long double keeps e^z representable up to z ~ 1.1e4; beyond that the
    // running sum is rescaled and the scale carried in log_offset.
    constexpr long double kRescaleAbove = 1e4000L;
    const long double zl = z;
    long double term = 1.0L;
    long double sum = 1.0L;
    long double log_offset = 0.0L;

    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        term *= zl / (static_cast<long double>(b) + static_cast<long double>(k));
        sum += term;
        if (term < static_cast<long double>(ctl.rel_tol) * sum) return {sum, log_offset};
        if (sum > kRescaleAbove) {
            sum /= kRescaleAbove;
            term /= kRescaleAbove;
            log_offset += std::log(kRescaleAbove);
        }
    }
    const long double partial = std::exp(std::log(sum) + log_offset);
    throw IterationLimitError("1F1(1;b;z) did not converge within " +
                                  std::to_string(ctl.max_terms) + " terms",
                              static_cast<double>(partial));
}

}  // namespace

double log_kummer_1f1_a1(double b, double z, const SeriesControl& ctl) {
    const ScaledSum s = kummer_series(b, z, ctl);
    return static_cast<double>(std::log(s.sum) + s.log_offset);
}

double kummer_1f1_a1(double b, double z, const SeriesControl& ctl) {
    const ScaledSum s = kummer_series(b, z, ctl);
    if (s.log_offset == 0.0L) return static_cast<double>(s.sum);
    return static_cast<double>(std::exp(std::log(s.sum) + s.log_offset));
}

}  // namespace pbglaser
