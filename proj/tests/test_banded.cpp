#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pbglaser/banded.hpp"
#include "pbglaser/errors.hpp"

using namespace pbglaser;

TEST_CASE("banded LU agrees with dense partial-pivot LU") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    for (auto [n, kl, ku] : {std::tuple{1, 0, 0}, {7, 2, 1}, {40, 6, 4}, {123, 3, 5}, {64, 0, 3}}) {
        BandedMatrix a(n, kl, ku);
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
                // weak diagonal forces row interchanges (pointless without subdiagonals)
                const double v = nd(rng) * (i == j && kl > 0 ? 0.05 : 1.0);
                a.set(i, j, v);
                d(i, j) = v;
            }
        Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return nd(rng); });
        std::vector<double> x(b.data(), b.data() + n);
        BandedLU(a).solve(x);
        const Eigen::VectorXd ref = d.partialPivLu().solve(b);
        for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-9));

        // backward error, insensitive to the conditioning of the random matrix
        std::vector<double> y(n);
        a.multiply(x, y);
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n), yv(y.data(), n);
        CHECK((yv - b).norm() <= 1e-13 * d.norm() * xv.norm());
    }
}

TEST_CASE("zero pivot is reported") {
    BandedMatrix a(3, 1, 1);
    a.set(0, 0, 1.0);
    a.set(1, 0, 1.0);
    a.set(2, 2, 1.0);
    CHECK_THROWS_AS(BandedLU{a}, SingularSystemError);
}

TEST_CASE("band bounds") {
    BandedMatrix a(5, 1, 2);
    CHECK(a.in_band(3, 2));
    CHECK(a.in_band(1, 3));
    CHECK_FALSE(a.in_band(3, 1));
    CHECK_FALSE(a.in_band(0, 3));
    CHECK_THROWS_AS(a.set(4, 0, 1.0), DomainError);
    CHECK(a.get(4, 0) == 0.0);
    a.set(2, 3, -2.0);
    a.add(2, 3, 0.5);
    CHECK(a.get(2, 3) == -1.5);
    a.set(2, 1, 4.0);
    CHECK(a.row_norm(2) == 5.5);
    a.clear_row(2);
    CHECK(a.row_norm(2) == 0.0);
    CHECK_THROWS_AS(BandedMatrix(0, 1, 1), DomainError);
}

TEST_CASE("solve rejects a size mismatch") {
    BandedMatrix a(2, 0, 0);
    a.set(0, 0, 1.0);
    a.set(1, 1, 2.0);
    BandedLU lu(a);
    std::vector<double> x(3, 1.0);
    CHECK_THROWS_AS(lu.solve(x), DomainError);
}
