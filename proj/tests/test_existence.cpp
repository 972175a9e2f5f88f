#include "apkit/existence.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

using namespace apkit;

namespace {

// Independent binomials from Pascal's triangle, no division anywhere.
std::vector<std::vector<BigInt>> pascal(int max_n) {
    std::vector<std::vector<BigInt>> C(static_cast<std::size_t>(max_n) + 1);
    for (int i = 0; i <= max_n; ++i) {
        C[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i) + 1, BigInt(1));
        for (int j = 1; j < i; ++j)
            C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                C[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
                C[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
    }
    return C;
}

// Oracle for the count bound: numerator and denominator accumulated as exact
// integers, with a final exact division that must leave no remainder.
BigInt degree_oracle(int n, int r) {
    auto C = pascal(2 * n);
    BigInt num = 1, den = 1;
    for (int i = 0; i <= n - r - 1; ++i) {
        num *= C[static_cast<std::size_t>(n + i)][static_cast<std::size_t>(r)];
        den *= C[static_cast<std::size_t>(r + i)][static_cast<std::size_t>(r)];
    }
    BigInt q = num / den;
    REQUIRE(q * den == num);  // the bound is an integer
    return q;
}

}  // namespace

TEST_CASE("degree_bound reproduces the classical small determinantal degrees") {
    CHECK(degree_bound(1, 1) == 1);
    CHECK(degree_bound(2, 1) == 2);
    CHECK(degree_bound(3, 1) == 6);   // Segre threefold in P^8
    CHECK(degree_bound(3, 2) == 3);   // the 3x3 determinant hypersurface
    CHECK(degree_bound(4, 2) == 20);
    CHECK(degree_bound(4, 3) == 4);   // determinant hypersurface again
    for (int n = 1; n <= 10; ++n) CHECK(degree_bound(n, n) == 1);
}

TEST_CASE("degree_bound matches the Pascal-triangle oracle up to n = 10") {
    for (int n = 1; n <= 10; ++n)
        for (int r = 1; r <= n; ++r) CHECK(degree_bound(n, r) == degree_oracle(n, r));
}

TEST_CASE("degree_bound grows without overflow at two-digit sizes") {
    BigInt big = degree_bound(12, 2);
    CHECK(big == degree_oracle(12, 2));
    CHECK(big > BigInt(1000000));
    CHECK(degree_bound(12, 1) > 0);
}

TEST_CASE("degree_bound validates its arguments") {
    CHECK_THROWS_AS(degree_bound(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(degree_bound(3, 0), std::invalid_argument);
    CHECK_THROWS_AS(degree_bound(3, 4), std::invalid_argument);
}

TEST_CASE("manifold_dimension computes 2nr - r^2") {
    CHECK(manifold_dimension(15, 2) == 56);
    CHECK(manifold_dimension(100, 2) == 396);
    CHECK(manifold_dimension(2, 1) == 3);
    CHECK(manifold_dimension(7, 7) == 49);  // the full matrix space
    CHECK_THROWS_AS(manifold_dimension(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(manifold_dimension(0, 0), std::invalid_argument);
}

TEST_CASE("existence_report assembles the sampling diagnosis") {
    ExistenceReport report = existence_report(15, 2, 162);
    CHECK(report.n == 15);
    CHECK(report.r == 2);
    CHECK(report.m == 162);
    CHECK(report.manifold_dim == 56);
    CHECK(report.sample_ok);  // 162 > 56
    CHECK(report.degree_bound == degree_oracle(15, 2));

    ExistenceReport tight = existence_report(15, 2, 56);
    CHECK_FALSE(tight.sample_ok);  // not strictly above the dimension

    CHECK_THROWS_AS(existence_report(4, 2, 17), std::invalid_argument);
    CHECK_THROWS_AS(existence_report(4, 2, -1), std::invalid_argument);
}
