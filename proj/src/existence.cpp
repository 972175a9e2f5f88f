#include "apkit/existence.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace apkit {

namespace {

using BigRational = boost::multiprecision::cpp_rational;

void check_domain(int n, int r) {
    if (r < 1 || n < 1 || r > n) {
        throw std::invalid_argument("need 1 <= r <= n, got n=" + std::to_string(n) +
                                    " r=" + std::to_string(r));
    }
}

BigInt binomial(int n, int k) {
    BigInt value = 1;
    for (int i = 0; i < k; ++i) {
        value = value * (n - i) / (i + 1);  // exact: partial products are binomials
    }
    return value;
}

} // namespace

BigInt degree_bound(int n, int r) {
    check_domain(n, r);
    BigRational product = 1;
    for (int i = 0; i < n - r; ++i) {
        product *= BigRational(binomial(n + i, r), binomial(r + i, r));
    }
    // The product telescopes to an integer; anything else is an arithmetic bug.
    if (boost::multiprecision::denominator(product) != 1) {
        throw std::logic_error("degree bound product left a non-unit denominator");
    }
    return boost::multiprecision::numerator(product);
}

int manifold_dimension(int n, int r) {
    check_domain(n, r);
    return 2 * n * r - r * r;
}

ExistenceReport existence_report(int n, int r, int m) {
    check_domain(n, r);
    if (m < 0 || m > n * n) {
        throw std::invalid_argument("observed count outside [0, n^2]");
    }
    ExistenceReport report;
    report.n = n;
    report.r = r;
    report.m = m;
    report.manifold_dim = manifold_dimension(n, r);
    report.sample_ok = m > report.manifold_dim;
    report.degree_bound = degree_bound(n, r);
    return report;
}

} // namespace apkit
