#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace apkit {

using BigInt = boost::multiprecision::cpp_int;

// Exact value of prod_{i=0}^{n-r-1} C(n+i, r) / C(r+i, r), an upper bound on
// the number of rank-r matrices matching a generic set of observed entries.
// Evaluated in exact rational arithmetic; the product is always an integer
// and a unit denominator is asserted. r = n gives the empty product 1.
BigInt degree_bound(int n, int r);

// Dimension 2nr - r^2 of the rank-r manifold inside n x n matrices.
int manifold_dimension(int n, int r);

struct ExistenceReport {
    int n = 0;
    int r = 0;
    int m = 0;
    int manifold_dim = 0;
    bool sample_ok = false;  // m > manifold_dim, the sampling regime the
                             // finiteness theory assumes
    BigInt degree_bound;
};

ExistenceReport existence_report(int n, int r, int m);

} // namespace apkit
