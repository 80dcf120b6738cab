#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tnsvd/generators.hpp"

namespace tnsvd {

struct oracle_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RationalMatrix dense_product_exact(const BidiagonalProduct<Rational>& P);

// Fraction-free (Bareiss) elimination with full pivoting on the integer
// row-scaled matrix.
int rank_exact(const RationalMatrix& A);

// Rank over Z/p for several 62-bit primes, maximum taken. A lower bound on
// the rational rank that is attained unless every prime divides all maximal
// nonzero minors.
int rank_modular(const RationalMatrix& A, int primes = 3);

struct ReferenceSVD {
    int rank = 0;
    int precision_bits = 0;
    int confirm_bits = 0;                // 0 when no confirmation pass ran
    std::vector<std::string> decimal;    // 40 significant digits, descending
    std::vector<double> sigma;           // rounded to nearest
};

// QR with column pivoting truncated at `rank` (the trailing block must be at
// rounding level), then one-sided Jacobi, all at `precision_bits`.
ReferenceSVD reference_singular_values(const RationalMatrix& A, int rank, int precision_bits = 256);

struct OracleOptions {
    int min_bits = 256;
    int digits = 30;                   // significant digits the confirmation must reproduce
    bool confirm = true;               // rerun at doubled precision and compare
    bool exact_rank = false;           // Bareiss instead of the modular rank
    int rank = -1;                     // known rank, skips the rank computation
    std::string cache_key;             // empty: hash of the matrix
};

// Adaptive precision: raised until it covers the singular value range plus
// the requested digits, then confirmed at twice the precision.
ReferenceSVD oracle_svd(const RationalMatrix& A, const OracleOptions& opt = {});

// oracle_svd with the on-disk cache in $TNSVD_ORACLE_CACHE (no caching when unset).
// The dense matrix is only built on a cache miss.
ReferenceSVD cached_oracle(const std::string& key, const std::function<RationalMatrix()>& dense,
                           const OracleOptions& opt = {});
ReferenceSVD oracle_for_example(const Example& e, const OracleOptions& opt = {});

std::string matrix_fingerprint(const RationalMatrix& A);

// |approx - ref| / ref with ref given as a decimal string, evaluated in 256-bit arithmetic
double relative_error(double approx, const std::string& reference);
double relative_error(const XFloat& approx, const std::string& reference);

}  // namespace tnsvd
