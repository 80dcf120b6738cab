#pragma once

#include <string>
#include <vector>

#include "tnsvd/bsvd.hpp"
#include "tnsvd/generators.hpp"
#include "tnsvd/oracle.hpp"

namespace tnsvd {

struct ReproRow {
    int i = 0;
    double sigma = 0;
    XFloat sigma_full;  // not limited to the double range
    double rel_error_alg = 0;
    double rel_error_naive = 0;
};

struct ReproReport {
    std::string example;
    int rows = 0, cols = 0;
    int rank = 0;             // from deflation
    int zeros = 0;            // min(rows, cols) - rank
    int expected_zeros = -1;
    int oracle_rank = 0;
    double pipeline_seconds = 0;
    double total_seconds = 0;
    std::vector<ReproRow> table;
    ReferenceSVD reference;
};

struct ReproOptions {
    bool strict = false;
    bool naive = true;
    OracleOptions oracle;
};

// Singular values of the explicitly formed double-precision product.
std::vector<double> naive_singular_values(const Example& e);

// Accurate pipeline on the once-rounded chain, compared with the oracle.
ReproReport reproduce(const Example& e, const ReproOptions& opt = {});

std::string format_sci(double x);  // 16 significant digits
std::string format_sci(const XFloat& x);
std::string repro_tsv(const ReproReport& r);

}  // namespace tnsvd
