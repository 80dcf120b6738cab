#pragma once

#include <string>
#include <vector>

#include "tnsvd/bsvd.hpp"
#include "tnsvd/oracle.hpp"

namespace tnsvd {

struct Check {
    enum Status { pass, fail, skip };
    std::string name;
    Status status = skip;
    std::string detail;
};

struct VerifyOptions {
    // exact checks run while (widest dimension)^2 * factors stays below these;
    // rational assembly grows much faster than the exact dense product
    long long exact_limit = 4'000'000;
    long long assembly_limit = 200'000;
    bool oracle = false;
    double tolerance = 1e-12;
    OracleOptions oracle_options;
    bool strict = false;
};

// Operation counts of the accurate part of the pipeline (representation
// through deflation) on the instrumented scalar.
OpCounts instrumented_deflation(const BidiagonalProduct<XFloat>& P, bool strict = false);

// Rational property suite for one chain: nonnegativity, exact assembly,
// rank agreement with exact arithmetic, subtraction-freeness and
// (optionally) agreement with the oracle.
std::vector<Check> verify_chain(const BidiagonalProduct<XFloat>& P, const VerifyOptions& opt = {});

const char* status_name(Check::Status s);

}  // namespace tnsvd
