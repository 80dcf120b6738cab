#include "tnsvd/verify.hpp"

#include <cmath>
#include <cstdio>

#include "tnsvd/assembly.hpp"

namespace tnsvd {

const char* status_name(Check::Status s) {
    switch (s) {
        case Check::pass: return "pass";
        case Check::fail: return "FAIL";
        default: return "skip";
    }
}

OpCounts instrumented_deflation(const BidiagonalProduct<XFloat>& P, bool strict) {
    reset_op_counts();
    const auto Q = P.template cast<TrackedX>();
    DeflateOptions d;
    d.strict = strict;
    (void)periodic_deflate(split_at_min(Q), d);
    return op_counts();
}

namespace {

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

}  // namespace

std::vector<Check> verify_chain(const BidiagonalProduct<XFloat>& P, const VerifyOptions& opt) {
    std::vector<Check> out;
    auto add = [&](std::string name, Check::Status st, std::string detail) {
        out.push_back({std::move(name), st, std::move(detail)});
    };

    try {
        P.validate();
        add("nonnegative", Check::pass, std::to_string(P.nontrivial_pairs()) + " pairs");
    } catch (const std::exception& e) {
        add("nonnegative", Check::fail, e.what());
        return out;
    }

    long long widest = 0;
    for (int d : P.dims()) widest = std::max<long long>(widest, d);
    const long long work = widest * widest * (long long)P.factors.size();
    const bool exact_ok = work <= opt.exact_limit;
    const auto Q = P.template cast<Rational>();  // exact: every value is dyadic

    RationalMatrix dense;
    if (exact_ok) dense = chain_dense(Q);
    if (exact_ok && work <= opt.assembly_limit) {
        const auto R = assemble(Q);
        const bool same = expand_dense(R) == dense;
        add("assembly_exact", same ? Check::pass : Check::fail, same ? "BD(A) expands to the chain product" : "mismatch");
    } else {
        add("assembly_exact", Check::skip, "chain above the exact-arithmetic size limit");
    }

    SVDOptions so;
    so.strict = opt.strict;
    SVDResult s;
    try {
        s = svd_product(P, so);
    } catch (const std::exception& e) {
        add("pipeline", Check::fail, e.what());
        return out;
    }

    if (exact_ok) {
        const int small = std::min(dense.rows, dense.cols);
        const int r = small <= 40 ? rank_exact(dense) : rank_modular(dense, 3);
        const bool eq = r == s.rank;
        add("rank", eq ? Check::pass : Check::fail,
            "deflation " + std::to_string(s.rank) + ", exact " + std::to_string(r) +
                (small <= 40 ? " (fraction-free)" : " (modular)"));
    } else {
        add("rank", Check::skip, "chain above the exact-arithmetic size limit");
    }

    const OpCounts c = instrumented_deflation(P, opt.strict);
    add("subtraction_free", c.cancellations == 0 ? Check::pass : Check::fail,
        std::to_string(c.cancellations) + " cancellations in " + std::to_string(c.adds) + " additions");

    if (opt.oracle) {
        if (!exact_ok) {
            add("oracle", Check::skip, "chain above the exact-arithmetic size limit");
        } else {
            OracleOptions oo = opt.oracle_options;
            const auto ref = oracle_svd(dense, oo);
            double worst = 0;
            bool ok = ref.rank == s.rank;
            for (int i = 0; i < std::min<int>(ref.rank, int(s.sigma.size())); ++i)
                worst = std::max(worst, relative_error(s.sigma_full[i], ref.decimal[i]));
            ok = ok && worst <= opt.tolerance;
            add("oracle", ok ? Check::pass : Check::fail, "max relative error " + fmt("%.3e", worst));
        }
    }
    return out;
}

}  // namespace tnsvd
