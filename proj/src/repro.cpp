#include "tnsvd/repro.hpp"
#include "tnsvd/io.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tnsvd {

namespace {

using Mat = Eigen::MatrixXd;

Mat expand_term(const Term& t) {
    int rows = 0, cols = 0;
    for (int c : t.row_counts) rows += c;
    for (int c : t.col_counts) cols += c;
    Mat core(t.core.rows, t.core.cols);
    for (int i = 0; i < t.core.rows; ++i)
        for (int j = 0; j < t.core.cols; ++j) core(i, j) = to_double(t.core(i, j));
    Mat out(rows, cols);
    int r = 0;
    for (int i = 0; i < t.core.rows; ++i)
        for (int a = 0; a < t.row_counts[i]; ++a, ++r) {
            int c = 0;
            for (int j = 0; j < t.core.cols; ++j)
                for (int b = 0; b < t.col_counts[j]; ++b, ++c) out(r, c) = core(i, j);
        }
    return out;
}

std::vector<double> svals(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

}  // namespace

std::vector<double> naive_singular_values(const Example& e) {
    if (e.terms.empty()) {
        const auto D = e.dense_exact();
        Mat A(D.rows, D.cols);
        for (int i = 0; i < D.rows; ++i)
            for (int j = 0; j < D.cols; ++j) A(i, j) = to_double(D(i, j));
        return svals(A);
    }
    if (e.naive_cube) {
        auto s = svals(expand_term(e.terms.front()));
        for (auto& x : s) x = x * x * x;
        return s;
    }
    Mat P = expand_term(e.terms.front());
    for (std::size_t k = 1; k < e.terms.size(); ++k) P = P * expand_term(e.terms[k]);
    Mat A(e.rows(), e.cols());
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < e.cols(); ++j) A(i, j) = P(e.keep_rows[i] - 1, e.keep_cols[j] - 1);
    return svals(A);
}

ReproReport reproduce(const Example& e, const ReproOptions& opt) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    ReproReport r;
    r.example = e.id.empty() ? e.name : e.id;
    r.rows = e.rows();
    r.cols = e.cols();
    r.expected_zeros = e.expected_zeros;

    const auto chain = e.chain.template cast<XFloat>();
    SVDOptions so;
    so.strict = opt.strict;
    const auto t1 = clock::now();
    const SVDResult s = svd_product(chain, so);
    r.pipeline_seconds = std::chrono::duration<double>(clock::now() - t1).count();
    r.rank = s.rank;
    r.zeros = std::min(r.rows, r.cols) - s.rank;

    r.reference = oracle_for_example(e, opt.oracle);
    r.oracle_rank = r.reference.rank;
    std::vector<double> naive;
    if (opt.naive) naive = naive_singular_values(e);

    const int n = std::max(r.rank, r.oracle_rank);
    for (int i = 0; i < n; ++i) {
        ReproRow row;
        row.i = i + 1;
        row.sigma_full = i < int(s.sigma_full.size()) ? s.sigma_full[i] : XFloat(0.0);
        row.sigma = to_double(row.sigma_full);
        if (i < r.oracle_rank) {
            const auto& ref = r.reference.decimal[i];
            row.rel_error_alg = relative_error(row.sigma_full, ref);
            row.rel_error_naive = i < int(naive.size()) ? relative_error(naive[i], ref) : NAN;
        } else {
            row.rel_error_alg = row.rel_error_naive = NAN;
        }
        if (!opt.naive) row.rel_error_naive = NAN;
        r.table.push_back(row);
    }
    r.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return r;
}

std::string format_sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15e", x);
    return buf;
}

std::string format_sci(const XFloat& x) {
    const double d = to_double(x);
    if (std::isnormal(d) || x.m == 0) return format_sci(d);
    return format_decimal(x, 16);
}

std::string repro_tsv(const ReproReport& r) {
    std::ostringstream o;
    o << "# " << r.example << " " << r.rows << "x" << r.cols << "\n";
    o << "# zeros " << r.zeros << "\n";
    o << "# rank " << r.rank << " oracle_rank " << r.oracle_rank << "\n";
    o << "i\tsigma\trel_error_alg\trel_error_naive\n";
    for (const auto& row : r.table) {
        char e1[32], e2[32];
        std::snprintf(e1, sizeof e1, "%.4e", row.rel_error_alg);
        std::snprintf(e2, sizeof e2, "%.4e", row.rel_error_naive);
        o << row.i << '\t' << format_sci(row.sigma_full) << '\t' << e1 << '\t' << e2 << "\n";
    }
    return o.str();
}

}  // namespace tnsvd
