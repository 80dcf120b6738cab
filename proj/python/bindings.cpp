#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tnsvd/io.hpp"
#include "tnsvd/repro.hpp"
#include "tnsvd/verify.hpp"

namespace py = pybind11;
using namespace tnsvd;

namespace {

using Chain = BidiagonalProduct<XFloat>;

py::array_t<double> to_numpy(const Dense<double>& M) {
    py::array_t<double> a({M.rows, M.cols});
    auto w = a.mutable_unchecked<2>();
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) w(i, j) = M(i, j);
    return a;
}

std::vector<Rational> rationals(const std::vector<std::string>& v) {
    std::vector<Rational> out;
    for (const auto& s : v) out.push_back(parse_rational(s));
    return out;
}

Chain generate(const std::string& family, const std::vector<std::string>& x, const std::vector<std::string>& y,
               int cols, int l, std::vector<int> row_counts, std::vector<int> col_counts) {
    NodeSpec s;
    s.family = parse_family(family);
    s.x_nodes = rationals(x);
    s.y_nodes = rationals(y);
    s.cols = cols;
    s.l = l;
    if (row_counts.empty()) row_counts.assign(s.x_nodes.size(), 1);
    if (col_counts.empty()) col_counts.assign(std::max(s.distinct_cols(), 0), 1);
    s.row_counts = std::move(row_counts);
    s.col_counts = std::move(col_counts);
    s.validate();
    return expand_repeated(s).cast<XFloat>();
}

Chain chain_from_arrays(const py::array_t<double, py::array::c_style | py::array::forcecast>& bar,
                        const py::array_t<double, py::array::c_style | py::array::forcecast>& off) {
    if (bar.ndim() != 2 || off.ndim() != 2 || bar.shape(0) != off.shape(0) || bar.shape(1) != off.shape(1))
        throw std::invalid_argument("bar and off must be matrices of the same shape");
    const int n = int(off.shape(0)), m = int(off.shape(1));
    Repr<XFloat> R(n, m);
    auto b = bar.unchecked<2>();
    auto o = off.unchecked<2>();
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j) {
            R.bar(i, j) = XFloat(b(i - 1, j - 1));
            R.off(i, j) = XFloat(o(i - 1, j - 1));
        }
    check_nonneg(R);
    return repr_to_product(R);
}

py::dict svd(const Chain& P, bool vectors, bool strict) {
    SVDOptions o;
    o.want_vectors = vectors;
    o.strict = strict;
    const auto r = svd_product(P, o);
    py::dict d;
    d["sigma"] = py::array_t<double>(py::ssize_t(r.sigma.size()), r.sigma.data());
    std::vector<std::string> text;
    for (const auto& x : r.sigma_full) text.push_back(format_sci(x));
    d["sigma_text"] = text;  // exact exponents where double would flush to 0
    d["rank"] = r.rank;
    d["shape"] = py::make_tuple(r.rows, r.cols);
    d["zero_pivots"] = r.zero_pivots;
    if (vectors) {
        d["u"] = to_numpy(*r.u);
        d["v"] = to_numpy(*r.v);
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_tnsvd, m) {
    m.doc() = "Accurate SVD of products of totally nonnegative bidiagonal factors";

    py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
    py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
    py::register_exception<generation_error>(m, "GenerationError", PyExc_ValueError);
    py::register_exception<strict_mode_error>(m, "StrictModeError", PyExc_RuntimeError);
    py::register_exception<oracle_error>(m, "OracleError", PyExc_RuntimeError);

    py::class_<Chain>(m, "Chain")
        .def_static("from_bdp", [](const std::string& s) { return bdp_from_string(s).chain; }, py::arg("text"))
        .def_static("load", [](const std::string& p) { return load_bdp(p).chain; }, py::arg("path"))
        .def_static("from_arrays", &chain_from_arrays, py::arg("bar"), py::arg("off"),
                    "chain of a single matrix given by its bidiagonal decomposition")
        .def("to_bdp", [](const Chain& P, const std::string& gen) { return to_bdp(P, gen); }, py::arg("gen") = "")
        .def_property_readonly("shape", [](const Chain& P) { return py::make_tuple(P.rows(), P.cols()); })
        .def_property_readonly("num_factors", [](const Chain& P) { return P.factors.size(); })
        .def("dense", [](const Chain& P) {
            const auto A = chain_dense(P.cast<Rational>());
            Dense<double> D(A.rows, A.cols);
            for (int i = 0; i < A.rows; ++i)
                for (int j = 0; j < A.cols; ++j) D(i, j) = round_to_double(A(i, j));
            return to_numpy(D);
        }, "the product rounded once from exact arithmetic")
        .def("__repr__", [](const Chain& P) {
            std::ostringstream os;
            os << "<tnsvd.Chain " << P.rows() << "x" << P.cols() << ", " << P.factors.size() << " factors>";
            return os.str();
        });

    m.def("generate", &generate, py::arg("family"), py::arg("x"), py::arg("y") = std::vector<std::string>{},
          py::arg("cols") = 0, py::arg("l") = 0, py::arg("row_counts") = std::vector<int>{},
          py::arg("col_counts") = std::vector<int>{});
    m.def("example", [](const std::string& name, std::uint64_t seed) {
        return make_example(name, seed).chain.cast<XFloat>();
    }, py::arg("name"), py::arg("seed") = 7);
    m.def("svd", &svd, py::arg("chain"), py::arg("vectors") = false, py::arg("strict") = false);

    m.def("oracle", [](const Chain& P, int digits) {
        OracleOptions o;
        o.digits = digits;
        const auto r = oracle_svd(chain_dense(P.cast<Rational>()), o);
        return r.decimal;
    }, py::arg("chain"), py::arg("digits") = 30, "reference singular values as 40-digit decimal strings");

    m.def("reproduce", [](const std::string& name, std::uint64_t seed, bool naive) {
        ReproOptions o;
        o.naive = naive;
        const auto r = reproduce(make_example(name, seed), o);
        py::list rows;
        for (const auto& t : r.table)
            rows.append(py::make_tuple(t.i, t.sigma, t.rel_error_alg, t.rel_error_naive));
        py::dict d;
        d["rank"] = r.rank;
        d["zeros"] = r.zeros;
        d["oracle_rank"] = r.oracle_rank;
        d["table"] = rows;
        d["reference"] = r.reference.decimal;
        return d;
    }, py::arg("name"), py::arg("seed") = 7, py::arg("naive") = true);

    m.def("verify", [](const Chain& P, bool oracle) {
        VerifyOptions o;
        o.oracle = oracle;
        py::list out;
        for (const auto& c : verify_chain(P, o)) out.append(py::make_tuple(c.name, status_name(c.status), c.detail));
        return out;
    }, py::arg("chain"), py::arg("oracle") = false);

    m.def("format_hex", [](double x) { return format_hex(XFloat(x)); });
}
