// Copyright 2026 The qtpe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qtpe/ensemble.hpp"
#include "qtpe/epsgood.hpp"
#include "qtpe/error.hpp"
#include "qtpe/moment.hpp"
#include "qtpe/perm.hpp"
#include "qtpe/zigzag.hpp"

namespace py = pybind11;
using namespace qtpe;

namespace {

py::object to_py(const nlohmann::json &j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null:
            return py::none();
        case nlohmann::json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case nlohmann::json::value_t::number_float:
            return py::float_(j.get<double>());
        case nlohmann::json::value_t::string:
            return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto &v : j) out.append(to_py(v));
            return out;
        }
        default: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = to_py(it.value());
            return out;
        }
    }
}

py::dict validation_dict(const ValidationReport &r) {
    py::dict d;
    d["unitarity_defect"] = r.unitarity_defect;
    d["involution_defect"] = r.involution_defect;
    d["dims_consistent"] = r.dims_consistent;
    d["involution_well_formed"] = r.involution_well_formed;
    d["pass"] = r.pass;
    d["message"] = r.message;
    return d;
}

py::dict goodness_dict(const GoodnessDecision &g) { return to_py(to_json(g)); }

}  // namespace

PYBIND11_MODULE(_qtpe, m) {
    m.doc() = "Quantum tensor product expanders: ensembles, moment operators, zigzag products";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_IOError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<UnitaryEnsemble>(m, "Ensemble")
        .def(py::init<std::vector<CMatrix>, std::optional<std::vector<int>>, std::string>(), py::arg("unitaries"),
             py::arg("involution") = py::none(), py::arg("label") = "")
        .def_property_readonly("dim", &UnitaryEnsemble::dim)
        .def_property_readonly("label", &UnitaryEnsemble::label)
        .def_property_readonly("involution", &UnitaryEnsemble::involution)
        .def_property_readonly("explicitly_hermitian", &UnitaryEnsemble::explicitly_hermitian)
        .def_property_readonly("unitaries", &UnitaryEnsemble::unitaries)
        .def("__len__", &UnitaryEnsemble::size)
        .def("__getitem__",
             [](const UnitaryEnsemble &e, Index i) {
                 if (i < 0) i += e.size();
                 if (i < 0 || i >= e.size()) throw py::index_error("member index out of range");
                 return CMatrix(e[i]);
             })
        .def("with_label", &UnitaryEnsemble::with_label)
        .def("__repr__", [](const UnitaryEnsemble &e) {
            return "<Ensemble '" + e.label() + "' dim=" + std::to_string(e.dim()) +
                   " size=" + std::to_string(e.size()) + ">";
        });

    m.def(
        "sample_random_qtpe",
        [](Index d, Index s, std::uint64_t seed) {
            SeededRng rng(seed);
            return sample_random_qtpe(d, s, rng);
        },
        py::arg("d"), py::arg("s"), py::arg("seed"));
    m.def(
        "haar_unitary",
        [](Index dim, std::uint64_t seed) {
            SeededRng rng(seed);
            return haar_unitary(dim, rng);
        },
        py::arg("dim"), py::arg("seed"));
    m.def(
        "validate", [](const UnitaryEnsemble &e, double tol) { return validation_dict(validate(e, tol)); },
        py::arg("ensemble"), py::arg("tol") = 1e-10);
    m.def("hermitian_double", &hermitian_double);
    m.def("square_compose", &square_compose);
    m.def("tensor_ensemble", &tensor_ensemble);
    m.def("save", &save, py::arg("ensemble"), py::arg("path"));
    m.def("load", &load, py::arg("path"));
    m.def("bit_identical", &bit_identical);

    m.def(
        "lambda_",
        [](const UnitaryEnsemble &e, int t, const std::string &method, double tol, int max_iters, std::uint64_t seed) {
            LambdaOptions opts;
            opts.method = spectral_method_from_string(method);
            opts.tol = tol;
            opts.max_iters = max_iters;
            opts.seed = seed;
            return to_py(to_json(lambda(e, t, opts)));
        },
        py::arg("ensemble"), py::arg("t") = 1, py::arg("method") = "auto", py::arg("tol") = -1.0,
        py::arg("max_iters") = 5000, py::arg("seed") = 0);
    m.def(
        "fixed_space_rank", [](Index n, int t) { return FixedSpaceBasis(n, t).rank(); }, py::arg("n"), py::arg("t"));
    m.def(
        "fixed_space_gram", [](Index n, int t) { return Eigen::MatrixXd(FixedSpaceBasis(n, t).gram()); },
        py::arg("n"), py::arg("t"));
    m.def(
        "moment_dense", [](const UnitaryEnsemble &e, int t) { return MomentOperator(e, t).dense(); },
        py::arg("ensemble"), py::arg("t"));
    m.def("design_error_monomial", &design_error_monomial, py::arg("ensemble"), py::arg("t"), py::arg("k"),
          py::arg("row"), py::arg("col"));
    m.def(
        "subspace_closeness_report",
        [](Index outer, Index inner, int t) { return to_py(to_json(subspace_closeness_report(outer, inner, t))); },
        py::arg("outer_dim"), py::arg("inner_dim"), py::arg("t"));

    m.def("g_dot", &g_dot);
    m.def("zigzag", &zigzag, py::arg("g"), py::arg("h"));
    m.def("zigzag_derandomised", &zigzag_derandomised, py::arg("g"), py::arg("h"));
    m.def("zigzag_generalised", &zigzag_generalised, py::arg("g"), py::arg("h_list"), py::arg("dprime"));
    m.def(
        "bound_zigzag", [](double l1, double l2, int t, double d) { return to_py(to_json(bound_zigzag(l1, l2, t, d))); },
        py::arg("l1"), py::arg("l2"), py::arg("t"), py::arg("d"));
    m.def(
        "bound_zigzag_derandomised",
        [](double l1, double l2, int t, double d) { return to_py(to_json(bound_zigzag_derandomised(l1, l2, t, d))); },
        py::arg("l1"), py::arg("l2"), py::arg("t"), py::arg("d"));
    m.def(
        "bound_genzigzag",
        [](double l1, double l2, int k, int t, double d, double dprime, double eps, double s) {
            GenZigzagBound b = bound_genzigzag(l1, l2, k, t, d, dprime, eps, s);
            py::dict out = to_py(to_json(b.bound));
            out["dprime_threshold"] = b.dprime_threshold;
            out["dprime_sufficient"] = b.dprime_sufficient;
            return out;
        },
        py::arg("l1"), py::arg("l2"), py::arg("k"), py::arg("t"), py::arg("d"), py::arg("dprime"), py::arg("eps"),
        py::arg("s"));

    m.def(
        "is_good_for_vector",
        [](const CMatrix &u, const CVector &x, Index d, Index dprime, double eps) {
            return goodness_dict(is_good_for_vector(u, x, d, dprime, eps));
        },
        py::arg("u"), py::arg("x"), py::arg("d"), py::arg("dprime"), py::arg("eps"));
    m.def(
        "is_good_for_set",
        [](const CMatrix &u, const std::vector<CVector> &xs, Index d, Index dprime, double eps) {
            return goodness_dict(is_good_for_set(u, xs, d, dprime, eps));
        },
        py::arg("u"), py::arg("xs"), py::arg("d"), py::arg("dprime"), py::arg("eps"));
    m.def(
        "is_tuple_good",
        [](const std::vector<CMatrix> &us, Index d, Index dprime, double eps, std::optional<std::uint64_t> budget,
           std::uint64_t seed) {
            TupleMode mode = budget ? TupleMode::sampled(*budget, seed) : TupleMode::exhaustive();
            return to_py(to_json(is_tuple_good(us, d, dprime, eps, mode)));
        },
        py::arg("us"), py::arg("d"), py::arg("dprime"), py::arg("eps"), py::arg("budget") = py::none(),
        py::arg("seed") = 0);
    m.def("epsgood_failure_bound", &epsgood_failure_bound, py::arg("k"), py::arg("s"), py::arg("d"),
          py::arg("dprime"), py::arg("eps"));
    m.def(
        "dprime_threshold", [](double s, double d, int k, double eps) { return dprime_threshold(s, d, k, eps).value; },
        py::arg("s"), py::arg("d"), py::arg("k"), py::arg("eps"));

    m.def("stirling_first", &stirling_first, py::arg("t"), py::arg("k"));
    m.def("falling_factorial", &falling_factorial, py::arg("d"), py::arg("t"));
    m.def("cycle_gram_matrix", &cycle_gram_matrix, py::arg("t"), py::arg("d"));
    m.def("fixed_point_matrix", &fixed_point_matrix, py::arg("t"), py::arg("eps"));
}
