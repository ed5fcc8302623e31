#include "kzp/cartier.hpp"
#include "kzp/json_io.hpp"
#include "kzp/kzcore.hpp"
#include "kzp/leading.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kzp;

namespace {

Limits make_limits(u64 max_terms, int jobs)
{
    Limits lim;
    if (max_terms) lim.max_terms = max_terms;
    lim.jobs = jobs;
    return lim;
}

py::dict pair_dict(const PrimePair& pr)
{
    py::dict d;
    d["p"] = pr.p;
    d["q"] = pr.q;
    d["k"] = pr.k;
    d["type"] = pr.pair_type;
    d["M"] = pr.M;
    d["c"] = pr.c;
    return d;
}

} // namespace

PYBIND11_MODULE(_kzmodp, m)
{
    m.doc() = "exact constructor and verifier for sl2 KZ solutions over F_p";

    m.def("classify_pair", [](u64 p, u64 q) { return pair_dict(classify_pair(p, q)); },
          py::arg("p"), py::arg("q"),
          "Classify a prime pair and derive k, type, M, c.");

    m.def("binom_mod_p", &binom_mod_p, py::arg("a"), py::arg("b"), py::arg("p"));

    m.def("singular_dimension", &singular_dimension, py::arg("n"), py::arg("r"), py::arg("p"),
          "Exact F_p dimension of the singular-vector solution space.");

    m.def("construct_solution_json",
          [](u64 p, u64 q, int g, int r, std::vector<int> l, u64 max_terms, int jobs) {
              PrimePair pr = classify_pair(p, q);
              ModelParams prm = params_from_g(pr, g, r);
              SolutionIndex L(std::move(l));
              VectorPoly v = construct_solution(pr, prm, L, make_limits(max_terms, jobs));
              return dump_canonical(solution_to_json(pr, prm, L, v));
          },
          py::arg("p"), py::arg("q"), py::arg("g"), py::arg("r"), py::arg("l"),
          py::arg("max_terms") = 0, py::arg("jobs") = 0,
          "Construct a solution and return its canonical JSON document.");

    m.def("solution_checks",
          [](u64 p, u64 q, int g, int r, std::vector<int> l, u64 max_terms, int jobs) {
              PrimePair pr = classify_pair(p, q);
              ModelParams prm = params_from_g(pr, g, r);
              SolutionStore s(pr, prm, SolutionIndex(std::move(l)), make_limits(max_terms, jobs));
              py::dict d;
              d["zero"] = s.is_zero();
              d["singular"] = check_singular(s);
              d["kz"] = check_kz(s);
              d["degree"] = s.degree();
              return d;
          },
          py::arg("p"), py::arg("q"), py::arg("g"), py::arg("r"), py::arg("l"),
          py::arg("max_terms") = 0, py::arg("jobs") = 0,
          "Construct a solution and run the singular/KZ checks on it.");

    m.def("certify_rank",
          [](u64 p, u64 q, int g, int r, u64 max_terms, int jobs) {
              PrimePair pr = classify_pair(p, q);
              ModelParams prm = params_from_g(pr, g, r);
              RankCertificate cert = certify_rank(pr, prm, make_limits(max_terms, jobs));
              py::dict d;
              d["ok"] = cert.ok;
              d["rank"] = cert.rank;
              d["expected_rank"] = cert.expected_rank;
              py::list basis;
              for (auto& e : cert.basis) {
                  py::dict b;
                  b["L"] = e.L.l;
                  b["leading_index"] = e.computed.leading_index.elems;
                  basis.append(std::move(b));
              }
              d["basis"] = std::move(basis);
              if (!cert.failure.empty()) d["failure"] = cert.failure;
              return d;
          },
          py::arg("p"), py::arg("q"), py::arg("g"), py::arg("r"),
          py::arg("max_terms") = 0, py::arg("jobs") = 0,
          "Certify the basis of solutions and its rank.");

    m.def("verify_reconstruction",
          [](u64 p, u64 q, int g, int r, u64 max_terms, int jobs) {
              PrimePair pr = classify_pair(p, q);
              ModelParams prm = params_from_g(pr, g, r);
              return verify_reconstruction(pr, prm, make_limits(max_terms, jobs));
          },
          py::arg("p"), py::arg("q"), py::arg("g"), py::arg("r"),
          py::arg("max_terms") = 0, py::arg("jobs") = 0,
          "Check the Cartier reconstruction of every solution in the family.");

    m.def("schur_str",
          [](std::vector<int> a, int r, u64 p) { return schur(a, r, p).to_string(); },
          py::arg("a"), py::arg("r"), py::arg("p"),
          "Canonical text form of the Schur polynomial s_a mod p.");

    m.def("partitions",
          [](int d, int r) {
              py::list out;
              for (auto& a : enumerate_partitions(d, r)) out.append(a);
              return out;
          },
          py::arg("d"), py::arg("r"),
          "All partitions with r parts bounded by d, descending lex order.");

    m.def("kostka",
          [](std::vector<int> a) {
              py::dict out;
              for (auto& [b, k] : schur_monomial_expansion(a))
                  out[py::tuple(py::cast(b))] = k;
              return out;
          },
          py::arg("a"), "Kostka numbers K_{a,b} of the Schur polynomial s_a.");

    m.def("shifted_master_congruence",
          [](u64 p, u64 q, int g, int r, int d0, std::vector<int> dv) {
              PrimePair pr = classify_pair(p, q);
              ModelParams prm = params_from_g(pr, g, r);
              return shifted_master_congruence(pr, prm, d0, dv);
          },
          py::arg("p"), py::arg("q"), py::arg("g"), py::arg("r"),
          py::arg("d0"), py::arg("d_vec"));

    py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_RuntimeError);
}
