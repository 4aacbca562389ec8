// pybind11 bindings: mesh generation, Forman subdivision, the discrete
// operators, and the transport solvers.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmc/cell_complex.hpp"
#include "cmc/forman.hpp"
#include "cmc/geometry.hpp"
#include "cmc/operators.hpp"
#include "cmc/problem.hpp"
#include "cmc/render.hpp"
#include "cmc/solvers.hpp"
#include "cmc/tess.hpp"

namespace py = pybind11;
using namespace cmc;

namespace {

Eigen::MatrixXd dense(const SparseMatrix& M) { return Eigen::MatrixXd(M); }

py::dict result_to_dict(const SolveResult& res) {
    py::dict d;
    d["u"] = res.u;
    d["q"] = res.q;
    if (res.q_raw.size() > 0) d["q_raw"] = res.q_raw;
    if (res.u_tilde) d["u_tilde"] = *res.u_tilde;
    if (!res.series.empty()) {
        py::list series;
        for (const auto& s : res.series) {
            py::dict e;
            e["t"] = s.t;
            e["u"] = s.u;
            e["q"] = s.q;
            e["amount_increment"] = s.amount_increment;
            series.append(e);
        }
        d["series"] = series;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_cmc, m) {
    m.doc() = "combinatorial mesh calculus on quasi-cubical cell complexes";

    py::class_<CatalogParams>(m, "CatalogParams")
        .def(py::init<>())
        .def_readwrite("n", &CatalogParams::n)
        .def_readwrite("nr", &CatalogParams::nr)
        .def_readwrite("nphi", &CatalogParams::nphi)
        .def_readwrite("ntheta", &CatalogParams::ntheta)
        .def_readwrite("nphi_sph", &CatalogParams::nphi_sph)
        .def_readwrite("voronoi_cells", &CatalogParams::voronoi_cells)
        .def_readwrite("voronoi_seed", &CatalogParams::voronoi_seed)
        .def_readwrite("tess_path", &CatalogParams::tess_path);

    py::class_<EmbeddedMesh>(m, "EmbeddedMesh")
        .def_property_readonly("dim", &EmbeddedMesh::dim)
        .def("count", [](const EmbeddedMesh& em, int p) { return em.mesh.count(p); })
        .def_property_readonly("node_xyz",
                               [](const EmbeddedMesh& em) {
                                   std::vector<std::array<double, 3>> out(em.node_xyz.begin(),
                                                                          em.node_xyz.end());
                                   return out;
                               })
        .def("boundary_matrix",
             [](const EmbeddedMesh& em, int p) { return dense(em.mesh.complex().boundary_matrix(p)); })
        .def("coboundary_matrix", [](const EmbeddedMesh& em, int p) {
            return dense(em.mesh.complex().coboundary_matrix(p));
        });

    py::class_<MetricData>(m, "MetricData")
        .def("mu", [](const MetricData& md, int p) { return md.mu.at(p); });

    py::class_<CatalogProblem>(m, "CatalogProblem")
        .def_readonly("name", &CatalogProblem::name)
        .def_readonly("em", &CatalogProblem::em)
        .def_readonly("metric", &CatalogProblem::metric)
        .def_property_readonly("exact_u",
                               [](const CatalogProblem& cp) { return cp.exact_u.values; })
        .def_property_readonly("exact_q",
                               [](const CatalogProblem& cp) { return cp.exact_q.values; });

    m.def("gen_cube_mesh", &gen_cube_mesh, py::arg("nx"), py::arg("ny"), py::arg("nz"),
          py::arg("w") = 1.0, py::arg("h") = 1.0, py::arg("d") = 1.0);
    m.def("gen_rect_mesh", &gen_rect_mesh);
    m.def("gen_polar_disk_mesh", &gen_polar_disk_mesh, py::arg("nr"), py::arg("nphi"),
          py::arg("radius") = 1.0);
    m.def("gen_hemisphere_mesh", &gen_hemisphere_mesh);
    m.def("compute_measures", &compute_measures);
    m.def("generate_voronoi_tess", &generate_voronoi_tess);

    m.def("validate_mesh", [](const EmbeddedMesh& em) {
        auto rep = validate(em.mesh.complex());
        return rep.summary();
    });

    m.def(
        "cup",
        [](const EmbeddedMesh& em, int p, const Vector& sigma, int q, const Vector& tau) {
            return cup(em.mesh, Cochain{p, sigma, ""}, Cochain{q, tau, ""}).values;
        },
        "quasi-cubical cup product");
    m.def("inner_product_weights",
          [](const EmbeddedMesh& em, const MetricData& md, int p) {
              return inner_product(em.mesh, md, p).weights;
          });
    m.def("hodge_star_matrix", [](const EmbeddedMesh& em, const MetricData& md, int p) {
        return dense(hodge_star_matrix(em.mesh, md, p));
    });

    m.def("catalog", [](const std::string& name, const CatalogParams& params) {
        return catalog(name, params);
    });
    m.def("catalog", [](const std::string& name) { return catalog(name, {}); });

    m.def(
        "solve",
        [](const CatalogProblem& cp, const std::string& formulation, const std::string& regime,
           const std::string& method, double dt, int steps, double theta,
           std::optional<Vector> u0) {
            Operators ops(cp.em.mesh, cp.metric);
            TransportProblem prob = cp.problem;
            if (regime == "transient") {
                Vector start = u0 ? *u0 : Vector::Zero(cp.em.mesh.count(0));
                prob.transient = TransientParams{0.0, dt, steps, theta, std::move(start)};
            }
            SolveResult res;
            if (formulation == "primal")
                res = regime == "steady" ? solve_primal_steady(ops, prob)
                                         : solve_primal_transient(ops, prob);
            else
                res = regime == "steady"
                          ? solve_mixed_steady(ops, prob,
                                               method == "saddle" ? MixedMethod::Saddle
                                                                  : MixedMethod::Eliminate)
                          : solve_mixed_transient(ops, prob);
            py::dict d = result_to_dict(res);
            const Vector& qcmp = formulation == "primal" ? res.q_raw : res.q;
            const ErrorReport err = relative_errors(res.u, qcmp, cp.exact_u, cp.exact_q);
            d["u_rel"] = err.u_rel;
            d["q_rel"] = err.q_rel;
            return d;
        },
        py::arg("problem"), py::arg("formulation") = "primal", py::arg("regime") = "steady",
        py::arg("method") = "eliminate", py::arg("dt") = 0.05, py::arg("steps") = 100,
        py::arg("theta") = 0.5, py::arg("u0") = std::nullopt);

    m.def("render_svg", [](const CatalogProblem& cp, const Vector& u, const Vector& q) {
        return render_svg(cp.em, u, q);
    });
}
