// cmc command-line tool: mesh generation, Forman subdivision, validation,
// catalog discretization, solving, rendering, and the four-example
// reproduction table.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <sstream>

#include "cmc/cell_complex.hpp"
#include "cmc/forman.hpp"
#include "cmc/geometry.hpp"
#include "cmc/io_json.hpp"
#include "cmc/operators.hpp"
#include "cmc/problem.hpp"
#include "cmc/render.hpp"
#include "cmc/solvers.hpp"
#include "cmc/tess.hpp"

namespace {

using namespace cmc;

int cmd_gen(const std::string& kind, const std::string& out, int nr, int nphi, int n, double w,
            double h, int cells, unsigned seed) {
    if (kind == "voronoi") {
        write_file(out, generate_voronoi_tess(cells, w, h, seed));
        std::cout << "wrote " << out << "\n";
        return 0;
    }
    EmbeddedMesh em;
    if (kind == "disk")
        em = gen_polar_disk_mesh(nr, nphi);
    else if (kind == "hemisphere")
        em = gen_hemisphere_mesh(nr, nphi);
    else if (kind == "cube")
        em = gen_cube_mesh(n, n, n);
    else if (kind == "rect")
        em = gen_rect_mesh(w, h, n, n);
    else
        throw CLI::ValidationError("gen", "unknown mesh kind '" + kind + "'");
    const MetricData md = compute_measures(em);
    write_file(out, write_mesh_json(em.mesh.complex(), &em.node_xyz, &md.mu,
                                    &em.mesh.interval_map()));
    std::cout << "wrote " << out << " (";
    for (int p = 0; p <= em.dim(); ++p)
        std::cout << em.mesh.count(p) << (p < em.dim() ? "/" : "");
    std::cout << " cells)\n";
    return 0;
}

int cmd_forman(const std::string& in, const std::string& out) {
    const MeshFile mf = read_mesh_json(read_file(in));
    QuasiCubicalMesh K = forman_subdivide(mf.complex);
    assign_forman_orientations(K);
    const auto rep = validate(K.complex());
    if (!rep.ok()) {
        std::cerr << "forman: output failed validation: " << rep.summary() << "\n";
        return 1;
    }
    write_file(out, write_mesh_json(K.complex(), nullptr, nullptr, &K.interval_map()));
    std::cout << "wrote " << out << " (";
    for (int p = 0; p <= K.dim(); ++p) std::cout << K.count(p) << (p < K.dim() ? "/" : "");
    std::cout << " cells)\n";
    return 0;
}

int cmd_validate(const std::string& in) {
    const MeshFile mf = read_mesh_json(read_file(in));
    const auto rep = validate(mf.complex);
    if (!rep.ok()) {
        std::cerr << rep.summary() << "\n";
        return 1;
    }
    std::vector<Index> offenders;
    if (!check_compatible_orientation(mf.complex, &offenders)) {
        std::cerr << "compatible-orientation check failed at " << offenders.size()
                  << " cell(s), first offender " << offenders.front() << "\n";
        return 1;
    }
    std::cout << "ok\n";
    return 0;
}

CatalogParams params_from(int n, int nr, int nphi, int ntheta, int nphi_sph, int cells,
                          unsigned seed, const std::string& tess) {
    CatalogParams p;
    p.n = n;
    p.nr = nr;
    p.nphi = nphi;
    p.ntheta = ntheta;
    p.nphi_sph = nphi_sph;
    p.voronoi_cells = cells;
    p.voronoi_seed = seed;
    p.tess_path = tess;
    return p;
}

int cmd_discretize(const std::string& name, const CatalogParams& params,
                   const std::string& mesh_out, const std::string& problem_out) {
    CatalogProblem cp = catalog(name, params);
    write_file(mesh_out, write_mesh_json(cp.em.mesh.complex(), &cp.em.node_xyz, &cp.metric.mu,
                                         &cp.em.mesh.interval_map()));
    write_file(problem_out, write_problem_json(cp.em.mesh, cp.problem, mesh_out, &cp.exact_u,
                                               &cp.exact_q));
    std::cout << "wrote " << mesh_out << " and " << problem_out << "\n";
    return 0;
}

SolveResult run_solver(const Operators& ops, const TransportProblem& prob,
                       const std::string& formulation, const std::string& regime,
                       const std::string& method) {
    if (formulation == "primal")
        return regime == "steady" ? solve_primal_steady(ops, prob)
                                  : solve_primal_transient(ops, prob);
    const MixedMethod m = method == "saddle" ? MixedMethod::Saddle : MixedMethod::Eliminate;
    if (regime == "steady") return solve_mixed_steady(ops, prob, m);
    return solve_mixed_transient(ops, prob);
}

struct TransientFlags {
    double dt = 0.05;
    int steps = 0;  // 0 means not requested
    double theta = 0.5;
};

void dump_operators(const Operators& ops, const std::string& prefix) {
    for (int p = 0; p <= ops.mesh().dim(); ++p) {
        write_file(prefix + "hodge" + std::to_string(p) + ".txt",
                   Operators::dump_coordinate_text(ops.hodge(p)));
        std::ostringstream os;
        os.precision(17);
        const auto& w = ops.inner(p).weights;
        for (Index i = 0; i < w.size(); ++i) os << i << " " << i << " " << w[i] << "\n";
        write_file(prefix + "inner" + std::to_string(p) + ".txt", os.str());
    }
}

int cmd_solve(const std::string& name, const CatalogParams& params, const std::string& problem_in,
              const std::string& formulation, const std::string& regime,
              const std::string& method, const std::string& out, const TransientFlags& tf,
              const std::string& dump_prefix) {
    SolveResult res;
    std::optional<ErrorReport> errors;
    if (!name.empty()) {
        CatalogProblem cp = catalog(name, params);
        Operators ops(cp.em.mesh, cp.metric);
        TransportProblem prob = cp.problem;
        if (regime == "transient") {
            if (tf.steps <= 0)
                throw std::runtime_error("solve: transient regime needs --steps");
            prob.transient =
                TransientParams{0.0, tf.dt, tf.steps, tf.theta,
                                Vector::Zero(cp.em.mesh.count(0))};
        }
        if (!dump_prefix.empty()) dump_operators(ops, dump_prefix);
        res = run_solver(ops, prob, formulation, regime, method);
        const Vector& qcmp = formulation == "primal" ? res.q_raw : res.q;
        errors = relative_errors(res.u, qcmp, cp.exact_u, cp.exact_q);
    } else {
        // problem file route: the mesh reference must carry measures
        const std::string ptext = read_file(problem_in);
        const auto jmesh = nlohmann::json::parse(ptext).at("mesh").get<std::string>();
        const MeshFile mf = read_mesh_json(read_file(jmesh));
        if (!mf.interval_map || !mf.measures)
            throw std::runtime_error("solve: mesh file needs interval_map and measures");
        QuasiCubicalMesh K(mf.complex, *mf.interval_map);
        MetricData md{*mf.measures};
        const ProblemFile pf = read_problem_json(ptext, K);
        Operators ops(K, md);
        if (!dump_prefix.empty()) dump_operators(ops, dump_prefix);
        res = run_solver(ops, pf.problem, formulation, regime, method);
        if (pf.exact_u && pf.exact_q) {
            const Vector& qcmp = formulation == "primal" ? res.q_raw : res.q;
            errors = relative_errors(res.u, qcmp, *pf.exact_u, *pf.exact_q);
        }
    }
    if (errors) {
        std::printf("u_rel = %.6g\n", errors->u_rel);
        std::printf("q_rel = %.6g\n", errors->q_rel);
    }
    if (!out.empty()) {
        write_file(out, write_result_json(res, errors));
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_render(const std::string& name, const CatalogParams& params,
               const std::string& formulation, const std::string& out) {
    CatalogProblem cp = catalog(name, params);
    Operators ops(cp.em.mesh, cp.metric);
    SolveResult res = formulation == "primal" ? solve_primal_steady(ops, cp.problem)
                                              : solve_mixed_steady(ops, cp.problem);
    if (cp.em.dim() == 2)
        write_file(out, render_svg(cp.em, res.u, res.q));
    else
        write_file(out, render_vtk(cp.em, res.u, res.q));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_repro() {
    struct Row {
        const char* label;
        const char* name;
        double published[4];  // u_p, u_m, q_p, q_m
    };
    const Row rows[] = {
        {"cube 2x2x2", "cube-quadratic", {0.0, 0.0467428, 0.129099, 7.2207e-16}},
        {"disk 3x4", "disk-quadratic", {0.0243588, 0.0802977, 0.0581986, 4.72913e-06}},
        {"hemisphere 6x6", "hemisphere-linear", {0.0190061, 0.0256953, 0.0161111, 0.000889324}},
        {"rectangle 10-cell", "rectangle-linear", {0.0942374, 0.132704, 0.397656, 0.329299}},
    };
    std::printf("%-18s %12s %12s %12s %12s\n", "example", "u_p", "u_m", "q_p", "q_m");
    for (const auto& row : rows) {
        CatalogProblem cp = catalog(row.name, {});
        Operators ops(cp.em.mesh, cp.metric);
        const SolveResult rp = solve_primal_steady(ops, cp.problem);
        const SolveResult rm = solve_mixed_steady(ops, cp.problem);
        const ErrorReport ep = relative_errors(rp.u, rp.q_raw, cp.exact_u, cp.exact_q);
        const ErrorReport em = relative_errors(rm.u, rm.q, cp.exact_u, cp.exact_q);
        std::printf("%-18s %12.6g %12.6g %12.6g %12.6g\n", row.label, ep.u_rel, em.u_rel,
                    ep.q_rel, em.q_rel);
        std::printf("%-18s %12.6g %12.6g %12.6g %12.6g\n", "  (published)", row.published[0],
                    row.published[1], row.published[2], row.published[3]);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combinatorial mesh calculus on quasi-cubical cell complexes"};
    app.require_subcommand(1);

    std::string kind, in, out, mesh_out, problem_out, name, problem_in;
    std::string formulation = "primal", regime = "steady", method = "eliminate";
    std::string dump_prefix;
    TransientFlags tflags;
    int nr = 3, nphi = 4, ntheta = 6, nphi_sph = 6, n = 2, cells = 10;
    double w = 20, h = 15;
    unsigned seed = 2024;
    std::string tess;

    auto* gen = app.add_subcommand("gen", "generate a catalog mesh");
    gen->add_option("kind", kind, "cube|rect|disk|hemisphere|voronoi")->required();
    gen->add_option("--out", out, "output file")->required();
    gen->add_option("--nr", nr, "rings / latitude bands");
    gen->add_option("--nphi", nphi, "angular sectors");
    gen->add_option("-n", n, "grid resolution");
    gen->add_option("--width", w, "rectangle width");
    gen->add_option("--height", h, "rectangle height");
    gen->add_option("--cells", cells, "voronoi cell count");
    gen->add_option("--seed", seed, "voronoi seed");

    auto* forman = app.add_subcommand("forman", "Forman-subdivide a mesh file");
    forman->add_option("input", in)->required();
    forman->add_option("--out", out)->required();

    auto* val = app.add_subcommand("validate", "validate a mesh file");
    val->add_option("input", in)->required();

    auto* disc = app.add_subcommand("discretize", "catalog problem -> mesh + problem files");
    disc->add_option("--problem", name, "catalog name")->required();
    disc->add_option("--mesh-out", mesh_out)->required();
    disc->add_option("--problem-out", problem_out)->required();
    disc->add_option("--nr", nr);
    disc->add_option("--nphi", nphi);
    disc->add_option("--ntheta", ntheta);
    disc->add_option("--nphi-sph", nphi_sph);
    disc->add_option("-n", n);
    disc->add_option("--cells", cells);
    disc->add_option("--seed", seed);
    disc->add_option("--tess", tess, "use an existing .tess file");

    auto* solve = app.add_subcommand("solve", "solve a catalog or problem file");
    solve->add_option("--problem", name, "catalog name (or use --problem-file)");
    solve->add_option("--problem-file", problem_in, "cmc-problem v1 file");
    solve->add_option("--formulation", formulation, "primal|mixed");
    solve->add_option("--regime", regime, "steady|transient");
    solve->add_option("--method", method, "eliminate|saddle (mixed)");
    solve->add_option("--out", out, "result file");
    solve->add_option("--dt", tflags.dt, "transient step size");
    solve->add_option("--steps", tflags.steps, "transient step count");
    solve->add_option("--theta", tflags.theta, "time-stepping theta");
    solve->add_option("--dump-operators", dump_prefix,
                      "write Hodge/inner-product matrices as coordinate text");
    solve->add_option("--nr", nr);
    solve->add_option("--nphi", nphi);
    solve->add_option("--ntheta", ntheta);
    solve->add_option("--nphi-sph", nphi_sph);
    solve->add_option("-n", n);
    solve->add_option("--cells", cells);
    solve->add_option("--seed", seed);
    solve->add_option("--tess", tess);

    auto* render = app.add_subcommand("render", "solve a catalog problem and render it");
    render->add_option("--problem", name)->required();
    render->add_option("--formulation", formulation, "primal|mixed");
    render->add_option("--out", out)->required();
    render->add_option("--nr", nr);
    render->add_option("--nphi", nphi);
    render->add_option("-n", n);
    render->add_option("--cells", cells);
    render->add_option("--seed", seed);

    auto* repro = app.add_subcommand("repro", "reproduce the four worked examples");
    (void)repro;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto params = params_from(n, nr, nphi, ntheta, nphi_sph, cells, seed, tess);
        if (gen->parsed()) return cmd_gen(kind, out, nr, nphi, n, w, h, cells, seed);
        if (forman->parsed()) return cmd_forman(in, out);
        if (val->parsed()) return cmd_validate(in);
        if (disc->parsed()) return cmd_discretize(name, params, mesh_out, problem_out);
        if (solve->parsed())
            return cmd_solve(name, params, problem_in, formulation, regime, method, out,
                             tflags, dump_prefix);
        if (render->parsed()) return cmd_render(name, params, formulation, out);
        if (repro->parsed()) return cmd_repro();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
