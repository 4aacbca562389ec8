#include "cmc/problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include "cmc/tess.hpp"

namespace cmc {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void TransportProblem::finalize(const QuasiCubicalMesh& K) {
    const int D = K.dim();
    if (kappa_tilde.size() == 0) kappa_tilde = Vector::Ones(K.count(1));
    if (kappa.size() == 0) kappa = Vector::Ones(K.count(D - 1));
    if (pi_tilde.size() == 0) pi_tilde = Vector::Ones(K.count(0));
    if (pi.size() == 0) pi = Vector::Ones(K.count(D));
    require(kappa_tilde.size() == K.count(1), "problem: kappa_tilde length");
    require(kappa.size() == K.count(D - 1), "problem: kappa length");
    require(pi_tilde.size() == K.count(0), "problem: pi_tilde length");
    require(pi.size() == K.count(D), "problem: pi length");
    require(kappa_tilde.minCoeff() > 0 && kappa.minCoeff() > 0, "problem: nonpositive conductivity");
    require(pi_tilde.minCoeff() > 0 && pi.minCoeff() > 0, "problem: nonpositive capacity");
    require(f.dim == D && f.values.size() == K.count(D), "problem: f must be a D-cochain");
    if (v) require(v->dim == D - 1 && v->values.size() == K.count(D - 1),
                   "problem: v must be a (D-1)-cochain");

    // the boundary parts must partition the boundary (D-1)-cells
    const auto bcells = boundary_cells(K.complex());
    std::set<Index> covered;
    if (gamma_d.to_parent.size() > static_cast<std::size_t>(D - 1))
        covered.insert(gamma_d.to_parent[D - 1].begin(), gamma_d.to_parent[D - 1].end());
    for (Index c : (gamma_n.to_parent.size() > static_cast<std::size_t>(D - 1)
                        ? gamma_n.to_parent[D - 1]
                        : std::vector<Index>{})) {
        require(covered.insert(c).second, "problem: boundary cell in both partitions");
    }
    for (Index c : bcells)
        require(covered.count(c) == 1, "problem: boundary partition does not cover cell " +
                                           std::to_string(c));
    require(g_d.size() == static_cast<Index>(gamma_d.to_parent.empty()
                                                 ? 0
                                                 : gamma_d.to_parent[0].size()),
            "problem: g_d length must match gamma_d node count");
    require(g_n.size() == static_cast<Index>(gamma_n.to_parent.size() >
                                                     static_cast<std::size_t>(D - 1)
                                                 ? gamma_n.to_parent[D - 1].size()
                                                 : 0),
            "problem: g_n length must match gamma_n cell count");
}

ChartPoint chart_midpoint(const ParametricCell& cell) {
    if (const auto* box = std::get_if<BoxCell>(&cell))
        return {0.5 * (box->lo[0] + box->hi[0]), 0.5 * (box->lo[1] + box->hi[1]),
                0.5 * (box->lo[2] + box->hi[2])};
    if (const auto* seg = std::get_if<SegmentCell>(&cell))
        return {0.5 * (seg->a[0] + seg->b[0]), 0.5 * (seg->a[1] + seg->b[1]),
                0.5 * (seg->a[2] + seg->b[2])};
    const auto& poly = std::get<PolygonCell>(cell);
    ChartPoint c{0, 0, 0};
    for (const auto& p : poly.pts) {
        c[0] += p[0];
        c[1] += p[1];
    }
    c[0] /= static_cast<double>(poly.pts.size());
    c[1] /= static_cast<double>(poly.pts.size());
    return c;
}

std::pair<SubMesh, SubMesh> partition_boundary(
    const EmbeddedMesh& em, const std::function<bool(const ChartPoint&)>& is_dirichlet) {
    const int D = em.dim();
    std::vector<std::vector<Index>> dcells(static_cast<std::size_t>(D));
    std::vector<std::vector<Index>> ncells(static_cast<std::size_t>(D));
    dcells.resize(D);
    ncells.resize(D);
    for (Index c : boundary_cells(em.mesh.complex())) {
        if (is_dirichlet(chart_midpoint(em.cells[D - 1][c])))
            dcells[D - 1].push_back(c);
        else
            ncells[D - 1].push_back(c);
    }
    return {build_submesh(em.mesh.complex(), "gamma_d", dcells),
            build_submesh(em.mesh.complex(), "gamma_n", ncells)};
}

namespace {

// g_D and g_N are the de Rham traces of the exact solution on the parts.
void attach_boundary_data(TransportProblem& prob, const Cochain& exact_u, const Cochain& exact_q) {
    const auto& gd_nodes = prob.gamma_d.to_parent.empty() ? std::vector<Index>{}
                                                          : prob.gamma_d.to_parent[0];
    prob.g_d = Vector::Zero(static_cast<Index>(gd_nodes.size()));
    for (Index i = 0; i < static_cast<Index>(gd_nodes.size()); ++i)
        prob.g_d[i] = exact_u.values[gd_nodes[i]];

    const int qd = exact_q.dim;
    const auto& gn_cells = prob.gamma_n.to_parent.size() > static_cast<std::size_t>(qd)
                               ? prob.gamma_n.to_parent[qd]
                               : std::vector<Index>{};
    prob.g_n = Vector::Zero(static_cast<Index>(gn_cells.size()));
    for (Index i = 0; i < static_cast<Index>(gn_cells.size()); ++i)
        prob.g_n[i] = exact_q.values[gn_cells[i]];
}

CatalogProblem make_cube_quadratic(const CatalogParams& params) {
    CatalogProblem cp;
    cp.name = "cube-quadratic";
    cp.em = gen_cube_mesh(params.n, params.n, params.n);
    cp.metric = compute_measures(cp.em);

    FormField u;
    u.degree = 0;
    u.units = "Y";
    u.scalar = [](const ChartPoint& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; };
    FormField q;
    q.degree = 2;
    q.units = "X/T";
    q.two = [](const ChartPoint& p, int i, int j) {
        if (i == 1 && j == 2) return -4.0 * p[0];
        if (i == 0 && j == 2) return 4.0 * p[1];   // y dz^dx = -y dx^dz
        if (i == 0 && j == 1) return -4.0 * p[2];
        return 0.0;
    };
    FormField f;
    f.degree = 3;
    f.units = "X/T";
    f.scalar = [](const ChartPoint&) { return -12.0; };

    cp.exact_u = derham(cp.em, u);
    cp.exact_q = derham(cp.em, q);
    cp.problem.f = derham(cp.em, f);
    cp.problem.kappa_tilde = Vector::Constant(cp.em.mesh.count(1), 2.0);
    cp.problem.kappa = Vector::Constant(cp.em.mesh.count(2), 2.0);

    auto [gd, gn] = partition_boundary(cp.em, [](const ChartPoint& p) {
        auto on01 = [](double v) { return std::abs(v) < 1e-12 || std::abs(v - 1.0) < 1e-12; };
        return on01(p[1]) || on01(p[2]);  // front/back/top/bottom Dirichlet
    });
    cp.problem.gamma_d = std::move(gd);
    cp.problem.gamma_n = std::move(gn);
    attach_boundary_data(cp.problem, cp.exact_u, cp.exact_q);
    cp.problem.finalize(cp.em.mesh);
    return cp;
}

CatalogProblem make_disk_quadratic(const CatalogParams& params) {
    CatalogProblem cp;
    cp.name = "disk-quadratic";
    cp.em = gen_polar_disk_mesh(params.nr, params.nphi);
    cp.metric = compute_measures(cp.em);

    FormField u;
    u.degree = 0;
    u.scalar = [](const ChartPoint& p) { return p[0] * p[0]; };  // r^2
    FormField q;  // 2y dx - 2x dy = -2 r^2 dphi in the polar chart
    q.degree = 1;
    q.one = [](const ChartPoint& p, int k) { return k == 1 ? -2.0 * p[0] * p[0] : 0.0; };
    FormField f;  // -4 dx^dy = -4 r dr^dphi
    f.degree = 2;
    f.two = [](const ChartPoint& p, int, int) { return -4.0 * p[0]; };

    cp.exact_u = derham(cp.em, u);
    cp.exact_q = derham(cp.em, q);
    cp.problem.f = derham(cp.em, f);
    cp.problem.kappa_tilde = Vector::Constant(cp.em.mesh.count(1), 1.0);
    cp.problem.kappa = Vector::Constant(cp.em.mesh.count(1), 1.0);

    // Dirichlet on the right half-circle x >= 0 (ties toward Dirichlet)
    auto [gd, gn] = partition_boundary(
        cp.em, [](const ChartPoint& p) { return std::cos(p[1]) >= -1e-9; });
    cp.problem.gamma_d = std::move(gd);
    cp.problem.gamma_n = std::move(gn);
    attach_boundary_data(cp.problem, cp.exact_u, cp.exact_q);
    cp.problem.finalize(cp.em.mesh);
    return cp;
}

CatalogProblem make_hemisphere_linear(const CatalogParams& params) {
    CatalogProblem cp;
    cp.name = "hemisphere-linear";
    cp.em = gen_hemisphere_mesh(params.ntheta, params.nphi_sph);
    cp.metric = compute_measures(cp.em);

    FormField u;
    u.degree = 0;
    u.scalar = [](const ChartPoint& p) { return p[0]; };  // theta
    FormField q;  // -2 sin(theta) dphi
    q.degree = 1;
    q.one = [](const ChartPoint& p, int k) { return k == 1 ? -2.0 * std::sin(p[0]) : 0.0; };
    FormField f;  // -2 cos(theta) dtheta^dphi
    f.degree = 2;
    f.two = [](const ChartPoint& p, int, int) { return -2.0 * std::cos(p[0]); };

    cp.exact_u = derham(cp.em, u);
    cp.exact_q = derham(cp.em, q);
    cp.problem.f = derham(cp.em, f);
    cp.problem.kappa_tilde = Vector::Constant(cp.em.mesh.count(1), 2.0);
    cp.problem.kappa = Vector::Constant(cp.em.mesh.count(1), 2.0);

    // Dirichlet where y <= 0 on the equator, i.e. phi in [pi, 2 pi]
    auto [gd, gn] = partition_boundary(
        cp.em, [](const ChartPoint& p) { return p[1] >= kPi - 1e-9; });
    cp.problem.gamma_d = std::move(gd);
    cp.problem.gamma_n = std::move(gn);
    attach_boundary_data(cp.problem, cp.exact_u, cp.exact_q);
    cp.problem.finalize(cp.em.mesh);
    return cp;
}

CatalogProblem make_rectangle_linear(const CatalogParams& params) {
    CatalogProblem cp;
    cp.name = "rectangle-linear";
    const double w = 20.0, h = 15.0;

    PolygonMesh pm;
    if (!params.tess_path.empty()) {
        pm = import_tess(params.tess_path);
    } else {
        pm = parse_tess_text(generate_voronoi_tess(params.voronoi_cells, w, h,
                                                   params.voronoi_seed));
    }
    cp.em = embed_polygon_mesh(pm.complex, pm.nodes);
    cp.metric = compute_measures(cp.em);

    FormField u;
    u.degree = 0;
    u.scalar = [](const ChartPoint& p) { return 5.0 * p[0]; };
    FormField q;  // -30 dy
    q.degree = 1;
    q.one = [](const ChartPoint&, int k) { return k == 1 ? -30.0 : 0.0; };
    FormField f;
    f.degree = 2;
    f.two = [](const ChartPoint&, int, int) { return 0.0; };

    cp.exact_u = derham(cp.em, u);
    cp.exact_q = derham(cp.em, q);
    cp.problem.f = derham(cp.em, f);
    cp.problem.kappa_tilde = Vector::Constant(cp.em.mesh.count(1), 6.0);
    cp.problem.kappa = Vector::Constant(cp.em.mesh.count(1), 6.0);

    auto [gd, gn] = partition_boundary(cp.em, [w](const ChartPoint& p) {
        return std::abs(p[0]) < 1e-9 || std::abs(p[0] - w) < 1e-9;  // vertical sides
    });
    cp.problem.gamma_d = std::move(gd);
    cp.problem.gamma_n = std::move(gn);
    attach_boundary_data(cp.problem, cp.exact_u, cp.exact_q);
    cp.problem.finalize(cp.em.mesh);
    return cp;
}

}  // namespace

CatalogProblem catalog(const std::string& name, const CatalogParams& params) {
    if (name == "cube-quadratic") return make_cube_quadratic(params);
    if (name == "disk-quadratic") return make_disk_quadratic(params);
    if (name == "hemisphere-linear") return make_hemisphere_linear(params);
    if (name == "rectangle-linear") return make_rectangle_linear(params);
    throw std::invalid_argument("catalog: unknown problem '" + name + "'");
}

}  // namespace cmc
