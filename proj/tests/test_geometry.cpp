#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmc/geometry.hpp"
#include "cmc/problem.hpp"
#include "cmc/tess.hpp"

using namespace cmc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("cube generator: counts and volume") {
    {
        const auto em = gen_cube_mesh(1, 1, 1);
        // parent 8/12/6/1 read back from the interval map
        long parent_count[4] = {0, 0, 0, 0};
        for (const auto& iv : em.mesh.interval_map()[0]) parent_count[iv.lower.dim]++;
        CHECK(parent_count[0] == 8);
        CHECK(parent_count[1] == 12);
        CHECK(parent_count[2] == 6);
        CHECK(parent_count[3] == 1);
        CHECK(em.mesh.count(0) == 27);
        CHECK(validate(em.mesh.complex()).ok());
        CHECK(check_compatible_orientation(em.mesh.complex()));
    }
    {
        const auto em = gen_cube_mesh(2, 2, 2);
        CHECK(em.mesh.count(0) == 125);  // (2*2+1)^3
        const MetricData md = compute_measures(em);
        CHECK(md.mu[3].sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS(gen_cube_mesh(0, 1, 1));
}

TEST_CASE("disk generator: counts, pie slices, area") {
    const auto em = gen_polar_disk_mesh(4, 3);
    long parent_faces = 0, pies = 0;
    std::map<std::pair<int, Index>, int> edge_count;
    for (const auto& iv : em.mesh.interval_map()[0])
        if (iv.lower.dim == 2) parent_faces++;
    CHECK(parent_faces == 12);  // nr * nphi two-cells before subdivision
    // pie slices have 3 edges: count parent faces by interval structure
    std::map<Index, int> edges_per_face;
    for (const auto& iv : em.mesh.interval_map()[1])
        if (iv.lower.dim == 1 && iv.upper.dim == 2) edges_per_face[iv.upper.index]++;
    for (const auto& [f, n] : edges_per_face)
        if (n == 3) pies++;
    CHECK(pies == 3);
    const MetricData md = compute_measures(em);
    CHECK(md.mu[2].sum() == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(validate(em.mesh.complex()).ok());
    CHECK(check_compatible_orientation(em.mesh.complex()));
    CHECK_THROWS(gen_polar_disk_mesh(4, 2));
}

TEST_CASE("hemisphere generator: area and parallel lengths") {
    const auto em = gen_hemisphere_mesh(6, 6);
    const MetricData md = compute_measures(em);
    CHECK(md.mu[2].sum() == doctest::Approx(2 * kPi).epsilon(1e-9));
    CHECK(validate(em.mesh.complex()).ok());
    // parallel edge at theta has length sin(theta) * dphi
    bool found = false;
    for (Index e = 0; e < em.mesh.count(1); ++e) {
        const auto& seg = std::get<SegmentCell>(em.cells[1][e]);
        if (seg.a[0] == seg.b[0] && seg.a[0] > 0) {
            const double expect = std::sin(seg.a[0]) * std::abs(seg.b[1] - seg.a[1]);
            CHECK(md.mu[1][e] == doctest::Approx(expect).epsilon(1e-12));
            found = true;
        }
    }
    CHECK(found);
    // hemisphere band cell [t0,t1]x[f0,f1] has area (cos t0 - cos t1) df
    for (Index f = 0; f < em.mesh.count(2); ++f) {
        const auto& box = std::get<BoxCell>(em.cells[2][f]);
        const double expect =
            (std::cos(box.lo[0]) - std::cos(box.hi[0])) * (box.hi[1] - box.lo[1]);
        CHECK(md.mu[2][f] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("disk measures: specific arc length") {
    const auto em = gen_polar_disk_mesh(4, 3);  // rings at k/4, K arcs span pi/3
    const MetricData md = compute_measures(em);
    bool found = false;
    for (Index e = 0; e < em.mesh.count(1); ++e) {
        const auto& seg = std::get<SegmentCell>(em.cells[1][e]);
        if (seg.a[0] == seg.b[0] && seg.a[0] == 0.25 &&
            std::abs(std::abs(seg.b[1] - seg.a[1]) - kPi / 3) < 1e-12) {
            CHECK(md.mu[1][e] == doctest::Approx(kPi / 12).epsilon(1e-12));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("rect generator and tess import") {
    const auto em = gen_rect_mesh(20.0, 15.0, 4, 3);
    const MetricData md = compute_measures(em);
    CHECK(md.mu[2].sum() == doctest::Approx(300.0).epsilon(1e-12));

    const std::string tess = generate_voronoi_tess(10, 20.0, 15.0, 2024);
    const PolygonMesh pm = parse_tess_text(tess);
    CHECK(pm.complex.count(2) == 10);
    CHECK(check_simple_polytopes(pm.complex).ok());
    const auto emb = embed_polygon_mesh(pm.complex, pm.nodes);
    CHECK(validate(emb.mesh.complex()).ok());
    CHECK(check_compatible_orientation(emb.mesh.complex()));
    const MetricData md2 = compute_measures(emb);
    CHECK(md2.mu[2].sum() == doctest::Approx(300.0).epsilon(1e-9));
}

TEST_CASE("orient_top_cells fixes an imported tessellation") {
    const PolygonMesh pm = parse_tess_text(generate_voronoi_tess(10, 20.0, 15.0, 7));
    QuasiCubicalMesh K = forman_subdivide(pm.complex);
    assign_forman_orientations(K);
    CHECK(check_compatible_orientation(K.complex()));
}

TEST_CASE("de Rham: closed-form examples") {
    // constant 1-form dx over the straight edge (0,0) -> (1,0)
    const auto rect = gen_rect_mesh(1.0, 1.0, 1, 1);
    FormField dx;
    dx.degree = 1;
    dx.one = [](const ChartPoint&, int k) { return k == 0 ? 1.0 : 0.0; };
    const Cochain v = derham(rect, dx);
    for (Index e = 0; e < rect.mesh.count(1); ++e) {
        const auto& seg = std::get<SegmentCell>(rect.cells[1][e]);
        CHECK(v.values[e] == doctest::Approx(seg.b[0] - seg.a[0]).epsilon(1e-13));
    }

    // q = 2y dx - 2x dy over unit-circle arcs: -2 dphi
    const auto disk = gen_polar_disk_mesh(4, 3);
    FormField q;
    q.degree = 1;
    q.one = [](const ChartPoint& p, int k) { return k == 1 ? -2.0 * p[0] * p[0] : 0.0; };
    const Cochain qv = derham(disk, q);
    for (Index e = 0; e < disk.mesh.count(1); ++e) {
        const auto& seg = std::get<SegmentCell>(disk.cells[1][e]);
        if (seg.a[0] == seg.b[0] && seg.a[0] == 1.0)
            CHECK(qv.values[e] == doctest::Approx(-2.0 * (seg.b[1] - seg.a[1])).epsilon(1e-12));
    }

    // f = -4 dx^dy over every disk cell: -4 * area within 1e-10
    FormField f;
    f.degree = 2;
    f.two = [](const ChartPoint& p, int, int) { return -4.0 * p[0]; };
    const Cochain fv = derham(disk, f);
    const MetricData md = compute_measures(disk);
    for (Index c = 0; c < disk.mesh.count(2); ++c)
        CHECK(fv.values[c] == doctest::Approx(-4.0 * md.mu[2][c]).epsilon(1e-10));
}

TEST_CASE("de Rham naturality R(d omega) = delta R(omega) on all four meshes") {
    struct Case {
        EmbeddedMesh em;
        FormField u;   // 0-form
        FormField du;  // its differential
    };
    std::vector<Case> cases;
    {
        Case c{gen_cube_mesh(2, 2, 2), {}, {}};
        c.u.degree = 0;
        c.u.scalar = [](const ChartPoint& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; };
        c.du.degree = 1;
        c.du.one = [](const ChartPoint& p, int k) { return 2.0 * p[k]; };
        cases.push_back(std::move(c));
    }
    {
        Case c{gen_polar_disk_mesh(3, 4), {}, {}};
        c.u.degree = 0;
        c.u.scalar = [](const ChartPoint& p) { return p[0] * p[0]; };
        c.du.degree = 1;
        c.du.one = [](const ChartPoint& p, int k) { return k == 0 ? 2.0 * p[0] : 0.0; };
        cases.push_back(std::move(c));
    }
    {
        Case c{gen_hemisphere_mesh(6, 6), {}, {}};
        c.u.degree = 0;
        c.u.scalar = [](const ChartPoint& p) { return p[0]; };
        c.du.degree = 1;
        c.du.one = [](const ChartPoint&, int k) { return k == 0 ? 1.0 : 0.0; };
        cases.push_back(std::move(c));
    }
    {
        const PolygonMesh pm = parse_tess_text(generate_voronoi_tess(10, 20.0, 15.0, 2024));
        Case c{embed_polygon_mesh(pm.complex, pm.nodes), {}, {}};
        c.u.degree = 0;
        c.u.scalar = [](const ChartPoint& p) { return 5.0 * p[0]; };
        c.du.degree = 1;
        c.du.one = [](const ChartPoint&, int k) { return k == 0 ? 5.0 : 0.0; };
        cases.push_back(std::move(c));
    }
    for (const auto& c : cases) {
        const Cochain lhs = derham(c.em, c.du);
        const Cochain rhs = coboundary(c.em.mesh.complex(), derham(c.em, c.u));
        CHECK((lhs.values - rhs.values).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("de Rham naturality at degree D-1: R(dq) = delta R(q) = R(f)") {
    const auto disk = gen_polar_disk_mesh(3, 4);
    FormField q;
    q.degree = 1;
    q.one = [](const ChartPoint& p, int k) { return k == 1 ? -2.0 * p[0] * p[0] : 0.0; };
    FormField f;
    f.degree = 2;
    f.two = [](const ChartPoint& p, int, int) { return -4.0 * p[0]; };
    const Cochain lhs = derham(disk, f);
    const Cochain rhs = coboundary(disk.mesh.complex(), derham(disk, q));
    CHECK((lhs.values - rhs.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("catalog: boundary data matches the worked examples") {
    {
        const CatalogProblem cp = catalog("cube-quadratic", {});
        // g_N vanishes on the x = 0 face cells
        const auto& gn = cp.problem.gamma_n;
        for (Index local = 0; local < static_cast<Index>(gn.to_parent[2].size()); ++local) {
            const auto mid = chart_midpoint(cp.em.cells[2][gn.to_parent[2][local]]);
            if (std::abs(mid[0]) < 1e-12)
                CHECK(std::abs(cp.problem.g_n[local]) < 1e-12);
        }
    }
    {
        const CatalogProblem cp = catalog("disk-quadratic", {});
        CHECK(cp.problem.g_d.minCoeff() == doctest::Approx(1.0));
        CHECK(cp.problem.g_d.maxCoeff() == doctest::Approx(1.0));
    }
    {
        const CatalogProblem cp = catalog("rectangle-linear", {});
        CHECK(cp.problem.f.values.cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS(catalog("unknown-name", {}));
}

TEST_CASE("tess importer rejects malformed input") {
    CHECK_THROWS(parse_tess_text("***tess\n **vertex\n nonsense\n"));
}
