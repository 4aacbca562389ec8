#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cmc/cell_complex.hpp"
#include "cmc/geometry.hpp"

using namespace cmc;

namespace {

// single oriented edge with the nodes-positive convention
CellComplex single_edge() {
    CellComplex c(1);
    c.set_node_count(2);
    c.add_cell(1, {{0, -1}, {1, 1}});
    return c;
}

// two unit squares sharing an edge; `flip_second` breaks compatibility
CellComplex two_squares(bool flip_second) {
    // nodes 0..5: (0,0),(1,0),(2,0),(0,1),(1,1),(2,1)
    CellComplex c(2);
    c.set_node_count(6);
    const Index e01 = c.add_cell(1, {{0, -1}, {1, 1}});
    const Index e12 = c.add_cell(1, {{1, -1}, {2, 1}});
    const Index e34 = c.add_cell(1, {{3, -1}, {4, 1}});
    const Index e45 = c.add_cell(1, {{4, -1}, {5, 1}});
    const Index e03 = c.add_cell(1, {{0, -1}, {3, 1}});
    const Index e14 = c.add_cell(1, {{1, -1}, {4, 1}});
    const Index e25 = c.add_cell(1, {{2, -1}, {5, 1}});
    // counterclockwise: +bottom +right -top -left
    c.add_cell(2, {{e01, 1}, {e14, 1}, {e34, -1}, {e03, -1}});
    const int s = flip_second ? -1 : 1;
    c.add_cell(2, {{e12, static_cast<std::int8_t>(s)},
                   {e25, static_cast<std::int8_t>(s)},
                   {e45, static_cast<std::int8_t>(-s)},
                   {e14, static_cast<std::int8_t>(-s)}});
    return c;
}

}  // namespace

TEST_CASE("boundary of a single edge is N1 - N0") {
    const CellComplex c = single_edge();
    Chain e{1, Vector::Ones(1)};
    const Chain b = boundary(c, e);
    CHECK(b.coeffs[0] == -1.0);
    CHECK(b.coeffs[1] == 1.0);
    CHECK_THROWS(boundary(c, Chain{0, Vector::Ones(2)}));
}

TEST_CASE("boundary of boundary vanishes on every 2-cell") {
    const auto em = gen_rect_mesh(1.0, 1.0, 2, 2);
    const auto& c = em.mesh.complex();
    for (Index f = 0; f < c.count(2); ++f) {
        Chain basis{2, Vector::Zero(c.count(2))};
        basis.coeffs[f] = 1.0;
        const Chain bb = boundary(c, boundary(c, basis));
        CHECK(bb.coeffs.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("disk 2-cell boundary matches the traversal-orientation oracle") {
    // walk each embedded 2-cell's boundary loop; a coherent counterclockwise
    // traversal must reproduce the stored edge signs
    const auto em = gen_polar_disk_mesh(4, 3);
    const auto& K = em.mesh;
    for (Index f = 0; f < K.count(2); ++f) {
        const auto& faces = K.complex().hyperfaces(2, f);
        // each node of the quad must be hit once as a tail and once as a head
        std::map<Index, int> pass;
        for (const auto& fr : faces) {
            const auto& e = K.complex().hyperfaces(1, fr.face);
            for (const auto& nf : e) pass[nf.face] += fr.sign * nf.sign;
        }
        for (const auto& [n, v] : pass) CHECK(v == 0);  // coherent loop
        // counterclockwise in the plane: sample each directed edge in
        // Cartesian coordinates and accumulate the shoelace of the loop
        double area = 0;
        for (const auto& fr : faces) {
            const auto& seg = std::get<SegmentCell>(em.cells[1][fr.face]);
            const int m = 8;
            for (int k = 0; k < m; ++k) {
                double t0 = static_cast<double>(k) / m, t1 = static_cast<double>(k + 1) / m;
                if (fr.sign < 0) std::swap(t0, t1);
                const ChartPoint p{seg.a[0] + t0 * (seg.b[0] - seg.a[0]),
                                   seg.a[1] + t0 * (seg.b[1] - seg.a[1]), 0};
                const ChartPoint q{seg.a[0] + t1 * (seg.b[0] - seg.a[0]),
                                   seg.a[1] + t1 * (seg.b[1] - seg.a[1]), 0};
                const ChartPoint P = em.chart.to_cartesian(p);
                const ChartPoint Q = em.chart.to_cartesian(q);
                area += 0.5 * (P[0] * Q[1] - Q[0] * P[1]);
            }
        }
        CHECK(area > 0.0);
    }
}

TEST_CASE("coboundary is the transpose of boundary and squares to zero") {
    const auto em = gen_polar_disk_mesh(3, 4);
    const auto& c = em.mesh.complex();
    for (int p = 1; p <= 2; ++p) {
        const SparseMatrix B = c.boundary_matrix(p);
        const SparseMatrix Dt = c.coboundary_matrix(p - 1);
        CHECK((Eigen::MatrixXd(B.transpose()) - Eigen::MatrixXd(Dt)).cwiseAbs().maxCoeff() == 0.0);
    }
    // exact on the integer sign structure
    const Eigen::MatrixXd Z = Eigen::MatrixXd(c.boundary_matrix(1) * c.boundary_matrix(2));
    CHECK(Z.cwiseAbs().maxCoeff() == 0.0);
    // and to round-off on random real cochains
    std::mt19937 rng(11);
    std::normal_distribution<double> dist;
    Cochain s{0, Vector::Zero(c.count(0))};
    for (Index i = 0; i < s.values.size(); ++i) s.values[i] = dist(rng);
    const Cochain dds = coboundary(c, coboundary(c, s));
    CHECK(dds.values.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("coboundary of the indicator cochain on the tail node") {
    const CellComplex c = single_edge();
    Cochain s{0, Vector::Zero(2)};
    s.values[0] = 1.0;  // N0 carries sign -1 in E
    const Cochain ds = coboundary(c, s);
    CHECK(ds.values[0] == -1.0);
}

TEST_CASE("coboundary on a 2x2 grid matches endpoint differences") {
    const auto em = gen_rect_mesh(1.0, 1.0, 2, 2);
    const auto& K = em.mesh;
    Cochain u{0, Vector::Zero(K.count(0))};
    for (Index n = 0; n < K.count(0); ++n) u.values[n] = em.node_chart[n][0];  // u = x
    const Cochain du = coboundary(K.complex(), u);
    for (Index e = 0; e < K.count(1); ++e) {
        // oracle: head minus tail along the stored orientation
        double expect = 0;
        for (const auto& fr : K.complex().hyperfaces(1, e))
            expect += fr.sign * em.node_chart[fr.face][0];
        CHECK(du.values[e] == doctest::Approx(expect).epsilon(1e-14));
        const auto& seg = std::get<SegmentCell>(em.cells[1][e]);
        if (seg.a[1] == seg.b[1]) {
            CHECK(std::abs(du.values[e]) == doctest::Approx(std::abs(seg.b[0] - seg.a[0])));
        } else {
            CHECK(du.values[e] == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("trace restricts and commutes with the sub-mesh coboundary") {
    const auto em = gen_rect_mesh(2.0, 1.0, 2, 1);
    const auto& c = em.mesh.complex();
    // sub-mesh: the bottom boundary edges (y = 0)
    std::vector<std::vector<Index>> seed(2);
    for (Index e : boundary_cells(c)) {
        const auto& seg = std::get<SegmentCell>(em.cells[1][e]);
        if (seg.a[1] == 0.0 && seg.b[1] == 0.0) seed[1].push_back(e);
    }
    const SubMesh sub = build_submesh(c, "bottom", seed);
    CHECK(sub.complex.dim() == 1);
    CHECK(sub.complex.count(1) == 4);

    Cochain constant{0, Vector::Constant(c.count(0), 3.5)};
    const Cochain tc = trace(c, sub, constant);
    CHECK(tc.values.minCoeff() == 3.5);
    CHECK(tc.values.maxCoeff() == 3.5);

    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    Cochain s{0, Vector::Zero(c.count(0))};
    for (Index i = 0; i < s.values.size(); ++i) s.values[i] = dist(rng);
    const Cochain lhs = coboundary(sub.complex, trace(c, sub, s));
    const Cochain rhs = trace(c, sub, coboundary(c, s));
    CHECK((lhs.values - rhs.values).cwiseAbs().maxCoeff() == 0.0);

    // empty sub-mesh
    const SubMesh empty = build_submesh(c, "empty", {});
    const Cochain te = trace(c, empty, s);
    CHECK(te.values.size() == 0);
}

TEST_CASE("fundamental class and discrete integration") {
    const CellComplex edge = single_edge();
    CHECK(fundamental_class(edge).coeffs.size() == 1);
    CHECK(fundamental_class(edge).coeffs[0] == 1.0);

    const auto grid = gen_rect_mesh(1.0, 1.0, 3, 3);
    const Chain fc = fundamental_class(grid.mesh.complex());
    CHECK(fc.coeffs.size() == 36);  // Forman refinement of a 3x3 grid
    CHECK(fc.coeffs.sum() == doctest::Approx(36.0));

    // zero cochain integrates to zero
    Cochain zero{2, Vector::Zero(grid.mesh.count(2))};
    CHECK(integrate(grid.mesh.complex(), zero) == 0.0);

    // measure cochain on the unit cube grid integrates to one
    const auto cube = gen_cube_mesh(2, 2, 2);
    const MetricData md = compute_measures(cube);
    Cochain vol{3, md.mu[3]};
    CHECK(integrate(cube.mesh.complex(), vol) == doctest::Approx(1.0).epsilon(1e-12));

    // disk: pairing the measure cochain with the fundamental class gives pi
    const auto disk = gen_polar_disk_mesh(4, 3);
    const MetricData dm = compute_measures(disk);
    Cochain area{2, dm.mu[2]};
    CHECK(integrate(disk.mesh.complex(), area) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-12));

    // f = -4 dx^dy over the disk integrates to -4 pi
    FormField f;
    f.degree = 2;
    f.two = [](const ChartPoint& p, int, int) { return -4.0 * p[0]; };
    const Cochain fd = derham(disk, f);
    CHECK(integrate(disk.mesh.complex(), fd) ==
          doctest::Approx(-4.0 * std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("discrete Stokes on a closed mesh: integrate(d sigma) = 0") {
    // the boundary sub-mesh of a cube grid is a closed 2-complex
    const auto cube = gen_cube_mesh(2, 2, 2);
    const auto& c = cube.mesh.complex();
    std::vector<std::vector<Index>> seed(3);
    seed[2] = boundary_cells(c);
    const SubMesh shell = build_submesh(c, "shell", seed);
    CHECK(boundary_cells(shell.complex).empty());
    REQUIRE(check_compatible_orientation(shell.complex));

    std::mt19937 rng(3);
    std::normal_distribution<double> dist;
    Cochain s{1, Vector::Zero(shell.complex.count(1))};
    for (Index i = 0; i < s.values.size(); ++i) s.values[i] = dist(rng);
    const Cochain ds = coboundary(shell.complex, s);
    CHECK(integrate(shell.complex, ds) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compatible orientation check and orient_top_cells") {
    CellComplex good = two_squares(false);
    CHECK(check_compatible_orientation(good));

    CellComplex bad = two_squares(true);
    std::vector<Index> offenders;
    CHECK_FALSE(check_compatible_orientation(bad, &offenders));
    REQUIRE(offenders.size() == 1);
    CHECK(offenders[0] == 5);  // the shared edge e14

    CHECK_THROWS(fundamental_class(bad));

    orient_top_cells(bad);
    CHECK(check_compatible_orientation(bad));
    // the first cell keeps its orientation
    CHECK(bad.sign({2, 0}, 0) == 1);

    // idempotent: a second run changes nothing
    CellComplex again = bad;
    orient_top_cells(again);
    for (Index f = 0; f < bad.count(2); ++f)
        for (const auto& fr : bad.hyperfaces(2, f))
            CHECK(fr.sign == again.sign({2, f}, fr.face));

    // already-compatible input is untouched
    CellComplex keep = two_squares(false);
    orient_top_cells(keep);
    CHECK(keep.sign({2, 1}, 1) == two_squares(false).sign({2, 1}, 1));
}

TEST_CASE("validate flags a single flipped incidence sign") {
    const auto em = gen_rect_mesh(1.0, 1.0, 1, 1);
    CellComplex c = em.mesh.complex();
    REQUIRE(validate(c).ok());

    auto& faces = c.hyperfaces_mutable(2, 0);
    faces[0].sign = static_cast<std::int8_t>(-faces[0].sign);
    const auto rep = validate(c);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (const auto& issue : rep.issues)
        if (issue.kind == "chain-complex" && issue.cell.dim == 2 && issue.cell.index == 0)
            found = true;
    CHECK(found);
}

TEST_CASE("sign-perturbation fuzzing is always caught") {
    const auto em = gen_rect_mesh(1.0, 1.0, 2, 2);
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        CellComplex c = em.mesh.complex();
        std::uniform_int_distribution<int> pick_dim(1, 2);
        const int p = pick_dim(rng);
        std::uniform_int_distribution<Index> pick_cell(0, c.count(p) - 1);
        const Index i = pick_cell(rng);
        auto& faces = c.hyperfaces_mutable(p, i);
        std::uniform_int_distribution<std::size_t> pick_face(0, faces.size() - 1);
        faces[pick_face(rng)].sign *= -1;
        // flipping one incidence sign must break dd = 0 (p = 2) or the
        // compatibility/complex structure (p = 1 feeds the faces above)
        const bool caught = !validate(c).ok() || !check_compatible_orientation(c);
        CHECK(caught);
    }
}

TEST_CASE("label closure violations are reported") {
    const auto em = gen_rect_mesh(1.0, 1.0, 1, 1);
    CellComplex c = em.mesh.complex();
    c.labels["half-open"] = {{}, {0}};  // an edge without its nodes
    const auto rep = validate(c);
    bool found = false;
    for (const auto& issue : rep.issues)
        if (issue.kind == "label-closure") found = true;
    CHECK(found);
}
