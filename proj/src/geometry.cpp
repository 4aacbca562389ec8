#include "cmc/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmc {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

double gl_integrate(const GaussRule& g, double a, double b,
                    const std::function<double(double)>& f) {
    if (a == b) return 0.0;
    double s = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i)
        s += g.w[i] * f(0.5 * (b - a) * g.x[i] + 0.5 * (a + b));
    return 0.5 * (b - a) * s;
}

double snap_periodic(double p, double lo, double hi, std::optional<double> period) {
    if (!period) return p;
    for (double cand : {lo, hi}) {
        double d = std::fmod(p - cand, *period);
        if (d < 0) d += *period;
        if (std::min(d, *period - d) < 1e-12) return cand;
    }
    return p;
}

}  // namespace

std::optional<double> Chart::period(int axis) const {
    if ((kind == ChartKind::Polar || kind == ChartKind::Spherical) && axis == 1)
        return 2.0 * kPi;
    return std::nullopt;
}

ChartPoint Chart::to_cartesian(const ChartPoint& p) const {
    switch (kind) {
        case ChartKind::Cartesian:
            return p;
        case ChartKind::Polar:
            return {p[0] * std::cos(p[1]), p[0] * std::sin(p[1]), 0.0};
        case ChartKind::Spherical:
            return {std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]),
                    std::cos(p[0])};
    }
    return p;
}

double measure_of_cell(const Chart& chart, int cell_dim, const ParametricCell& cell) {
    if (cell_dim == 0) return 1.0;

    if (const auto* seg = std::get_if<SegmentCell>(&cell)) {
        switch (chart.kind) {
            case ChartKind::Cartesian: {
                double s = 0;
                for (int k = 0; k < chart.space_dim; ++k)
                    s += (seg->b[k] - seg->a[k]) * (seg->b[k] - seg->a[k]);
                return std::sqrt(s);
            }
            case ChartKind::Polar:
                if (seg->a[1] == seg->b[1]) return std::abs(seg->b[0] - seg->a[0]);
                return seg->a[0] * std::abs(seg->b[1] - seg->a[1]);  // arc at fixed r
            case ChartKind::Spherical:
                if (seg->a[1] == seg->b[1]) return std::abs(seg->b[0] - seg->a[0]);  // meridian
                return std::sin(seg->a[0]) * std::abs(seg->b[1] - seg->a[1]);        // parallel
        }
    }
    if (const auto* box = std::get_if<BoxCell>(&cell)) {
        std::vector<int> axes;
        for (int k = 0; k < chart.space_dim; ++k)
            if (box->hi[k] != box->lo[k]) axes.push_back(k);
        require(static_cast<int>(axes.size()) == cell_dim, "measure: box rank mismatch");
        switch (chart.kind) {
            case ChartKind::Cartesian: {
                double m = 1.0;
                for (int k : axes) m *= box->hi[k] - box->lo[k];
                return m;
            }
            case ChartKind::Polar: {
                require(cell_dim == 2, "measure: polar boxes are 2-cells");
                return 0.5 * (box->hi[0] * box->hi[0] - box->lo[0] * box->lo[0]) *
                       (box->hi[1] - box->lo[1]);
            }
            case ChartKind::Spherical: {
                require(cell_dim == 2, "measure: spherical boxes are 2-cells");
                return (std::cos(box->lo[0]) - std::cos(box->hi[0])) * (box->hi[1] - box->lo[1]);
            }
        }
    }
    if (const auto* poly = std::get_if<PolygonCell>(&cell)) {
        require(chart.kind == ChartKind::Cartesian, "measure: polygons need a Cartesian chart");
        double a2 = 0;
        const auto& v = poly->pts;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            a2 += p[0] * q[1] - q[0] * p[1];
        }
        return std::abs(0.5 * a2);
    }
    throw std::invalid_argument("measure: unsupported parametric cell");
}

MetricData compute_measures(const EmbeddedMesh& em) {
    MetricData md;
    const int D = em.dim();
    md.mu.resize(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) {
        md.mu[p] = Vector::Zero(em.mesh.count(p));
        for (Index i = 0; i < em.mesh.count(p); ++i) {
            const double m = measure_of_cell(em.chart, p, em.cells[p][i]);
            if (!(m > 0.0))
                throw std::runtime_error("compute_measures: degenerate cell at dim " +
                                         std::to_string(p) + ", index " + std::to_string(i));
            md.mu[p][i] = m;
        }
    }
    return md;
}

// ---------------------------------------------------------------------------
// de Rham map
// ---------------------------------------------------------------------------

namespace {

double derham_on_cell(const Chart& chart, const FormField& w, int cell_dim,
                      const ParametricCell& cell, int orient, const GaussRule& g) {
    if (cell_dim == 0) {
        const auto* box = std::get_if<BoxCell>(&cell);
        require(box != nullptr, "derham: nodes must be boxes");
        return w.scalar(box->lo);
    }
    if (cell_dim == 1) {
        const auto* seg = std::get_if<SegmentCell>(&cell);
        require(seg != nullptr, "derham: edges must be segments");
        // chart-axis-aligned: integrate the matching component
        std::vector<int> moving;
        for (int k = 0; k < chart.space_dim; ++k)
            if (seg->a[k] != seg->b[k]) moving.push_back(k);
        if (moving.size() == 1) {
            const int k = moving[0];
            return gl_integrate(g, seg->a[k], seg->b[k], [&](double t) {
                ChartPoint p = seg->a;
                p[k] = t;
                return w.one(p, k);
            });
        }
        // general straight segment (Cartesian charts)
        require(chart.kind == ChartKind::Cartesian, "derham: skew edges need a Cartesian chart");
        return gl_integrate(g, 0.0, 1.0, [&](double t) {
            ChartPoint p;
            double val = 0;
            for (int k = 0; k < chart.space_dim; ++k) p[k] = seg->a[k] + t * (seg->b[k] - seg->a[k]);
            for (int k = 0; k < chart.space_dim; ++k)
                val += w.one(p, k) * (seg->b[k] - seg->a[k]);
            return val;
        });
    }
    if (cell_dim == 2) {
        if (const auto* box = std::get_if<BoxCell>(&cell)) {
            std::vector<int> axes;
            for (int k = 0; k < chart.space_dim; ++k)
                if (box->hi[k] != box->lo[k]) axes.push_back(k);
            require(axes.size() == 2, "derham: 2-cell box rank mismatch");
            const int k1 = axes[0], k2 = axes[1];
            const double v = gl_integrate(g, box->lo[k1], box->hi[k1], [&](double u) {
                return gl_integrate(g, box->lo[k2], box->hi[k2], [&](double t) {
                    ChartPoint p = box->lo;
                    p[k1] = u;
                    p[k2] = t;
                    return w.two(p, k1, k2);
                });
            });
            return orient * v;
        }
        if (const auto* poly = std::get_if<PolygonCell>(&cell)) {
            // fan triangulation from vertex 0, CCW stored; the form is
            // w.two(p, 0, 1) dx^dy.
            double acc = 0;
            const auto& v = poly->pts;
            for (std::size_t i = 1; i + 1 < v.size(); ++i) {
                const auto &A = v[0], &B = v[i], &C = v[i + 1];
                const double jac = (B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]);
                acc += gl_integrate(g, 0.0, 1.0, [&](double s) {
                    return gl_integrate(g, 0.0, 1.0, [&](double t) {
                        // Duffy: (s, t) in [0,1]^2 -> triangle
                        const double l1 = s, l2 = t * (1.0 - s);
                        ChartPoint p{A[0] + l1 * (B[0] - A[0]) + l2 * (C[0] - A[0]),
                                     A[1] + l1 * (B[1] - A[1]) + l2 * (C[1] - A[1]), 0.0};
                        return w.two(p, 0, 1) * (1.0 - s);
                    });
                }) * jac;
            }
            return orient * acc;
        }
        throw std::invalid_argument("derham: unsupported 2-cell parametrization");
    }
    if (cell_dim == 3) {
        const auto* box = std::get_if<BoxCell>(&cell);
        require(box != nullptr, "derham: 3-cells must be boxes");
        const double v = gl_integrate(g, box->lo[0], box->hi[0], [&](double x) {
            return gl_integrate(g, box->lo[1], box->hi[1], [&](double y) {
                return gl_integrate(g, box->lo[2], box->hi[2], [&](double z) {
                    return w.scalar({x, y, z});
                });
            });
        });
        return orient * v;
    }
    throw std::invalid_argument("derham: unsupported cell dimension");
}

}  // namespace

Cochain derham(const EmbeddedMesh& em, const FormField& omega, int points) {
    const int p = omega.degree;
    require(p >= 0 && p <= em.dim(), "derham: bad degree");
    const GaussRule g = gauss_legendre(points);
    Cochain out;
    out.dim = p;
    out.units = omega.units;
    out.values = Vector::Zero(em.mesh.count(p));
    for (Index i = 0; i < em.mesh.count(p); ++i)
        out.values[i] =
            derham_on_cell(em.chart, omega, p, em.cells[p][i], em.orientation[p][i], g);
    return out;
}

// ---------------------------------------------------------------------------
// Structured chart-product generators
// ---------------------------------------------------------------------------

namespace {

// Parent cell of a structured mesh: an axis-aligned chart box. Axis extents
// may be degenerate; the apex node (disk center / pole) carries a wildcard
// angular extent.
struct Extent {
    std::array<std::optional<std::pair<double, double>>, 3> axis;  // nullopt = wildcard
};

struct StructuredParent {
    CellComplex complex;
    std::vector<std::vector<Extent>> extents;  // per dim
};

// Interval [a,b] -> chart box of the Forman cell (midpoint refinement).
BoxCell interval_box(const Chart& chart, const Extent& ea, const Extent& eb, int space_dim) {
    BoxCell out;
    for (int k = 0; k < space_dim; ++k) {
        if (!eb.axis[k]) {  // apex node as upper end
            out.lo[k] = out.hi[k] = 0.0;
            continue;
        }
        const auto [lo, hi] = *eb.axis[k];
        if (lo == hi) {
            out.lo[k] = out.hi[k] = lo;
            continue;
        }
        const double m = 0.5 * (lo + hi);
        if (!ea.axis[k]) {  // wildcard lower end spans the whole range
            out.lo[k] = lo;
            out.hi[k] = hi;
        } else if (*ea.axis[k] == std::pair<double, double>(lo, hi)) {
            out.lo[k] = out.hi[k] = m;
        } else {
            const auto [alo, ahi] = *ea.axis[k];
            require(alo == ahi, "interval_box: unexpected partial extent");
            const double p = snap_periodic(alo, lo, hi, chart.period(k));
            out.lo[k] = std::min(p, m);
            out.hi[k] = std::max(p, m);
        }
    }
    return out;
}

// Builds the embedded Forman subdivision of a structured chart parent:
// boxes everywhere, signs assigned geometrically (edges directed along the
// increasing axis, higher cells chart-positive), boundary (D-1)-cells
// flipped outward.
EmbeddedMesh embed_structured(const Chart& chart, const StructuredParent& parent) {
    const int D = parent.complex.dim();
    QuasiCubicalMesh K = forman_subdivide(parent.complex);
    auto& complex = K.complex_mutable();

    // chart boxes for every K cell
    std::vector<std::vector<BoxCell>> boxes(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) {
        boxes[p].reserve(static_cast<std::size_t>(K.count(p)));
        for (Index i = 0; i < K.count(p); ++i) {
            const auto& iv = K.interval(p, i);
            boxes[p].push_back(interval_box(chart,
                                            parent.extents[iv.lower.dim][iv.lower.index],
                                            parent.extents[iv.upper.dim][iv.upper.index],
                                            chart.space_dim));
        }
    }

    // geometric signs: edges along increasing axis
    for (Index e = 0; e < K.count(1); ++e) {
        const auto& box = boxes[1][e];
        int axis = -1;
        for (int k = 0; k < chart.space_dim; ++k)
            if (box.lo[k] != box.hi[k]) axis = k;
        require(axis >= 0, "embed_structured: degenerate edge");
        auto& faces = complex.hyperfaces_mutable(1, e);
        for (auto& fr : faces) {
            const double nodepos = snap_periodic(boxes[0][fr.face].lo[axis], box.lo[axis],
                                                 box.hi[axis], chart.period(axis));
            fr.sign = static_cast<std::int8_t>(nodepos == box.hi[axis] ? 1 : -1);
        }
    }
    // p >= 2: hyperface sign from the fixed axis and side, faces canonical
    for (int p = 2; p <= D; ++p) {
        for (Index i = 0; i < K.count(p); ++i) {
            const auto& box = boxes[p][i];
            std::vector<int> axes;
            for (int k = 0; k < chart.space_dim; ++k)
                if (box.lo[k] != box.hi[k]) axes.push_back(k);
            require(static_cast<int>(axes.size()) == p, "embed_structured: cell rank mismatch");
            auto& faces = complex.hyperfaces_mutable(p, i);
            for (auto& fr : faces) {
                const auto& fbox = boxes[p - 1][fr.face];
                int fixed = -1;
                for (int k : axes)
                    if (fbox.lo[k] == fbox.hi[k]) fixed = k;
                require(fixed >= 0, "embed_structured: face alignment mismatch");
                const double v =
                    snap_periodic(fbox.lo[fixed], box.lo[fixed], box.hi[fixed], chart.period(fixed));
                const bool hi_side = std::abs(v - box.hi[fixed]) < std::abs(v - box.lo[fixed]);
                const int pos = static_cast<int>(
                    std::find(axes.begin(), axes.end(), fixed) - axes.begin());
                fr.sign = static_cast<std::int8_t>(((pos % 2 == 0) ? 1 : -1) * (hi_side ? 1 : -1));
            }
        }
    }
    K.invalidate_caches();

    EmbeddedMesh em;
    em.chart = chart;
    em.cells.resize(static_cast<std::size_t>(D) + 1);
    em.orientation.resize(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p)
        em.orientation[p].assign(static_cast<std::size_t>(K.count(p)), 1);

    // outward boundary (D-1)-cells; nodes stay positive in D = 1
    if (D >= 2) {
        auto& cx = K.complex_mutable();
        std::vector<int> ncof(static_cast<std::size_t>(cx.count(D - 1)), 0);
        std::vector<int> sgn(static_cast<std::size_t>(cx.count(D - 1)), 0);
        for (Index i = 0; i < cx.count(D); ++i)
            for (const auto& fr : cx.hyperfaces(D, i)) {
                ncof[fr.face]++;
                sgn[fr.face] = fr.sign;
            }
        for (Index c = 0; c < cx.count(D - 1); ++c)
            if (ncof[c] == 1 && sgn[c] == -1) {
                cx.flip_cell(D - 1, c);
                em.orientation[D - 1][c] = -1;
            }
        K.invalidate_caches();
    }

    // parametric cells: nodes and higher cells as boxes, edges as segments
    for (int p = 0; p <= D; ++p) {
        em.cells[p].reserve(static_cast<std::size_t>(K.count(p)));
        for (Index i = 0; i < K.count(p); ++i) {
            if (p == 1) {
                const auto& box = boxes[1][i];
                SegmentCell s{box.lo, box.hi};
                // honor the stored direction (boundary flips included)
                const auto& faces = K.complex().hyperfaces(1, i);
                int axis = 0;
                for (int k = 0; k < em.chart.space_dim; ++k)
                    if (box.lo[k] != box.hi[k]) axis = k;
                for (const auto& fr : faces) {
                    const double nodepos = snap_periodic(boxes[0][fr.face].lo[axis], box.lo[axis],
                                                         box.hi[axis], em.chart.period(axis));
                    if (fr.sign > 0 && nodepos == box.lo[axis]) std::swap(s.a, s.b);
                }
                em.cells[p].push_back(s);
            } else {
                em.cells[p].push_back(boxes[p][i]);
            }
        }
    }

    em.mesh = std::move(K);
    em.node_chart.resize(static_cast<std::size_t>(em.mesh.count(0)));
    em.node_xyz.resize(static_cast<std::size_t>(em.mesh.count(0)));
    for (Index n = 0; n < em.mesh.count(0); ++n) {
        const auto& box = std::get<BoxCell>(em.cells[0][n]);
        em.node_chart[n] = box.lo;
        em.node_xyz[n] = em.chart.to_cartesian(box.lo);
    }
    return em;
}

// Structured polar/spherical parent: n1 rings x n2 sectors with the inner
// ring collapsed to an apex node when r starts at 0.
StructuredParent make_curved_parent(int n1, int n2, double r_lo, double r_hi, bool collapse) {
    require(n1 >= 1, "generator: need at least one ring");
    require(n2 >= 3, "generator: need at least three sectors");
    std::vector<double> rv(static_cast<std::size_t>(n1) + 1), fv(static_cast<std::size_t>(n2) + 1);
    for (int i = 0; i <= n1; ++i) rv[i] = r_lo + (r_hi - r_lo) * i / n1;
    for (int j = 0; j <= n2; ++j) fv[j] = 2.0 * kPi * j / n2;

    StructuredParent P;
    P.complex = CellComplex(2);
    P.extents.resize(3);

    auto point = [](double a, double b) {
        Extent e;
        e.axis[0] = {a, a};
        e.axis[1] = {b, b};
        return e;
    };

    std::vector<std::vector<Index>> nid(static_cast<std::size_t>(n1) + 1,
                                        std::vector<Index>(static_cast<std::size_t>(n2), -1));
    Index nn = 0;
    Index apex = -1;
    if (collapse) {
        Extent e;
        e.axis[0] = {rv[0], rv[0]};
        e.axis[1] = std::nullopt;  // wildcard angle
        P.extents[0].push_back(e);
        apex = nn++;
    }
    const int i0 = collapse ? 1 : 0;
    for (int i = i0; i <= n1; ++i)
        for (int j = 0; j < n2; ++j) {
            nid[i][j] = nn++;
            P.extents[0].push_back(point(rv[i], fv[j]));
        }
    P.complex.set_node_count(nn);
    auto node = [&](int i, int j) { return (collapse && i == 0) ? apex : nid[i][j % n2]; };

    std::map<std::pair<std::string, std::pair<int, int>>, Index> eid;
    auto add_edge = [&](const std::string& kind, int i, int j, Index a, Index b, Extent e) {
        P.extents[1].push_back(e);
        eid[{kind, {i, j}}] = P.complex.add_cell(1, {{a, 1}, {b, 1}});
    };
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            Extent e;
            e.axis[0] = {rv[i], rv[i + 1]};
            e.axis[1] = {fv[j], fv[j]};
            add_edge("r", i, j, node(i, j), node(i + 1, j), e);
        }
    for (int i = (collapse ? 1 : 0); i <= n1; ++i)
        for (int j = 0; j < n2; ++j) {
            Extent e;
            e.axis[0] = {rv[i], rv[i]};
            e.axis[1] = {fv[j], fv[j + 1]};
            add_edge("a", i, j, node(i, j), node(i, j + 1), e);
        }
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            std::vector<FaceRef> fl;
            fl.push_back({eid.at({"r", {i, j}}), 1});
            fl.push_back({eid.at({"r", {i, (j + 1) % n2}}), 1});
            fl.push_back({eid.at({"a", {i + 1, j}}), 1});
            if (!(collapse && i == 0)) fl.push_back({eid.at({"a", {i, j}}), 1});
            std::sort(fl.begin(), fl.end(),
                      [](const FaceRef& x, const FaceRef& y) { return x.face < y.face; });
            P.complex.add_cell(2, std::move(fl));
            Extent e;
            e.axis[0] = {rv[i], rv[i + 1]};
            e.axis[1] = {fv[j], fv[j + 1]};
            P.extents[2].push_back(e);
        }
    return P;
}

// Cartesian tensor grid parent in up to three axes.
StructuredParent make_grid_parent(const std::vector<std::vector<double>>& axes_vals) {
    const int D = static_cast<int>(axes_vals.size());
    StructuredParent P;
    P.complex = CellComplex(D);
    P.extents.resize(static_cast<std::size_t>(D) + 1);

    std::array<int, 3> n{1, 1, 1};
    for (int k = 0; k < D; ++k) n[k] = static_cast<int>(axes_vals[k].size());
    auto flat = [&](std::array<int, 3> idx) { return (idx[0] * n[1] + idx[1]) * n[2] + idx[2]; };

    // nodes
    P.complex.set_node_count(n[0] * n[1] * n[2]);
    P.extents[0].resize(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                Extent e;
                for (int ax = 0; ax < D; ++ax) {
                    const double v = axes_vals[ax][std::array<int, 3>{i, j, k}[ax]];
                    e.axis[ax] = {v, v};
                }
                P.extents[0][flat({i, j, k})] = e;
            }

    // cells of every dimension: choose the set of extended axes
    std::map<std::pair<int, std::array<int, 4>>, Index> ids;  // (mask, ijk+pad) -> index per dim
    for (int p = 1; p <= D; ++p) {
        for (int mask = 0; mask < (1 << D); ++mask) {
            if (std::popcount(static_cast<unsigned>(mask)) != p) continue;
            std::array<int, 3> lim = n;
            for (int ax = 0; ax < D; ++ax)
                if (mask & (1 << ax)) lim[ax] -= 1;
            for (int i = 0; i < lim[0]; ++i)
                for (int j = 0; j < lim[1]; ++j)
                    for (int k = 0; k < lim[2]; ++k) {
                        const std::array<int, 3> base{i, j, k};
                        std::vector<FaceRef> faces;
                        if (p == 1) {
                            const int ax = std::countr_zero(static_cast<unsigned>(mask));
                            auto hi = base;
                            hi[ax] += 1;
                            faces.push_back({flat(base), 1});
                            faces.push_back({flat(hi), 1});
                        } else {
                            for (int ax = 0; ax < D; ++ax) {
                                if (!(mask & (1 << ax))) continue;
                                const int sub = mask & ~(1 << ax);
                                for (int side = 0; side <= 1; ++side) {
                                    auto idx = base;
                                    idx[ax] += side;
                                    faces.push_back({ids.at({sub, {idx[0], idx[1], idx[2], 0}}), 1});
                                }
                            }
                        }
                        std::sort(faces.begin(), faces.end(), [](const FaceRef& x, const FaceRef& y) {
                            return x.face < y.face;
                        });
                        const Index id = P.complex.add_cell(p, std::move(faces));
                        ids[{mask, {i, j, k, 0}}] = id;
                        Extent e;
                        for (int ax = 0; ax < D; ++ax) {
                            const double lo = axes_vals[ax][base[ax]];
                            const double hi =
                                (mask & (1 << ax)) ? axes_vals[ax][base[ax] + 1] : lo;
                            e.axis[ax] = {lo, hi};
                        }
                        P.extents[p].push_back(e);
                    }
        }
    }
    return P;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) v[i] = a + (b - a) * i / n;
    return v;
}

}  // namespace

EmbeddedMesh gen_cube_mesh(int nx, int ny, int nz, double w, double h, double d) {
    require(nx >= 1 && ny >= 1 && nz >= 1, "gen_cube_mesh: sizes must be positive");
    Chart chart{ChartKind::Cartesian, 3};
    auto parent = make_grid_parent({linspace(0, w, nx), linspace(0, h, ny), linspace(0, d, nz)});
    return embed_structured(chart, parent);
}

EmbeddedMesh gen_line_mesh(int n, double length) {
    require(n >= 1, "gen_line_mesh: size must be positive");
    Chart chart{ChartKind::Cartesian, 1};
    auto parent = make_grid_parent({linspace(0, length, n)});
    return embed_structured(chart, parent);
}

EmbeddedMesh gen_rect_mesh(double w, double h, int nx, int ny) {
    require(nx >= 1 && ny >= 1, "gen_rect_mesh: sizes must be positive");
    Chart chart{ChartKind::Cartesian, 2};
    auto parent = make_grid_parent({linspace(0, w, nx), linspace(0, h, ny)});
    return embed_structured(chart, parent);
}

EmbeddedMesh gen_polar_disk_mesh(int nr, int nphi, double radius) {
    Chart chart{ChartKind::Polar, 2};
    auto parent = make_curved_parent(nr, nphi, 0.0, radius, /*collapse=*/true);
    return embed_structured(chart, parent);
}

EmbeddedMesh gen_hemisphere_mesh(int ntheta, int nphi) {
    Chart chart{ChartKind::Spherical, 2};
    auto parent = make_curved_parent(ntheta, nphi, 0.0, 0.5 * kPi, /*collapse=*/true);
    return embed_structured(chart, parent);
}

EmbeddedMesh embed_polygon_mesh(const CellComplex& parent,
                                const std::vector<ChartPoint>& parent_nodes) {
    require(parent.dim() == 2, "embed_polygon_mesh: parent must be 2D");
    require(static_cast<Index>(parent_nodes.size()) == parent.count(0),
            "embed_polygon_mesh: node count mismatch");

    QuasiCubicalMesh K = forman_subdivide(parent);
    const int D = 2;

    // representative points of parent cells: vertex / midpoint / centroid
    std::vector<std::vector<ChartPoint>> rep(3);
    rep[0] = parent_nodes;
    rep[1].resize(static_cast<std::size_t>(parent.count(1)));
    for (Index e = 0; e < parent.count(1); ++e) {
        const auto& fs = parent.hyperfaces(1, e);
        for (int k = 0; k < 2; ++k)
            rep[1][e][k] = 0.5 * (parent_nodes[fs[0].face][k] + parent_nodes[fs[1].face][k]);
        rep[1][e][2] = 0;
    }
    rep[2].resize(static_cast<std::size_t>(parent.count(2)));
    for (Index f = 0; f < parent.count(2); ++f) {
        const auto ns = parent.subfaces(2, f, 0);
        ChartPoint c{0, 0, 0};
        for (Index n : ns) {
            c[0] += parent_nodes[n][0];
            c[1] += parent_nodes[n][1];
        }
        c[0] /= static_cast<double>(ns.size());
        c[1] /= static_cast<double>(ns.size());
        rep[2][f] = c;
    }

    auto point_of = [&](const CellId& c) { return rep[c.dim][c.index]; };

    auto& complex = K.complex_mutable();

    // edges: tail = [a,a], head = [b,b] (interval order)
    std::vector<std::array<Index, 2>> edge_nodes(static_cast<std::size_t>(K.count(1)));
    for (Index e = 0; e < K.count(1); ++e) {
        const auto& iv = K.interval(1, e);
        auto& faces = complex.hyperfaces_mutable(1, e);
        for (auto& fr : faces) {
            const auto& niv = K.interval(0, fr.face);
            const bool is_upper = (niv.lower == iv.upper);
            fr.sign = static_cast<std::int8_t>(is_upper ? 1 : -1);
            edge_nodes[e][is_upper ? 1 : 0] = fr.face;
        }
    }

    // quads [n, F]: loop n -> m(e1) -> c(F) -> m(e2); sign of each K-edge by
    // traversal direction, then flip the whole loop if clockwise.
    for (Index f = 0; f < K.count(2); ++f) {
        auto& faces = complex.hyperfaces_mutable(2, f);
        require(faces.size() == 4, "embed_polygon_mesh: quad without four edges");
        // orient edges along a coherent loop: start anywhere
        std::vector<Index> loop_nodes;
        std::map<Index, std::vector<std::size_t>> at_node;
        for (std::size_t k = 0; k < faces.size(); ++k)
            for (Index n : {edge_nodes[faces[k].face][0], edge_nodes[faces[k].face][1]})
                at_node[n].push_back(k);
        // walk the loop
        std::vector<std::int8_t> dir(4, 0);
        Index cur_node = edge_nodes[faces[0].face][0];
        std::size_t cur_edge = 0;
        for (int step = 0; step < 4; ++step) {
            const Index tail = edge_nodes[faces[cur_edge].face][0];
            const Index head = edge_nodes[faces[cur_edge].face][1];
            dir[cur_edge] = static_cast<std::int8_t>(cur_node == tail ? 1 : -1);
            const Index next_node = (cur_node == tail) ? head : tail;
            loop_nodes.push_back(cur_node);
            // find the other edge at next_node
            std::size_t next_edge = cur_edge;
            for (std::size_t k : at_node[next_node])
                if (k != cur_edge) next_edge = k;
            cur_node = next_node;
            cur_edge = next_edge;
        }
        double area2 = 0;
        for (std::size_t i = 0; i < loop_nodes.size(); ++i) {
            const auto& P = point_of(K.interval(0, loop_nodes[i]).lower);
            const auto& Q = point_of(K.interval(0, loop_nodes[(i + 1) % loop_nodes.size()]).lower);
            area2 += P[0] * Q[1] - Q[0] * P[1];
        }
        const int flip = (area2 > 0) ? 1 : -1;
        for (std::size_t k = 0; k < faces.size(); ++k)
            faces[k].sign = static_cast<std::int8_t>(flip * dir[k]);
    }
    K.invalidate_caches();

    EmbeddedMesh em;
    em.chart = Chart{ChartKind::Cartesian, 2};
    em.cells.resize(3);
    em.orientation.resize(3);
    for (int p = 0; p <= D; ++p)
        em.orientation[p].assign(static_cast<std::size_t>(K.count(p)), 1);

    // outward boundary edges
    {
        auto& cx = K.complex_mutable();
        std::vector<int> ncof(static_cast<std::size_t>(cx.count(1)), 0);
        std::vector<int> sgn(static_cast<std::size_t>(cx.count(1)), 0);
        for (Index i = 0; i < cx.count(2); ++i)
            for (const auto& fr : cx.hyperfaces(2, i)) {
                ncof[fr.face]++;
                sgn[fr.face] = fr.sign;
            }
        for (Index c = 0; c < cx.count(1); ++c)
            if (ncof[c] == 1 && sgn[c] == -1) {
                cx.flip_cell(1, c);
                std::swap(edge_nodes[c][0], edge_nodes[c][1]);
            }
        K.invalidate_caches();
    }

    // parametric cells
    for (Index n = 0; n < K.count(0); ++n) {
        BoxCell b;
        b.lo = b.hi = point_of(K.interval(0, n).lower);
        em.cells[0].push_back(b);
    }
    for (Index e = 0; e < K.count(1); ++e) {
        SegmentCell s;
        s.a = point_of(K.interval(0, edge_nodes[e][0]).lower);
        s.b = point_of(K.interval(0, edge_nodes[e][1]).lower);
        em.cells[1].push_back(s);
    }
    for (Index f = 0; f < K.count(2); ++f) {
        // CCW vertex loop of the quad
        const auto& faces = K.complex().hyperfaces(2, f);
        std::map<Index, std::vector<std::pair<Index, int>>> adj;  // node -> (edge, sign)
        for (const auto& fr : faces) {
            adj[edge_nodes[fr.face][0]].push_back({fr.face, fr.sign});
            adj[edge_nodes[fr.face][1]].push_back({fr.face, fr.sign});
        }
        PolygonCell poly;
        Index cur = adj.begin()->first;
        Index prev_edge = -1;
        for (int step = 0; step < 4; ++step) {
            poly.pts.push_back(point_of(K.interval(0, cur).lower));
            for (const auto& [e, s] : adj[cur]) {
                if (e == prev_edge) continue;
                // follow the edge in the direction induced by the face sign
                const Index tail = edge_nodes[e][0], head = edge_nodes[e][1];
                const Index from = s > 0 ? tail : head;
                const Index to = s > 0 ? head : tail;
                if (from == cur) {
                    cur = to;
                    prev_edge = e;
                    break;
                }
            }
        }
        em.cells[2].push_back(poly);
    }

    em.mesh = std::move(K);
    em.node_chart.resize(static_cast<std::size_t>(em.mesh.count(0)));
    em.node_xyz.resize(static_cast<std::size_t>(em.mesh.count(0)));
    for (Index n = 0; n < em.mesh.count(0); ++n) {
        const auto& box = std::get<BoxCell>(em.cells[0][n]);
        em.node_chart[n] = box.lo;
        em.node_xyz[n] = box.lo;
    }
    return em;
}

}  // namespace cmc
