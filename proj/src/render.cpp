#include "cmc/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cmc {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct XY {
    double x, y;
};

// 2D vis position of a chart point (hemisphere plots project onto xy).
XY plot_point(const Chart& chart, const ChartPoint& p) {
    const ChartPoint c = chart.to_cartesian(p);
    return {c[0], c[1]};
}

// sampled boundary polyline of a 2-cell in plot coordinates
std::vector<XY> cell_outline(const EmbeddedMesh& em, Index f, int samples_per_edge = 8) {
    std::vector<XY> pts;
    const auto& cell = em.cells[2][f];
    if (const auto* box = std::get_if<BoxCell>(&cell)) {
        const double u0 = box->lo[0], u1 = box->hi[0], v0 = box->lo[1], v1 = box->hi[1];
        auto emit = [&](double a0, double b0, double a1, double b1) {
            for (int k = 0; k < samples_per_edge; ++k) {
                const double t = static_cast<double>(k) / samples_per_edge;
                pts.push_back(plot_point(em.chart, {a0 + t * (a1 - a0), b0 + t * (b1 - b0), 0}));
            }
        };
        emit(u0, v0, u1, v0);
        emit(u1, v0, u1, v1);
        emit(u1, v1, u0, v1);
        emit(u0, v1, u0, v0);
    } else if (const auto* poly = std::get_if<PolygonCell>(&cell)) {
        for (const auto& p : poly->pts) pts.push_back({p[0], p[1]});
    }
    return pts;
}

XY edge_plot_midpoint(const EmbeddedMesh& em, Index e) {
    const auto& seg = std::get<SegmentCell>(em.cells[1][e]);
    const ChartPoint mid{0.5 * (seg.a[0] + seg.b[0]), 0.5 * (seg.a[1] + seg.b[1]),
                         0.5 * (seg.a[2] + seg.b[2])};
    return plot_point(em.chart, mid);
}

XY cell_plot_center(const EmbeddedMesh& em, int dim, Index i) {
    const auto& cell = em.cells[dim][i];
    if (const auto* box = std::get_if<BoxCell>(&cell))
        return plot_point(em.chart, {0.5 * (box->lo[0] + box->hi[0]),
                                     0.5 * (box->lo[1] + box->hi[1]),
                                     0.5 * (box->lo[2] + box->hi[2])});
    const auto& poly = std::get<PolygonCell>(cell);
    XY c{0, 0};
    for (const auto& p : poly.pts) {
        c.x += p[0];
        c.y += p[1];
    }
    c.x /= static_cast<double>(poly.pts.size());
    c.y /= static_cast<double>(poly.pts.size());
    return c;
}

}  // namespace

std::string rainbow_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double h = 300.0 * t;  // red (0) -> magenta (300)
    const double x = 1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    if (h < 60) {
        r = 1;
        g = x;
    } else if (h < 120) {
        r = x;
        g = 1;
    } else if (h < 180) {
        g = 1;
        b = x;
    } else if (h < 240) {
        g = x;
        b = 1;
    } else {
        r = x;
        b = 1;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(255 * r)),
                  static_cast<int>(std::lround(255 * g)), static_cast<int>(std::lround(255 * b)));
    return buf;
}

std::string render_svg(const EmbeddedMesh& em, const Vector& u, const Vector& q,
                       const RenderSpec& spec) {
    if (em.dim() != 2) throw std::invalid_argument("render_svg: mesh must be 2D");
    if (em.node_xyz.empty()) throw std::invalid_argument("render_svg: missing coordinates");
    const auto& K = em.mesh;

    // bounding box in plot coordinates
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (Index n = 0; n < K.count(0); ++n) {
        const XY p = plot_point(em.chart, em.node_chart[n]);
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span = std::max(xmax - xmin, ymax - ymin);
    const double scale = spec.canvas / (span > 0 ? span : 1.0);
    const double W = (xmax - xmin) * scale + 20, H = (ymax - ymin) * scale + 20;
    auto X = [&](double x) { return (x - xmin) * scale + 10; };
    auto Y = [&](double y) { return H - ((y - ymin) * scale + 10); };  // y up

    double umin = spec.vmin, umax = spec.vmax;
    if (!spec.fixed_range) {
        umin = u.minCoeff();
        umax = u.maxCoeff();
    }
    const double uspan = (umax > umin) ? (umax - umin) : 1.0;

    double qmax = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i) qmax = std::max(qmax, std::abs(q[i]));
    if (qmax == 0) qmax = 1.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\""
       << fmt(H) << "\" viewBox=\"0 0 " << fmt(W) << " " << fmt(H) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // cell fills: mean of node potentials through the rainbow map
    for (Index f = 0; f < K.count(2); ++f) {
        double mean = 0;
        const auto& ns = K.nodes_of(2, f);
        for (Index n : ns) mean += u[n];
        mean /= static_cast<double>(ns.size());
        os << "<polygon points=\"";
        for (const auto& p : cell_outline(em, f)) os << fmt(X(p.x)) << "," << fmt(Y(p.y)) << " ";
        os << "\" fill=\"" << rainbow_color((mean - umin) / uspan) << "\"";
        if (spec.draw_mesh) os << " stroke=\"black\" stroke-width=\"0.6\"";
        os << "/>\n";
    }

    // arrows: across each 1-cell from the positive-orientation coface to the
    // negative one when q > 0 (ghost cell mirror on the boundary)
    double arrow = spec.arrow_length;
    if (arrow < 0) {
        std::vector<double> lens;
        for (Index e = 0; e < K.count(1); ++e) {
            const auto& seg = std::get<SegmentCell>(em.cells[1][e]);
            const XY a = plot_point(em.chart, seg.a);
            const XY b = plot_point(em.chart, seg.b);
            lens.push_back(std::hypot(b.x - a.x, b.y - a.y));
        }
        std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
        arrow = 0.4 * lens[lens.size() / 2];
    }
    for (Index e = 0; e < K.count(1); ++e) {
        if (q[e] == 0.0) continue;  // no arrow for zero flow
        const auto cof = K.complex().cofaces(1, e);
        const XY mid = edge_plot_midpoint(em, e);
        XY vplus{0, 0}, vminus{0, 0};
        bool have_plus = false, have_minus = false;
        for (const auto& fr : cof) {
            const XY c = cell_plot_center(em, 2, fr.face);
            if (fr.sign > 0) {
                vplus = c;
                have_plus = true;
            } else {
                vminus = c;
                have_minus = true;
            }
        }
        if (!have_plus && have_minus) {  // ghost cell beyond the boundary
            vplus = {2 * mid.x - vminus.x, 2 * mid.y - vminus.y};
            have_plus = true;
        }
        if (!have_minus && have_plus) {
            vminus = {2 * mid.x - vplus.x, 2 * mid.y - vplus.y};
            have_minus = true;
        }
        if (!have_plus || !have_minus) continue;
        double dx = vminus.x - vplus.x, dy = vminus.y - vplus.y;  // flow direction for q > 0
        const double norm = std::hypot(dx, dy);
        if (norm == 0) continue;
        dx /= norm;
        dy /= norm;
        if (q[e] < 0) {
            dx = -dx;
            dy = -dy;
        }
        const double half = 0.5 * arrow * scale;
        const double x0 = X(mid.x) - dx * half, y0 = Y(mid.y) + dy * half;
        const double x1 = X(mid.x) + dx * half, y1 = Y(mid.y) - dy * half;
        const std::string col = rainbow_color(std::abs(q[e]) / qmax);
        os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1)
           << "\" y2=\"" << fmt(y1) << "\" stroke=\"" << col << "\" stroke-width=\"1.6\"/>\n";
        // arrowhead
        const double hx = x1 - 0.3 * (x1 - x0), hy = y1 - 0.3 * (y1 - y0);
        const double px = -(y1 - y0) * 0.25, py = (x1 - x0) * 0.25;
        os << "<polygon points=\"" << fmt(x1) << "," << fmt(y1) << " " << fmt(hx + px) << ","
           << fmt(hy + py) << " " << fmt(hx - px) << "," << fmt(hy - py) << "\" fill=\"" << col
           << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_vtk(const EmbeddedMesh& em, const Vector& u, const Vector& q) {
    if (em.dim() != 3) throw std::invalid_argument("render_vtk: mesh must be 3D");
    const auto& K = em.mesh;
    std::ostringstream os;
    os.precision(9);
    os << "# vtk DataFile Version 3.0\n";
    os << "cmc result\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << K.count(0) << " double\n";
    for (Index n = 0; n < K.count(0); ++n)
        os << em.node_xyz[n][0] << " " << em.node_xyz[n][1] << " " << em.node_xyz[n][2] << "\n";

    const Index nhex = K.count(3), nquad = K.count(2);
    os << "CELLS " << (nhex + nquad) << " " << (9 * nhex + 5 * nquad) << "\n";
    auto corner_order = [&](const BoxCell& box, int dim) {
        // VTK hexahedron ordering: bottom quad then top quad (counterclockwise)
        std::vector<ChartPoint> pts;
        if (dim == 3) {
            for (double z : {box.lo[2], box.hi[2]})
                for (auto [x, y] : {std::pair{box.lo[0], box.lo[1]}, {box.hi[0], box.lo[1]},
                                    {box.hi[0], box.hi[1]}, {box.lo[0], box.hi[1]}})
                    pts.push_back({x, y, z});
        } else {
            std::vector<int> axes;
            for (int k = 0; k < 3; ++k)
                if (box.lo[k] != box.hi[k]) axes.push_back(k);
            const int k1 = axes[0], k2 = axes[1];
            for (auto [a, b] : {std::pair{box.lo[k1], box.lo[k2]}, {box.hi[k1], box.lo[k2]},
                                {box.hi[k1], box.hi[k2]}, {box.lo[k1], box.hi[k2]}}) {
                ChartPoint p = box.lo;
                p[k1] = a;
                p[k2] = b;
                pts.push_back(p);
            }
        }
        return pts;
    };
    auto node_at = [&](int dim, Index cell, const ChartPoint& pt) -> Index {
        for (Index n : K.nodes_of(dim, cell)) {
            const auto& nc = em.node_chart[n];
            if (std::abs(nc[0] - pt[0]) < 1e-12 && std::abs(nc[1] - pt[1]) < 1e-12 &&
                std::abs(nc[2] - pt[2]) < 1e-12)
                return n;
        }
        throw std::runtime_error("render_vtk: corner lookup failed");
    };
    for (Index c = 0; c < nhex; ++c) {
        const auto& box = std::get<BoxCell>(em.cells[3][c]);
        os << "8";
        for (const auto& pt : corner_order(box, 3)) os << " " << node_at(3, c, pt);
        os << "\n";
    }
    for (Index f = 0; f < nquad; ++f) {
        const auto& box = std::get<BoxCell>(em.cells[2][f]);
        os << "4";
        for (const auto& pt : corner_order(box, 2)) os << " " << node_at(2, f, pt);
        os << "\n";
    }
    os << "CELL_TYPES " << (nhex + nquad) << "\n";
    for (Index c = 0; c < nhex; ++c) os << "12\n";  // VTK_HEXAHEDRON
    for (Index f = 0; f < nquad; ++f) os << "9\n";  // VTK_QUAD

    os << "POINT_DATA " << K.count(0) << "\n";
    os << "SCALARS u double 1\nLOOKUP_TABLE default\n";
    for (Index n = 0; n < K.count(0); ++n) os << u[n] << "\n";

    os << "CELL_DATA " << (nhex + nquad) << "\n";
    os << "SCALARS q double 1\nLOOKUP_TABLE default\n";
    for (Index c = 0; c < nhex; ++c) os << 0.0 << "\n";
    for (Index f = 0; f < nquad; ++f) os << q[f] << "\n";
    return os.str();
}

}  // namespace cmc
