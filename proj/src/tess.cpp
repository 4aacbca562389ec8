#include "cmc/tess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cmc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

PolygonMesh parse_tess_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);

    auto section_start = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            auto toks = tokenize(lines[i]);
            if (!toks.empty() && toks[0] == name) return i;
        }
        return lines.size();
    };

    for (const auto& l : lines) {
        auto toks = tokenize(l);
        if (toks.empty()) continue;
        if (toks[0].rfind("**", 0) == 0 && toks[0].rfind("***", 0) != 0 &&
            toks[0] != "**vertex" && toks[0] != "**edge" && toks[0] != "**face" &&
            toks[0] != "**format" && toks[0] != "**general" && toks[0] != "**cell")
            std::cerr << "import_tess: skipping section " << toks[0] << "\n";
    }

    PolygonMesh out;
    out.complex = CellComplex(2);

    // **vertex: count, then "id x y z state"
    std::size_t i = section_start("**vertex");
    require(i < lines.size(), "import_tess: missing **vertex section");
    ++i;
    const int nv = std::stoi(tokenize(lines[i])[0]);
    std::map<int, Index> vid;
    for (int k = 0; k < nv; ++k) {
        ++i;
        auto t = tokenize(lines[i]);
        require(t.size() >= 4, "import_tess: malformed vertex line");
        vid[std::stoi(t[0])] = static_cast<Index>(out.nodes.size());
        out.nodes.push_back({std::stod(t[1]), std::stod(t[2]), 0.0});
    }
    out.complex.set_node_count(static_cast<Index>(out.nodes.size()));

    // **edge: count, then "id v1 v2 state"
    i = section_start("**edge");
    require(i < lines.size(), "import_tess: missing **edge section");
    ++i;
    const int ne = std::stoi(tokenize(lines[i])[0]);
    std::map<int, Index> eid;
    for (int k = 0; k < ne; ++k) {
        ++i;
        auto t = tokenize(lines[i]);
        require(t.size() >= 3, "import_tess: malformed edge line");
        const Index a = vid.at(std::stoi(t[1]));
        const Index b = vid.at(std::stoi(t[2]));
        eid[std::stoi(t[0])] = out.complex.add_cell(1, {{a, -1}, {b, 1}});
    }

    // **face: count, then per face four lines:
    //   id ; vertex list ; signed edge list ; face equation
    i = section_start("**face");
    require(i < lines.size(), "import_tess: missing **face section");
    ++i;
    const int nf = std::stoi(tokenize(lines[i])[0]);
    for (int k = 0; k < nf; ++k) {
        ++i;  // id line
        ++i;  // vertex list line
        ++i;  // signed edge list line
        auto t = tokenize(lines[i]);
        require(!t.empty(), "import_tess: malformed face section");
        const int nfe = std::stoi(t[0]);
        require(static_cast<int>(t.size()) >= 1 + nfe, "import_tess: short face edge list");
        std::vector<FaceRef> faces;
        for (int m = 0; m < nfe; ++m) {
            const int signed_id = std::stoi(t[1 + m]);
            faces.push_back({eid.at(std::abs(signed_id)), 1});
        }
        std::sort(faces.begin(), faces.end(),
                  [](const FaceRef& x, const FaceRef& y) { return x.face < y.face; });
        out.complex.add_cell(2, std::move(faces));
        ++i;  // face equation line
    }

    auto rep = check_simple_polytopes(out.complex);
    if (!rep.ok()) throw std::runtime_error("import_tess: non-simple polygon: " + rep.summary());
    return out;
}

PolygonMesh import_tess(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "import_tess: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_tess_text(ss.str());
}

// ---------------------------------------------------------------------------
// Voronoi generator (half-plane clipping against the bounding rectangle)
// ---------------------------------------------------------------------------

namespace {

struct Pt {
    double x, y;
};

// clip convex polygon by the half plane {p : dot(p, n) <= d}
std::vector<Pt> clip_halfplane(const std::vector<Pt>& poly, double nx, double ny, double d) {
    std::vector<Pt> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt& a = poly[i];
        const Pt& b = poly[(i + 1) % n];
        const double da = a.x * nx + a.y * ny - d;
        const double db = b.x * nx + b.y * ny - d;
        if (da <= 1e-12) out.push_back(a);
        if ((da < -1e-12 && db > 1e-12) || (da > 1e-12 && db < -1e-12)) {
            const double t = da / (da - db);
            out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    return out;
}

}  // namespace

std::string generate_voronoi_tess(int n, double w, double h, unsigned seed) {
    require(n >= 1, "generate_voronoi_tess: need at least one site");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(0.08 * w, 0.92 * w), uy(0.08 * h, 0.92 * h);
    std::vector<Pt> sites(static_cast<std::size_t>(n));
    for (auto& s : sites) s = {ux(rng), uy(rng)};

    // cell of each site: rectangle clipped by all bisectors
    std::vector<std::vector<Pt>> cells(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        std::vector<Pt> poly{{0, 0}, {w, 0}, {w, h}, {0, h}};
        for (std::size_t j = 0; j < sites.size() && !poly.empty(); ++j) {
            if (i == j) continue;
            const double nx = sites[j].x - sites[i].x;
            const double ny = sites[j].y - sites[i].y;
            const double d = 0.5 * (sites[j].x * sites[j].x - sites[i].x * sites[i].x +
                                    sites[j].y * sites[j].y - sites[i].y * sites[i].y);
            poly = clip_halfplane(poly, nx, ny, d);
        }
        require(poly.size() >= 3, "generate_voronoi_tess: degenerate cell");
        cells[i] = poly;
    }

    // merge coincident vertices, build edge/face tables
    auto key_of = [](const Pt& p) {
        return std::make_pair(std::llround(p.x * 1e7), std::llround(p.y * 1e7));
    };
    std::map<std::pair<long long, long long>, int> vmap;
    std::vector<Pt> verts;
    std::map<std::pair<int, int>, int> emap;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> face_vertices(cells.size());
    std::vector<std::vector<int>> face_edges(cells.size());  // signed, 1-based

    for (std::size_t i = 0; i < cells.size(); ++i) {
        // CCW order
        double a2 = 0;
        const auto& poly = cells[i];
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const auto& p = poly[k];
            const auto& q = poly[(k + 1) % poly.size()];
            a2 += p.x * q.y - q.x * p.y;
        }
        std::vector<Pt> ccw = poly;
        if (a2 < 0) std::reverse(ccw.begin(), ccw.end());

        std::vector<int> vids;
        for (const auto& p : ccw) {
            const auto key = key_of(p);
            auto it = vmap.find(key);
            if (it == vmap.end()) {
                it = vmap.emplace(key, static_cast<int>(verts.size())).first;
                verts.push_back(p);
            }
            if (vids.empty() || vids.back() != it->second) vids.push_back(it->second);
        }
        if (vids.size() >= 2 && vids.front() == vids.back()) vids.pop_back();
        require(vids.size() >= 3, "generate_voronoi_tess: collapsed cell");
        face_vertices[i] = vids;
        for (std::size_t k = 0; k < vids.size(); ++k) {
            int a = vids[k], b = vids[(k + 1) % vids.size()];
            const bool fwd = a < b;
            const auto key = std::minmax(a, b);
            auto it = emap.find(key);
            if (it == emap.end()) {
                it = emap.emplace(key, static_cast<int>(edges.size())).first;
                edges.push_back({key.first, key.second});
            }
            face_edges[i].push_back((fwd ? 1 : -1) * (it->second + 1));
        }
    }

    std::ostringstream os;
    os.precision(12);
    os << "***tess\n";
    os << " **format\n   2.0\n";
    os << " **general\n   2 standard\n";
    os << " **cell\n   " << n << "\n";
    os << " **vertex\n " << verts.size() << "\n";
    for (std::size_t i = 0; i < verts.size(); ++i)
        os << " " << (i + 1) << " " << verts[i].x << " " << verts[i].y << " 0.0 0\n";
    os << " **edge\n " << edges.size() << "\n";
    for (std::size_t i = 0; i < edges.size(); ++i)
        os << " " << (i + 1) << " " << (edges[i].first + 1) << " " << (edges[i].second + 1)
           << " 0\n";
    os << " **face\n " << cells.size() << "\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        os << " " << (i + 1) << "\n";
        os << "   " << face_vertices[i].size();
        for (int v : face_vertices[i]) os << " " << (v + 1);
        os << "\n";
        os << "   " << face_edges[i].size();
        for (int e : face_edges[i]) os << " " << e;
        os << "\n";
        os << "   0.0 0.0 1.0 0.0\n";
    }
    os << "***end\n";
    return os.str();
}

}  // namespace cmc
