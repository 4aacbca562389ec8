#include "cmc/cell_complex.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cmc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string ValidationReport::summary() const {
    if (issues.empty()) return "ok";
    std::ostringstream os;
    os << issues.size() << " issue(s):";
    for (const auto& it : issues)
        os << "\n  [" << it.kind << "] cell (" << it.cell.dim << "," << it.cell.index << ") "
           << it.detail;
    return os.str();
}

CellComplex::CellComplex(int dim) : dim_(dim) {
    require(dim >= 0, "complex dimension must be non-negative");
    incidence_.resize(static_cast<std::size_t>(dim) + 1);
}

Index CellComplex::count(int p) const {
    if (p < 0 || p > dim_) return 0;
    if (p == 0) return node_count_;
    return static_cast<Index>(incidence_[p].size());
}

Index CellComplex::total_cells() const {
    Index n = 0;
    for (int p = 0; p <= dim_; ++p) n += count(p);
    return n;
}

Index CellComplex::add_cell(int p, std::vector<FaceRef> faces) {
    require(p >= 1 && p <= dim_, "cell dimension out of range");
    incidence_[p].push_back(std::move(faces));
    return static_cast<Index>(incidence_[p].size()) - 1;
}

void CellComplex::set_node_count(Index n) { node_count_ = n; }

const std::vector<FaceRef>& CellComplex::hyperfaces(int p, Index i) const {
    require(p >= 1 && p <= dim_, "hyperfaces: dimension out of range");
    return incidence_[p].at(static_cast<std::size_t>(i));
}

std::vector<FaceRef>& CellComplex::hyperfaces_mutable(int p, Index i) {
    require(p >= 1 && p <= dim_, "hyperfaces: dimension out of range");
    return incidence_[p].at(static_cast<std::size_t>(i));
}

int CellComplex::sign(CellId cell, Index face) const {
    for (const auto& fr : hyperfaces(cell.dim, cell.index))
        if (fr.face == face) return fr.sign;
    return 0;
}

std::vector<FaceRef> CellComplex::cofaces(int p, Index i) const {
    std::vector<FaceRef> out;
    if (p >= dim_) return out;
    const auto& up = incidence_[p + 1];
    for (Index j = 0; j < static_cast<Index>(up.size()); ++j)
        for (const auto& fr : up[j])
            if (fr.face == i) out.push_back({j, fr.sign});
    return out;
}

std::vector<Index> CellComplex::subfaces(int p, Index i, int q) const {
    require(q >= 0 && q <= p, "subfaces: bad target dimension");
    std::vector<Index> cur{i};
    for (int d = p; d > q; --d) {
        std::set<Index> next;
        for (Index c : cur)
            for (const auto& fr : hyperfaces(d, c)) next.insert(fr.face);
        cur.assign(next.begin(), next.end());
    }
    return cur;
}

SparseMatrix CellComplex::boundary_matrix(int p) const {
    require(p >= 1 && p <= dim_, "boundary_matrix: dimension out of range");
    std::vector<Eigen::Triplet<double>> trips;
    for (Index i = 0; i < count(p); ++i)
        for (const auto& fr : hyperfaces(p, i))
            trips.emplace_back(fr.face, i, static_cast<double>(fr.sign));
    SparseMatrix B(count(p - 1), count(p));
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

SparseMatrix CellComplex::coboundary_matrix(int p) const {
    require(p >= 0 && p < dim_, "coboundary_matrix: dimension out of range");
    return SparseMatrix(boundary_matrix(p + 1).transpose());
}

void CellComplex::flip_cell(int p, Index i) {
    if (p >= 1)
        for (auto& fr : incidence_[p][i]) fr.sign = static_cast<std::int8_t>(-fr.sign);
    if (p < dim_)
        for (auto& cell : incidence_[p + 1])
            for (auto& fr : cell)
                if (fr.face == i) fr.sign = static_cast<std::int8_t>(-fr.sign);
}

bool SubMesh::contains(int p, Index parent_cell) const {
    if (p < 0 || p >= static_cast<int>(from_parent.size())) return false;
    return from_parent[p].count(parent_cell) > 0;
}

Index SubMesh::local_index(int p, Index parent_cell) const {
    auto it = from_parent.at(p).find(parent_cell);
    require(it != from_parent.at(p).end(), "cell not in sub-mesh");
    return it->second;
}

SubMesh build_submesh(const CellComplex& complex, const std::string& name,
                      const std::vector<std::vector<Index>>& seed_cells) {
    const int D = complex.dim();
    std::vector<std::set<Index>> cells(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p < static_cast<int>(seed_cells.size()) && p <= D; ++p)
        for (Index i : seed_cells[p]) {
            for (int q = 0; q <= p; ++q)
                for (Index s : complex.subfaces(p, i, q)) cells[q].insert(s);
        }

    int sub_dim = 0;
    for (int p = 0; p <= D; ++p)
        if (!cells[p].empty()) sub_dim = p;

    SubMesh sub;
    sub.name = name;
    sub.complex = CellComplex(sub_dim);
    sub.to_parent.resize(static_cast<std::size_t>(sub_dim) + 1);
    sub.from_parent.resize(static_cast<std::size_t>(sub_dim) + 1);
    for (int p = 0; p <= sub_dim; ++p) {
        for (Index parent : cells[p]) {
            Index local = static_cast<Index>(sub.to_parent[p].size());
            sub.to_parent[p].push_back(parent);
            sub.from_parent[p][parent] = local;
        }
    }
    sub.complex.set_node_count(static_cast<Index>(sub.to_parent[0].size()));
    for (int p = 1; p <= sub_dim; ++p)
        for (Index parent : sub.to_parent[p]) {
            std::vector<FaceRef> faces;
            for (const auto& fr : complex.hyperfaces(p, parent))
                faces.push_back({sub.from_parent[p - 1].at(fr.face), fr.sign});
            sub.complex.add_cell(p, std::move(faces));
        }
    return sub;
}

Chain boundary(const CellComplex& complex, const Chain& chain) {
    require(chain.dim >= 1 && chain.dim <= complex.dim(), "boundary: bad chain dimension");
    require(chain.coeffs.size() == complex.count(chain.dim), "boundary: wrong chain length");
    Chain out;
    out.dim = chain.dim - 1;
    out.coeffs = Vector::Zero(complex.count(chain.dim - 1));
    for (Index i = 0; i < complex.count(chain.dim); ++i) {
        const double c = chain.coeffs[i];
        if (c == 0.0) continue;
        for (const auto& fr : complex.hyperfaces(chain.dim, i)) out.coeffs[fr.face] += fr.sign * c;
    }
    return out;
}

Cochain coboundary(const CellComplex& complex, const Cochain& cochain) {
    require(cochain.dim >= 0 && cochain.dim < complex.dim(), "coboundary: bad cochain dimension");
    require(cochain.values.size() == complex.count(cochain.dim), "coboundary: wrong length");
    Cochain out;
    out.dim = cochain.dim + 1;
    out.values = Vector::Zero(complex.count(cochain.dim + 1));
    for (Index i = 0; i < complex.count(cochain.dim + 1); ++i) {
        double v = 0;
        for (const auto& fr : complex.hyperfaces(cochain.dim + 1, i))
            v += fr.sign * cochain.values[fr.face];
        out.values[i] = v;
    }
    return out;
}

Cochain trace(const CellComplex& complex, const SubMesh& sub, const Cochain& cochain) {
    require(cochain.dim <= sub.complex.dim(), "trace: cochain degree exceeds sub-mesh dimension");
    require(cochain.values.size() == complex.count(cochain.dim), "trace: wrong length");
    Cochain out;
    out.dim = cochain.dim;
    out.units = cochain.units;
    const auto& map = sub.to_parent.at(cochain.dim);
    out.values = Vector::Zero(static_cast<Index>(map.size()));
    for (Index local = 0; local < static_cast<Index>(map.size()); ++local) {
        require(map[local] < complex.count(cochain.dim), "trace: sub-mesh cell missing from complex");
        out.values[local] = cochain.values[map[local]];
    }
    return out;
}

std::vector<Index> boundary_cells(const CellComplex& complex) {
    const int D = complex.dim();
    std::vector<int> ncof(static_cast<std::size_t>(complex.count(D - 1)), 0);
    for (Index i = 0; i < complex.count(D); ++i)
        for (const auto& fr : complex.hyperfaces(D, i)) ncof[fr.face]++;
    std::vector<Index> out;
    for (Index c = 0; c < complex.count(D - 1); ++c)
        if (ncof[c] == 1) out.push_back(c);
    return out;
}

bool check_compatible_orientation(const CellComplex& complex, std::vector<Index>* offenders) {
    const int D = complex.dim();
    if (D == 0) return true;
    std::vector<int> sum(static_cast<std::size_t>(complex.count(D - 1)), 0);
    std::vector<int> cnt(static_cast<std::size_t>(complex.count(D - 1)), 0);
    for (Index i = 0; i < complex.count(D); ++i)
        for (const auto& fr : complex.hyperfaces(D, i)) {
            sum[fr.face] += fr.sign;
            cnt[fr.face]++;
        }
    bool ok = true;
    for (Index c = 0; c < complex.count(D - 1); ++c)
        if (cnt[c] == 2 && sum[c] != 0) {
            ok = false;
            if (offenders) offenders->push_back(c);
        }
    return ok;
}

Chain fundamental_class(const CellComplex& complex) {
    std::vector<Index> offenders;
    if (!check_compatible_orientation(complex, &offenders)) {
        std::ostringstream os;
        os << "fundamental_class: complex is not compatibly oriented at " << offenders.size()
           << " interior cell(s), first offender " << offenders.front();
        throw std::runtime_error(os.str());
    }
    Chain out;
    out.dim = complex.dim();
    out.coeffs = Vector::Ones(complex.count(complex.dim()));
    return out;
}

double integrate(const CellComplex& complex, const Cochain& cochain) {
    require(cochain.dim == complex.dim(), "integrate: cochain must have top degree");
    require(cochain.values.size() == complex.count(complex.dim()), "integrate: wrong length");
    fundamental_class(complex);  // compatibility gate
    return cochain.values.sum();
}

void orient_top_cells(CellComplex& complex) {
    const int D = complex.dim();
    if (D == 0) return;
    const Index n = complex.count(D);

    // adjacency over interior (D-1)-cells
    std::vector<std::vector<Index>> touching(static_cast<std::size_t>(complex.count(D - 1)));
    for (Index i = 0; i < n; ++i)
        for (const auto& fr : complex.hyperfaces(D, i)) touching[fr.face].push_back(i);

    std::vector<int> flip(static_cast<std::size_t>(n), 0);  // 0 unvisited, +1 keep, -1 flip
    for (Index seed = 0; seed < n; ++seed) {
        if (flip[seed] != 0) continue;
        flip[seed] = 1;
        std::queue<Index> q;
        q.push(seed);
        while (!q.empty()) {
            const Index a = q.front();
            q.pop();
            for (const auto& fa : complex.hyperfaces(D, a)) {
                for (Index b : touching[fa.face]) {
                    if (b == a) continue;
                    const int sb = complex.sign({D, b}, fa.face);
                    // want flip[a]*eps(a,c) == -flip[b]*eps(b,c)
                    const int want = -flip[a] * fa.sign * sb;
                    if (flip[b] == 0) {
                        flip[b] = want;
                        q.push(b);
                    } else if (flip[b] != want) {
                        throw std::runtime_error(
                            "orient_top_cells: contradictory signs (non-orientable input)");
                    }
                }
            }
        }
    }
    for (Index i = 0; i < n; ++i)
        if (flip[i] < 0)
            for (auto& fr : complex.hyperfaces_mutable(D, i))
                fr.sign = static_cast<std::int8_t>(-fr.sign);
}

void normalize_node_orientations(CellComplex& complex) {
    if (complex.dim() < 1) return;
    const Index nn = complex.count(0);
    // per-edge constraint: f(a) sign(e,a) = -f(b) sign(e,b)
    struct Arc {
        Index other;
        int rel;  // f(other) = rel * f(node)
    };
    std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(nn));
    for (Index e = 0; e < complex.count(1); ++e) {
        const auto& fs = complex.hyperfaces(1, e);
        if (fs.size() != 2) continue;
        const int rel = -fs[0].sign * fs[1].sign;
        adj[fs[0].face].push_back({fs[1].face, rel});
        adj[fs[1].face].push_back({fs[0].face, rel});
    }
    std::vector<int> flip(static_cast<std::size_t>(nn), 0);
    for (Index seed = 0; seed < nn; ++seed) {
        if (flip[seed] != 0) continue;
        flip[seed] = 1;
        std::queue<Index> q;
        q.push(seed);
        while (!q.empty()) {
            const Index n = q.front();
            q.pop();
            for (const auto& arc : adj[n]) {
                const int want = arc.rel * flip[n];
                if (flip[arc.other] == 0) {
                    flip[arc.other] = want;
                    q.push(arc.other);
                } else if (flip[arc.other] != want) {
                    throw std::runtime_error(
                        "normalize_node_orientations: inconsistent edge signs");
                }
            }
        }
    }
    for (Index n = 0; n < nn; ++n)
        if (flip[n] < 0) complex.flip_cell(0, n);
}

ValidationReport validate(const CellComplex& complex) {
    ValidationReport rep;
    const int D = complex.dim();

    // chain-complex property on basis chains
    for (int p = 2; p <= D; ++p) {
        for (Index i = 0; i < complex.count(p); ++i) {
            std::map<Index, int> acc;
            for (const auto& fb : complex.hyperfaces(p, i))
                for (const auto& fc : complex.hyperfaces(p - 1, fb.face))
                    acc[fc.face] += fb.sign * fc.sign;
            for (const auto& [c, v] : acc)
                if (v != 0) {
                    rep.issues.push_back({"chain-complex", {p, i},
                                          "dd != 0 at (" + std::to_string(p - 2) + "," +
                                              std::to_string(c) + ")"});
                    break;
                }
        }
    }

    // diamond property: between any p-cell and (p-2)-subface lie exactly two cells
    for (int p = 2; p <= D; ++p) {
        for (Index i = 0; i < complex.count(p); ++i) {
            std::map<Index, int> between;
            for (const auto& fb : complex.hyperfaces(p, i))
                for (const auto& fc : complex.hyperfaces(p - 1, fb.face)) between[fc.face]++;
            for (const auto& [c, k] : between)
                if (k != 2)
                    rep.issues.push_back({"diamond", {p, i},
                                          std::to_string(k) + " cells between it and (" +
                                              std::to_string(p - 2) + "," + std::to_string(c) + ")"});
        }
    }

    // each (D-1)-cell is a hyperface of at most two D-cells
    if (D >= 1) {
        std::vector<int> cnt(static_cast<std::size_t>(complex.count(D - 1)), 0);
        for (Index i = 0; i < complex.count(D); ++i)
            for (const auto& fr : complex.hyperfaces(D, i)) cnt[fr.face]++;
        for (Index c = 0; c < complex.count(D - 1); ++c)
            if (cnt[c] > 2)
                rep.issues.push_back({"coface-count", {D - 1, c},
                                      std::to_string(cnt[c]) + " cofaces (max 2)"});
    }

    // grading: every listed hyperface index must exist one dimension below
    for (int p = 1; p <= D; ++p)
        for (Index i = 0; i < complex.count(p); ++i)
            for (const auto& fr : complex.hyperfaces(p, i))
                if (fr.face < 0 || fr.face >= complex.count(p - 1))
                    rep.issues.push_back({"grading", {p, i},
                                          "hyperface index " + std::to_string(fr.face) +
                                              " out of range"});

    // labels closed under the subface relation
    for (const auto& [name, cells] : complex.labels) {
        std::vector<std::set<Index>> have(static_cast<std::size_t>(D) + 1);
        for (int p = 0; p < static_cast<int>(cells.size()) && p <= D; ++p)
            have[p].insert(cells[p].begin(), cells[p].end());
        for (int p = 1; p <= D; ++p)
            for (Index i : have[p])
                for (const auto& fr : complex.hyperfaces(p, i))
                    if (!have[p - 1].count(fr.face))
                        rep.issues.push_back({"label-closure", {p, i},
                                              "label '" + name + "' is missing subface (" +
                                                  std::to_string(p - 1) + "," +
                                                  std::to_string(fr.face) + ")"});
    }
    return rep;
}

}  // namespace cmc
