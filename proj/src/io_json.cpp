#include "cmc/io_json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cmc {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector vector_from_json(const json& a) {
    Vector v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
    return v;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f.good()) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f.good()) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string write_mesh_json(const CellComplex& complex,
                            const std::vector<ChartPoint>* coordinates,
                            const std::vector<Vector>* measures,
                            const std::vector<std::vector<IntervalCell>>* interval_map) {
    json j;
    j["format"] = "cmc-mesh";
    j["version"] = 1;
    j["dim"] = complex.dim();
    json counts = json::array();
    for (int p = 0; p <= complex.dim(); ++p) counts.push_back(complex.count(p));
    j["counts"] = counts;

    json inc = json::array();
    for (int p = 1; p <= complex.dim(); ++p) {
        json per_dim = json::array();
        for (Index i = 0; i < complex.count(p); ++i) {
            json cell = json::array();
            for (const auto& fr : complex.hyperfaces(p, i))
                cell.push_back(json::array({fr.face, static_cast<int>(fr.sign)}));
            per_dim.push_back(cell);
        }
        inc.push_back(per_dim);
    }
    j["incidence"] = inc;

    if (!complex.labels.empty()) {
        json labels = json::object();
        for (const auto& [name, cells] : complex.labels) {
            json per_dim = json::array();
            for (const auto& v : cells) per_dim.push_back(v);
            labels[name] = per_dim;
        }
        j["labels"] = labels;
    }
    if (coordinates) {
        json coords = json::array();
        for (const auto& p : *coordinates) coords.push_back(json::array({p[0], p[1], p[2]}));
        j["coordinates"] = coords;
    }
    if (measures) {
        json ms = json::array();
        for (const auto& v : *measures) ms.push_back(vector_to_json(v));
        j["measures"] = ms;
    }
    if (interval_map) {
        json ivs = json::array();
        for (const auto& per_dim : *interval_map) {
            json a = json::array();
            for (const auto& iv : per_dim)
                a.push_back(json::array(
                    {iv.lower.dim, iv.lower.index, iv.upper.dim, iv.upper.index}));
            ivs.push_back(a);
        }
        j["interval_map"] = ivs;
    }
    return j.dump(1);
}

MeshFile read_mesh_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.value("format", std::string("cmc-mesh")) != "cmc-mesh")
        throw std::runtime_error("read_mesh_json: not a cmc-mesh file");
    const int D = j.at("dim").get<int>();
    MeshFile out;
    out.complex = CellComplex(D);
    const auto counts = j.at("counts");
    out.complex.set_node_count(counts.at(0).get<Index>());
    const auto& inc = j.at("incidence");
    for (int p = 1; p <= D; ++p) {
        const auto& per_dim = inc.at(p - 1);
        if (static_cast<Index>(per_dim.size()) != counts.at(p).get<Index>())
            throw std::runtime_error("read_mesh_json: counts/incidence mismatch");
        for (const auto& cell : per_dim) {
            std::vector<FaceRef> faces;
            for (const auto& e : cell)
                faces.push_back({e.at(0).get<Index>(),
                                 static_cast<std::int8_t>(e.at(1).get<int>())});
            out.complex.add_cell(p, std::move(faces));
        }
    }
    normalize_node_orientations(out.complex);
    if (j.contains("labels"))
        for (const auto& [name, per_dim] : j.at("labels").items()) {
            std::vector<std::vector<Index>> cells;
            for (const auto& v : per_dim) cells.push_back(v.get<std::vector<Index>>());
            out.complex.labels[name] = std::move(cells);
        }
    if (j.contains("coordinates")) {
        std::vector<ChartPoint> coords;
        for (const auto& p : j.at("coordinates")) {
            ChartPoint pt{0, 0, 0};
            for (std::size_t k = 0; k < p.size() && k < 3; ++k) pt[k] = p[k].get<double>();
            coords.push_back(pt);
        }
        out.coordinates = std::move(coords);
    }
    if (j.contains("measures")) {
        std::vector<Vector> ms;
        for (const auto& v : j.at("measures")) ms.push_back(vector_from_json(v));
        out.measures = std::move(ms);
    }
    if (j.contains("interval_map")) {
        std::vector<std::vector<IntervalCell>> ivs;
        for (const auto& per_dim : j.at("interval_map")) {
            std::vector<IntervalCell> v;
            for (const auto& e : per_dim)
                v.push_back({{e.at(0).get<int>(), e.at(1).get<Index>()},
                             {e.at(2).get<int>(), e.at(3).get<Index>()}});
            ivs.push_back(std::move(v));
        }
        out.interval_map = std::move(ivs);
    }
    return out;
}

std::string write_problem_json(const QuasiCubicalMesh& K, const TransportProblem& prob,
                               const std::string& mesh_ref, const Cochain* exact_u,
                               const Cochain* exact_q) {
    const int D = K.dim();
    json j;
    j["format"] = "cmc-problem";
    j["version"] = 1;
    j["mesh"] = mesh_ref;
    j["kappa"] = vector_to_json(prob.kappa);
    j["kappa_tilde"] = vector_to_json(prob.kappa_tilde);
    j["pi"] = vector_to_json(prob.pi);
    j["pi_tilde"] = vector_to_json(prob.pi_tilde);
    j["f"] = vector_to_json(prob.f.values);
    if (prob.v) j["v"] = vector_to_json(prob.v->values);

    json dir;
    dir["cells"] = prob.gamma_d.to_parent.size() > static_cast<std::size_t>(D - 1)
                       ? json(prob.gamma_d.to_parent[D - 1])
                       : json::array();
    dir["nodes"] = prob.gamma_d.to_parent.empty() ? json::array()
                                                  : json(prob.gamma_d.to_parent[0]);
    dir["values"] = vector_to_json(prob.g_d);
    j["dirichlet"] = dir;

    json neu;
    neu["cells"] = prob.gamma_n.to_parent.size() > static_cast<std::size_t>(D - 1)
                       ? json(prob.gamma_n.to_parent[D - 1])
                       : json::array();
    neu["values"] = vector_to_json(prob.g_n);
    j["neumann"] = neu;

    if (prob.transient) {
        json t;
        t["t0"] = prob.transient->t0;
        t["dt"] = prob.transient->dt;
        t["steps"] = prob.transient->steps;
        t["theta"] = prob.transient->theta;
        t["u0"] = vector_to_json(prob.transient->u0);
        j["transient"] = t;
    }
    if (exact_u) j["exact_u"] = vector_to_json(exact_u->values);
    if (exact_q) j["exact_q"] = vector_to_json(exact_q->values);
    return j.dump(1);
}

ProblemFile read_problem_json(const std::string& text, const QuasiCubicalMesh& K) {
    const json j = json::parse(text);
    if (j.value("format", std::string("cmc-problem")) != "cmc-problem")
        throw std::runtime_error("read_problem_json: not a cmc-problem file");
    const int D = K.dim();
    ProblemFile out;
    out.mesh_ref = j.value("mesh", std::string());
    auto broadcast = [&](const json& v, Index n) {
        if (v.is_number()) return Vector::Constant(n, v.get<double>()).eval();
        return vector_from_json(v);
    };
    TransportProblem& prob = out.problem;
    if (j.contains("kappa")) prob.kappa = broadcast(j.at("kappa"), K.count(D - 1));
    if (j.contains("kappa_tilde"))
        prob.kappa_tilde = broadcast(j.at("kappa_tilde"), K.count(1));
    else if (D == 2 && j.contains("kappa"))
        prob.kappa_tilde = prob.kappa;
    if (j.contains("pi")) prob.pi = broadcast(j.at("pi"), K.count(D));
    if (j.contains("pi_tilde")) prob.pi_tilde = broadcast(j.at("pi_tilde"), K.count(0));
    prob.f = Cochain{D, j.contains("f") ? vector_from_json(j.at("f"))
                                        : Vector::Zero(K.count(D)),
                     ""};
    if (j.contains("v")) prob.v = Cochain{D - 1, vector_from_json(j.at("v")), ""};

    std::vector<std::vector<Index>> dcells(static_cast<std::size_t>(D));
    dcells[D - 1] = j.at("dirichlet").at("cells").get<std::vector<Index>>();
    prob.gamma_d = build_submesh(K.complex(), "gamma_d", dcells);
    std::vector<std::vector<Index>> ncells(static_cast<std::size_t>(D));
    ncells[D - 1] = j.at("neumann").at("cells").get<std::vector<Index>>();
    prob.gamma_n = build_submesh(K.complex(), "gamma_n", ncells);

    // g_d arrives ordered by the file's node list; re-order to local indexing
    const auto file_nodes = j.at("dirichlet").at("nodes").get<std::vector<Index>>();
    const Vector file_vals = vector_from_json(j.at("dirichlet").at("values"));
    if (static_cast<Index>(file_nodes.size()) != file_vals.size())
        throw std::runtime_error("read_problem_json: dirichlet nodes/values length mismatch");
    prob.g_d = Vector::Zero(prob.gamma_d.to_parent.empty()
                                ? 0
                                : static_cast<Index>(prob.gamma_d.to_parent[0].size()));
    for (std::size_t i = 0; i < file_nodes.size(); ++i)
        prob.g_d[prob.gamma_d.local_index(0, file_nodes[i])] = file_vals[static_cast<Index>(i)];

    const auto file_ncells = j.at("neumann").at("cells").get<std::vector<Index>>();
    const Vector nvals = vector_from_json(j.at("neumann").at("values"));
    prob.g_n = Vector::Zero(static_cast<Index>(file_ncells.size()));
    for (std::size_t i = 0; i < file_ncells.size(); ++i)
        prob.g_n[prob.gamma_n.local_index(D - 1, file_ncells[i])] = nvals[static_cast<Index>(i)];

    if (j.contains("transient")) {
        TransientParams tp;
        const auto& t = j.at("transient");
        tp.t0 = t.value("t0", 0.0);
        tp.dt = t.at("dt").get<double>();
        tp.steps = t.at("steps").get<int>();
        tp.theta = t.value("theta", 0.5);
        tp.u0 = t.contains("u0") ? vector_from_json(t.at("u0")) : Vector::Zero(K.count(0));
        prob.transient = tp;
    }
    if (j.contains("exact_u")) out.exact_u = Cochain{0, vector_from_json(j.at("exact_u")), ""};
    if (j.contains("exact_q"))
        out.exact_q = Cochain{D - 1, vector_from_json(j.at("exact_q")), ""};

    prob.finalize(K);
    return out;
}

std::string write_result_json(const SolveResult& result,
                              const std::optional<ErrorReport>& errors) {
    json j;
    j["format"] = "cmc-result";
    j["version"] = 1;
    j["u"] = vector_to_json(result.u);
    j["q"] = vector_to_json(result.q);
    if (result.q_raw.size() > 0) j["q_raw"] = vector_to_json(result.q_raw);
    if (result.u_tilde) j["u_tilde"] = vector_to_json(*result.u_tilde);
    if (errors) {
        j["errors"] = {{"u_rel", errors->u_rel}, {"q_rel", errors->q_rel}};
    }
    if (!result.series.empty()) {
        json series = json::array();
        for (const auto& s : result.series) {
            json e;
            e["t"] = s.t;
            e["u"] = vector_to_json(s.u);
            e["q"] = vector_to_json(s.q);
            e["amount_increment"] = vector_to_json(s.amount_increment);
            series.push_back(e);
        }
        j["series"] = series;
    }
    return j.dump(1);
}

}  // namespace cmc
