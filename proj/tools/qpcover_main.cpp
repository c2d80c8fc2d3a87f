#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpcover/document.hpp"
#include "qpcover/errors.hpp"
#include "qpcover/grading.hpp"
#include "qpcover/grassmannian.hpp"
#include "qpcover/scattering.hpp"
#include "qpcover/surface.hpp"
#include "qpcover/truncated_algebra.hpp"

using json = nlohmann::ordered_json;
using namespace qpcover;

namespace {

struct Output {
    bool as_json = false;
    json j = json::object();
    std::ostringstream text;

    void emit() {
        if (as_json)
            std::cout << j.dump(2) << "\n";
        else
            std::cout << text.str();
    }
};

struct Workspace {
    DocumentModel model;

    explicit Workspace(const std::string& input_file) {
        merge_documents(model, fixture_registry());
        if (!input_file.empty()) {
            std::ifstream in(input_file);
            if (!in) throw InputError("cannot open input file '" + input_file + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            merge_documents(model, parse_document(ss.str()));
        }
    }

    /// Base potential of a cover: explicit name, else "<base quiver>-w",
    /// else the zero potential.
    Potential base_potential(const std::string& cover_name, const std::string& override_name) {
        const CoverEntry& e = model.cover(cover_name);
        if (!override_name.empty()) return model.potential_for(e.base_name, override_name);
        std::string def = e.base_name + "-w";
        if (model.potentials.count(def)) return model.potential_for(e.base_name, def);
        return Potential(*e.covering->base_ptr());
    }
};

DimVec parse_dimvec(const std::string& s, int len) {
    DimVec n;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) n.push_back(std::stoll(tok));
    if (static_cast<int>(n.size()) != len)
        throw InputError("dimension vector '" + s + "' must have " + std::to_string(len) +
                         " entries");
    for (long long x : n)
        if (x < 0) throw InputError("dimension vector entries must be nonnegative");
    return n;
}

EulerOptions euler_options_from_env(const std::string& method) {
    EulerOptions opts;
    if (method == "loc") opts.force_method = EulerMethod::Localization;
    if (method == "ff") opts.force_method = EulerMethod::FiniteField;
    if (const char* env = std::getenv("QPCOVER_PRIMES")) {
        opts.primes.clear();
        std::istringstream in(env);
        std::string tok;
        while (std::getline(in, tok, ',')) opts.primes.push_back(std::stoll(tok));
    }
    return opts;
}

std::string expo_label(const Quiver& q, const Expo& n) {
    std::ostringstream os;
    for (size_t i = 0; i < n.size(); ++i) {
        if (i) os << ",";
        os << n[i];
    }
    (void)q;
    return os.str();
}

json wall_json(const Seed& sd, const Wall& w) {
    json jw;
    jw["normal"] = w.normal;
    jw["kind"] = w.kind == Wall::Kind::Hyperplane ? "hyperplane" : "ray";
    if (w.kind == Wall::Kind::Ray) jw["direction"] = {w.ray_dir.first, w.ray_dir.second};
    jw["incoming"] = w.incoming;
    json ham = json::object();
    for (const auto& [m, c] : w.ham) ham[std::to_string(m)] = rat_str(c);
    jw["hamiltonian"] = ham;
    (void)sd;
    return jw;
}

std::string wall_text(const Wall& w) {
    std::ostringstream os;
    os << (w.kind == Wall::Kind::Hyperplane ? "hyperplane" : "ray") << " normal=(";
    for (size_t i = 0; i < w.normal.size(); ++i) os << (i ? "," : "") << w.normal[i];
    os << ")";
    if (w.kind == Wall::Kind::Ray)
        os << " dir=(" << w.ray_dir.first << "," << w.ray_dir.second << ")";
    os << (w.incoming ? " incoming" : " outgoing") << " ham:";
    for (const auto& [m, c] : w.ham) os << " " << m << ":" << rat_str(c);
    return os.str();
}

int cmd_fixtures_list(Output& out) {
    const DocumentModel& reg = fixture_registry();
    json quivers = json::array(), potentials = json::array(), covers = json::array(),
         seeds = json::array();
    for (const auto& [kind, name] : reg.declaration_order) {
        if (kind == "quiver") quivers.push_back(name);
        if (kind == "potential") potentials.push_back(name);
        if (kind == "cover") covers.push_back(name);
        if (kind == "seed") seeds.push_back(name);
    }
    out.j["quivers"] = quivers;
    out.j["potentials"] = potentials;
    out.j["covers"] = covers;
    out.j["seeds"] = seeds;
    out.text << "quivers:";
    for (const auto& n : quivers) out.text << " " << n.get<std::string>();
    out.text << "\npotentials:";
    for (const auto& n : potentials) out.text << " " << n.get<std::string>();
    out.text << "\ncovers:";
    for (const auto& n : covers) out.text << " " << n.get<std::string>();
    out.text << "\nseeds:";
    for (const auto& n : seeds) out.text << " " << n.get<std::string>();
    out.text << "\n";
    return 0;
}

int cmd_validate(Workspace& ws, Output& out, const std::string& cover) {
    ValidationReport rep = ws.model.cover(cover).covering->validate();
    out.j["cover"] = cover;
    out.j["valid"] = rep.ok();
    out.j["failures"] = rep.failures;
    if (rep.ok()) {
        out.text << "cover " << cover << ": valid\n";
        return 0;
    }
    out.text << "cover " << cover << ": INVALID\n";
    for (const auto& f : rep.failures) out.text << "  " << f << "\n";
    return 1;
}

int cmd_jacobian(Workspace& ws, Output& out, const std::string& quiver,
                 const std::string& potential, int order, const std::string& projective) {
    const Quiver& q = ws.model.quiver(quiver);
    Potential w = ws.model.potential_for(quiver, potential);
    TruncatedJacobianAlgebra alg(q, w, order);
    out.j["quiver"] = quiver;
    out.j["order"] = order;
    out.j["dimension"] = alg.dimension();
    out.text << "dim A^" << order << " = " << alg.dimension() << "\n";
    if (!projective.empty()) {
        auto k = q.vertex_index(projective);
        if (!k) throw InputError("unknown vertex '" + projective + "'");
        ProjectiveModulePresentation p = projective_presentation(alg, *k);
        json jb = json::array();
        out.text << "P_" << projective << "^" << order << " basis:";
        for (const auto& path : p.basis) {
            jb.push_back(path.str());
            out.text << " " << path.str();
        }
        out.text << "\n";
        json jd = json::object();
        out.text << "dimension vector:";
        for (int v = 0; v < q.vertex_count(); ++v) {
            jd[q.vertex(v).name] = p.mod.dims[v];
            out.text << " " << q.vertex(v).name << ":" << p.mod.dims[v];
        }
        out.text << "\n";
        out.j["projective"] = {{"vertex", projective}, {"basis", jb}, {"dimension_vector", jd}};
    }
    return 0;
}

int cmd_supports(Workspace& ws, Output& out, const std::string& quiver,
                 const std::string& potential, int order, const std::string& projective) {
    const Quiver& q = ws.model.quiver(quiver);
    Potential w = ws.model.potential_for(quiver, potential);
    TruncatedJacobianAlgebra alg(q, w, order);
    auto k = q.vertex_index(projective);
    if (!k) throw InputError("unknown vertex '" + projective + "'");
    ProjectiveModulePresentation p = projective_presentation(alg, *k);
    SupportData s = supports(p.mod);
    json jv = json::array(), ja = json::array();
    out.text << "supp_Q0(P_" << projective << "):";
    for (int v : s.vertices) {
        jv.push_back(q.vertex(v).name);
        out.text << " " << q.vertex(v).name;
    }
    out.text << "\nsupp_Q1(P_" << projective << "):";
    for (int a : s.arrows) {
        ja.push_back(q.arrow(a).name);
        out.text << " " << q.arrow(a).name;
    }
    out.text << "\n";
    out.j["vertices"] = jv;
    out.j["arrows"] = ja;
    return 0;
}

int cmd_grading_nice(Workspace& ws, Output& out, const std::string& cover,
                     const std::string& base_potential, const std::string& vertex, int order,
                     int bound) {
    const CoverEntry& e = ws.model.cover(cover);
    const QuiverCovering& c = *e.covering;
    Potential wbar = ws.base_potential(cover, base_potential);
    Potential w = sigma_potential(c, wbar);
    auto k = c.total().vertex_index(vertex);
    if (!k) throw InputError("unknown vertex '" + vertex + "'");
    TruncatedJacobianAlgebra alg(c.total(), w, order);
    ProjectiveModulePresentation p = projective_presentation(alg, *k);
    const SheetLabeling* lab = e.labeling ? &*e.labeling : nullptr;
    auto g = find_nice_grading(c, p, bound, lab);
    out.j["cover"] = cover;
    out.j["vertex"] = vertex;
    out.j["order"] = order;
    out.j["bound"] = bound;
    out.j["found"] = g.has_value();
    if (!g) {
        out.text << "no nice grading within bound " << bound << "\n";
        return 1;
    }
    json jv = json::object(), ja = json::object();
    out.text << "nice grading (bound " << bound << ") vertices:";
    for (const auto& [v, deg] : g->vertex_degree) {
        jv[c.total().vertex(v).name] = deg;
        out.text << " " << c.total().vertex(v).name << ":" << deg;
    }
    out.text << "\narrow degrees:";
    for (const auto& [a, deg] : g->arrow_degree) {
        ja[c.total().arrow(a).name] = deg;
        out.text << " " << c.total().arrow(a).name << ":" << deg;
    }
    out.text << "\n";
    out.j["vertex_degrees"] = jv;
    out.j["arrow_degrees"] = ja;
    GradingCheck chk = check_nice_grading(c, p, g->vertex_degree);
    if (!chk.ok()) throw StructuralError("internal: found grading fails its own check");
    return 0;
}

int cmd_nonwrap(Workspace& ws, Output& out, const std::string& cover,
                const std::string& base_potential, bool allow_large) {
    const CoverEntry& e = ws.model.cover(cover);
    if (!e.labeling) throw InputError("cover '" + cover + "' has no sheet labeling");
    Potential wbar = ws.base_potential(cover, base_potential);
    Potential w = sigma_potential(*e.covering, wbar);
    NonWrapOptions opts;
    opts.allow_large = allow_large;
    auto wa = check_non_wrapping(*e.covering, *e.labeling, w, opts);
    out.j["cover"] = cover;
    out.j["non_wrapping"] = wa.has_value();
    if (!wa) {
        out.text << "no assignment: the potential wraps\n";
        return 1;
    }
    json jd = json::object();
    out.text << "non-wrapping assignment:";
    for (const auto& [ab, deg] : wa->degree) {
        jd[e.covering->base().arrow(ab).name] = deg;
        out.text << " " << e.covering->base().arrow(ab).name << ":" << deg;
    }
    out.text << "\n";
    out.j["assignment"] = jd;
    return 0;
}

int cmd_extend_cover(Workspace& ws, Output& out, const std::string& cover,
                     const std::string& base_potential, int order) {
    const CoverEntry& e = ws.model.cover(cover);
    if (!e.labeling) throw InputError("cover '" + cover + "' has no sheet labeling");
    Potential wbar = ws.base_potential(cover, base_potential);
    Potential w = sigma_potential(*e.covering, wbar);
    auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
    if (!wa) {
        out.text << "no assignment: the potential wraps\n";
        out.j["non_wrapping"] = false;
        return 1;
    }
    ExtendedCover ext = build_extended_cyclic_cover(*e.covering, *e.labeling, *wa, wbar, order);
    ValidationReport rep = ext.to_base.validate();
    out.j["degree"] = ext.to_base.degree();
    out.j["valid"] = rep.ok();
    out.j["vertices"] = ext.to_base.total().vertex_count();
    out.j["potential_terms"] = static_cast<int>(ext.total_potential.terms().size());
    out.text << "extended cover: " << ext.to_base.degree() << ":1, "
             << ext.to_base.total().vertex_count() << " vertices, validation "
             << (rep.ok() ? "passed" : "FAILED") << "\n";
    return rep.ok() ? 0 : 1;
}

int cmd_euler(Workspace& ws, Output& out, bool quot, const std::string& quiver,
              const std::string& potential, const std::string& vertex, int order,
              const std::string& dim, const std::string& method) {
    const Quiver& q = ws.model.quiver(quiver);
    Potential w = ws.model.potential_for(quiver, potential);
    auto k = q.vertex_index(vertex);
    if (!k) throw InputError("unknown vertex '" + vertex + "'");
    DimVec n = parse_dimvec(dim, q.vertex_count());
    EulerOptions opts = euler_options_from_env(method);
    EulerResult r;
    if (quot) {
        r = euler_quot_nilp(q, w, *k, n, opts);
    } else {
        TruncatedJacobianAlgebra alg(q, w, order);
        ProjectiveModulePresentation p = projective_presentation(alg, *k);
        r = euler_gr(p.mod, n, opts);
    }
    out.j["conclusive"] = r.conclusive;
    if (!r.conclusive) {
        out.text << "inconclusive: " << r.note << "\n";
        out.j["note"] = r.note;
        return 3;
    }
    out.j["chi"] = r.value;
    out.j["method"] = r.method == EulerMethod::Localization ? "localization" : "finite-field";
    out.j["polynomial_count_caveat"] = r.polynomial_count_caveat;
    out.text << "chi = " << r.value << "  (method: "
             << (r.method == EulerMethod::Localization ? "localization" : "finite-field oracle")
             << (r.polynomial_count_caveat ? ", polynomial-count assumption" : "") << ")\n";
    if (!r.counts.empty()) {
        out.text << "counts:";
        for (const auto& [p, cnt] : r.counts) out.text << " q=" << p << ":" << cnt;
        out.text << "\n";
    }
    return 0;
}

int cmd_euler_compare_cover(Workspace& ws, Output& out, const std::string& cover,
                            const std::string& base_potential, const std::string& vertex,
                            const std::string& dim, int max_total, const std::string& mode_str,
                            int order, const std::string& method) {
    const CoverEntry& e = ws.model.cover(cover);
    const QuiverCovering& c = *e.covering;
    Potential wbar = ws.base_potential(cover, base_potential);
    EulerOptions opts = euler_options_from_env(method);
    ProjectionMode mode = mode_str == "gr" ? ProjectionMode::GrAtOrder : ProjectionMode::QuotNilp;

    std::vector<int> ks;
    if (!vertex.empty()) {
        auto k = c.total().vertex_index(vertex);
        if (!k) throw InputError("unknown vertex '" + vertex + "'");
        ks.push_back(*k);
    } else {
        for (const auto& fiber : c.vertex_fibers()) ks.push_back(fiber.front());
    }

    json rows = json::array();
    bool all_ok = true;
    for (int k : ks) {
        std::vector<ProjectionEulerRow> result_rows;
        if (!dim.empty()) {
            DimVec nbar = parse_dimvec(dim, c.base().vertex_count());
            result_rows.push_back(verify_projection_euler(c, wbar, k, nbar, mode, order, opts));
        }
        if (max_total >= 0) {
            ProjectionEulerReport rep =
                verify_projection_euler_upto(c, wbar, k, max_total, mode, opts);
            for (auto& row : rep.rows) result_rows.push_back(std::move(row));
        }
        for (const auto& row : result_rows) {
            all_ok = all_ok && row.equal;
            json jr;
            jr["vertex"] = c.total().vertex(k).name;
            jr["nbar"] = dimvec_str(row.nbar);
            jr["base_chi"] = row.base_value;
            jr["cover_sum"] = row.cover_sum;
            jr["equal"] = row.equal;
            json fibers = json::array();
            std::ostringstream fs;
            for (const auto& [n, v] : row.fiber_values) {
                fibers.push_back({{"n", dimvec_str(n)}, {"chi", v}});
                if (fs.tellp() > 0) fs << " + ";
                fs << v;
            }
            jr["fibers"] = fibers;
            rows.push_back(jr);
            out.text << "k=" << c.total().vertex(k).name << "  nbar=(" << dimvec_str(row.nbar)
                     << ")  base " << row.base_value << " = "
                     << (row.fiber_values.empty() ? "0" : fs.str()) << " cover sum "
                     << row.cover_sum << "  " << (row.equal ? "ok" : "MISMATCH") << "\n";
        }
    }
    out.j["rows"] = rows;
    out.j["all_equal"] = all_ok;
    return all_ok ? 0 : 1;
}

int cmd_theta_stability(Workspace& ws, Output& out, const std::string& quiver,
                        const std::string& potential, int order, bool principal, bool opp) {
    const Quiver& q = ws.model.quiver(quiver);
    Potential w = ws.model.potential_for(quiver, potential);
    ThetaOptions opts;
    opts.principal = principal;
    opts.use_opposite = opp;
    ThetaResult res = theta_stability(q, w, order, opts);
    json images = json::object();
    for (int i = 0; i < q.vertex_count(); ++i) {
        json coeffs = json::object();
        out.text << "theta(x_" << q.vertex(i).name << ") = x_" << q.vertex(i).name << " * ( ";
        bool first = true;
        for (const auto& [n, cval] : res.theta.image(i).terms()) {
            coeffs[expo_label(q, n)] = rat_str(cval);
            if (!first) out.text << " + ";
            first = false;
            if (expo_total(n) == 0)
                out.text << rat_str(cval);
            else
                out.text << rat_str(cval) << "*x^p*(" << expo_label(q, n) << ")";
        }
        out.text << " )\n";
        images[q.vertex(i).name] = coeffs;
    }
    out.j["order"] = order;
    out.j["principal"] = principal;
    out.j["images"] = images;
    return 0;
}

int cmd_theta_compare(Workspace& ws, Output& out, const std::string& cover,
                      const std::string& base_potential, int order, bool opp) {
    const CoverEntry& e = ws.model.cover(cover);
    Potential wbar = ws.base_potential(cover, base_potential);
    ThetaOptions opts;
    opts.use_opposite = opp;
    CompareThetaReport rep = compare_theta_covering(*e.covering, wbar, order, opts);
    out.j["cover"] = cover;
    out.j["order"] = order;
    out.j["coefficients_compared"] = rep.coefficients_compared;
    out.j["equal"] = rep.equal;
    json rows = json::array();
    for (const auto& d : rep.rows) {
        rows.push_back({{"base_vertex", e.covering->base().vertex(d.base_index).name},
                        {"nbar", expo_label(e.covering->base(), d.nbar)},
                        {"cover", rat_str(d.cover_value)},
                        {"base", rat_str(d.base_value)}});
        out.text << "DISCREPANCY at x_" << e.covering->base().vertex(d.base_index).name << " n=("
                 << expo_label(e.covering->base(), d.nbar) << "): cover " << rat_str(d.cover_value)
                 << " vs base " << rat_str(d.base_value) << "\n";
    }
    out.j["discrepancies"] = rows;
    if (rep.equal) {
        out.text << "theta operators agree to order " << order << " ("
                 << rep.coefficients_compared << " coefficients compared)\n";
        return 0;
    }
    return 1;
}

int cmd_rank2(Workspace& ws, Output& out, const std::string& seed_name, int order,
              bool loopcheck) {
    const SeedEntry& se = ws.model.seed(seed_name);
    SeedPtr seed = make_seed(se.seed);
    RankTwoDiagram d = rank2_complete(seed, initial_cluster_walls(seed, order), order);
    json jwalls = json::array();
    for (const auto& w : d.walls) {
        jwalls.push_back(wall_json(*seed, w));
        out.text << wall_text(w) << "\n";
    }
    out.j["walls"] = jwalls;
    out.j["order"] = order;
    if (loopcheck) {
        bool ok = loop_is_identity(d);
        out.j["loop_identity"] = ok;
        out.text << "loop product is " << (ok ? "the identity" : "NOT the identity") << "\n";
        return ok ? 0 : 1;
    }
    return 0;
}

int cmd_restrict_walls(Workspace& ws, Output& out, const std::string& cover, int order) {
    const CoverEntry& e = ws.model.cover(cover);
    SeedCovering sc = induced_seed_covering(*e.covering);
    SeedPtr total_seed = make_seed(sc.total);
    SeedPtr base_seed = make_seed(sc.base);
    std::vector<Wall> cover_walls;
    {
        // initial cluster walls over the total seed (any rank)
        auto uf = sc.total.unfrozen();
        for (size_t p = 0; p < uf.size(); ++p) {
            Wall w;
            w.normal.assign(uf.size(), 0);
            w.normal[p] = 1;
            w.kind = Wall::Kind::Hyperplane;
            w.incoming = true;
            for (int m = 1; m <= order; ++m)
                w.ham[m] = sc.total.d[uf[p]] * Rat(m % 2 == 1 ? 1 : -1) / Rat(m) / Rat(m);
            cover_walls.push_back(std::move(w));
        }
    }
    std::vector<Wall> restricted = restrict_walls(sc, cover_walls, order);
    std::vector<Wall> folded = initial_cluster_walls(base_seed, order);
    bool equal = walls_equal(base_seed, restricted, folded, order);
    json jr = json::array(), jf = json::array();
    out.text << "restricted walls:\n";
    for (const auto& w : restricted) {
        jr.push_back(wall_json(sc.base, w));
        out.text << "  " << wall_text(w) << "\n";
    }
    out.text << "folded-seed initial walls:\n";
    for (const auto& w : folded) {
        jf.push_back(wall_json(sc.base, w));
        out.text << "  " << wall_text(w) << "\n";
    }
    out.j["restricted"] = jr;
    out.j["folded_initial"] = jf;
    out.j["equal"] = equal;
    out.text << (equal ? "restriction matches the folded initial walls\n"
                       : "MISMATCH between restriction and folded initial walls\n");
    return equal ? 0 : 1;
}

int cmd_surface_cover(Workspace& ws, Output& out, const std::string& fixture, int sheets,
                      const std::string& cut) {
    // rebuild the named surface fixture's triangulation
    TriangulationData base;
    if (fixture == "torus1p") {
        base.arcs = {"a", "b", "c"};
        base.triangles.push_back({{0, 1, 2}, {"a1", "b1", "c1"}});
        base.triangles.push_back({{0, 1, 2}, {"a2", "b2", "c2"}});
    } else {
        throw InputError("unknown surface fixture '" + fixture +
                         "' (only once-punctured bases can be covered; try torus1p)");
    }
    int cut_arc = 1;
    if (!cut.empty()) {
        bool found = false;
        for (size_t i = 0; i < base.arcs.size(); ++i)
            if (base.arcs[i] == cut) {
                cut_arc = static_cast<int>(i);
                found = true;
            }
        if (!found) throw InputError("unknown cut arc '" + cut + "'");
    }
    SurfaceCoverResult res = cyclic_surface_cover({base, sheets, cut_arc, nullptr});
    ValidationReport rep = res.covering.validate();
    Potential wbar = surface_potential(res.base_adj, {});
    Potential w = surface_potential(res.total_adj, {});
    Potential projected = project_potential(res.covering, w);
    Potential scaled = wbar;
    for (int i = 1; i < sheets; ++i) scaled = scaled + wbar;
    bool pushes = projected.cyclically_equal(scaled);
    out.j["vertices"] = res.total_adj.quiver->vertex_count();
    out.j["arrows"] = res.total_adj.quiver->arrow_count();
    out.j["punctures"] = static_cast<int>(res.total_adj.rotations.size());
    out.j["valid"] = rep.ok();
    out.j["projects_to_d_times_base"] = pushes;
    out.text << sheets << ":1 cover of " << fixture << ": "
             << res.total_adj.quiver->vertex_count() << " vertices, "
             << res.total_adj.quiver->arrow_count() << " arrows, "
             << res.total_adj.rotations.size() << " punctures; validation "
             << (rep.ok() ? "passed" : "FAILED") << "; pi(W) = d*Wbar "
             << (pushes ? "holds" : "FAILS") << "\n";
    (void)ws;
    return rep.ok() && pushes ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computations for coverings of quivers with potential"};
    app.require_subcommand(1);

    std::string input_file;
    bool as_json = false;
    app.add_option("--input", input_file, "document file to load alongside the fixtures");
    app.add_flag("--json", as_json, "machine-readable output");

    // fixtures list
    auto* fixtures = app.add_subcommand("fixtures", "registry inspection");
    auto* fixtures_list = fixtures->add_subcommand("list", "list registered names");

    auto* validate = app.add_subcommand("validate", "validate a covering");
    std::string v_cover;
    validate->add_option("--cover", v_cover, "cover name")->required();

    auto* jacobian = app.add_subcommand("jacobian", "truncated Jacobian algebra dimensions");
    std::string j_quiver, j_potential, j_projective;
    int j_order = 1;
    jacobian->add_option("--quiver", j_quiver)->required();
    jacobian->add_option("--potential", j_potential);
    jacobian->add_option("--order", j_order)->required();
    jacobian->add_option("--projective", j_projective, "also present P_k");

    auto* supports_cmd = app.add_subcommand("supports", "supports of a projective module");
    std::string s_quiver, s_potential, s_projective;
    int s_order = 1;
    supports_cmd->add_option("--quiver", s_quiver)->required();
    supports_cmd->add_option("--potential", s_potential);
    supports_cmd->add_option("--order", s_order)->required();
    supports_cmd->add_option("--projective", s_projective)->required();

    auto* grading = app.add_subcommand("grading", "gradings");
    auto* grading_nice = grading->add_subcommand("nice", "search for a nice grading");
    std::string g_cover, g_potential, g_vertex;
    int g_order = 1, g_bound = 1;
    grading_nice->add_option("--cover", g_cover)->required();
    grading_nice->add_option("--potential", g_potential, "base potential override");
    grading_nice->add_option("--vertex", g_vertex)->required();
    grading_nice->add_option("--order", g_order)->required();
    grading_nice->add_option("--bound", g_bound);

    auto* nonwrap = app.add_subcommand("nonwrap", "non-wrapping assignment search");
    std::string n_cover, n_potential;
    bool n_bb = false;
    nonwrap->add_option("--cover", n_cover)->required();
    nonwrap->add_option("--potential", n_potential, "base potential override");
    nonwrap->add_flag("--bb", n_bb, "allow more than 24 binary variables");

    auto* extend = app.add_subcommand("extend-cover", "build the 2ld:1 extended cover");
    std::string x_cover, x_potential;
    int x_order = 2;
    extend->add_option("--cover", x_cover)->required();
    extend->add_option("--potential", x_potential, "base potential override");
    extend->add_option("--order", x_order)->required();

    auto* euler = app.add_subcommand("euler", "Euler characteristics");
    auto* euler_gr_cmd = euler->add_subcommand("gr", "quiver Grassmannian of P_k^l");
    std::string eg_quiver, eg_potential, eg_vertex, eg_dim, eg_method;
    int eg_order = 1;
    euler_gr_cmd->add_option("--quiver", eg_quiver)->required();
    euler_gr_cmd->add_option("--potential", eg_potential);
    euler_gr_cmd->add_option("--projective", eg_vertex)->required();
    euler_gr_cmd->add_option("--order", eg_order)->required();
    euler_gr_cmd->add_option("--dim", eg_dim)->required();
    euler_gr_cmd->add_option("--method", eg_method)->check(CLI::IsMember({"loc", "ff"}));

    auto* euler_quot_cmd = euler->add_subcommand("quot", "nilpotent quotients of P_k");
    std::string eq_quiver, eq_potential, eq_vertex, eq_dim, eq_method;
    euler_quot_cmd->add_option("--quiver", eq_quiver)->required();
    euler_quot_cmd->add_option("--potential", eq_potential);
    euler_quot_cmd->add_option("--vertex", eq_vertex)->required();
    euler_quot_cmd->add_option("--dim", eq_dim)->required();
    euler_quot_cmd->add_option("--method", eq_method)->check(CLI::IsMember({"loc", "ff"}));

    auto* euler_cmp = euler->add_subcommand("compare-cover", "base chi vs fiber sums");
    std::string ec_cover, ec_potential, ec_vertex, ec_dim, ec_mode = "quot", ec_method;
    int ec_max_total = -1, ec_order = 0;
    euler_cmp->add_option("--cover", ec_cover)->required();
    euler_cmp->add_option("--potential", ec_potential, "base potential override");
    euler_cmp->add_option("--vertex", ec_vertex, "cover vertex (default: one per fiber)");
    euler_cmp->add_option("--dim", ec_dim, "single base dimension vector");
    euler_cmp->add_option("--max-total", ec_max_total, "all |nbar| up to this total");
    euler_cmp->add_option("--mode", ec_mode)->check(CLI::IsMember({"quot", "gr"}));
    euler_cmp->add_option("--order", ec_order, "truncation order for gr mode");
    euler_cmp->add_option("--method", ec_method)->check(CLI::IsMember({"loc", "ff"}));

    auto* theta = app.add_subcommand("theta", "stability wall-crossing operators");
    auto* theta_stab = theta->add_subcommand("stability", "compute theta");
    std::string ts_quiver, ts_potential;
    int ts_order = 0;
    bool ts_principal = false, ts_opposite = false;
    theta_stab->add_option("--quiver", ts_quiver)->required();
    theta_stab->add_option("--potential", ts_potential);
    theta_stab->add_option("--order", ts_order)->required();
    theta_stab->add_flag("--principal", ts_principal);
    theta_stab->add_flag("--opposite", ts_opposite);

    auto* theta_cmp = theta->add_subcommand("compare", "restriction vs base theta");
    std::string tc_cover, tc_potential;
    int tc_order = 0;
    bool tc_opposite = false;
    theta_cmp->add_option("--cover", tc_cover)->required();
    theta_cmp->add_option("--potential", tc_potential, "base potential override");
    theta_cmp->add_option("--order", tc_order)->required();
    theta_cmp->add_flag("--opposite", tc_opposite);

    auto* rank2 = app.add_subcommand("rank2", "rank-2 scattering diagrams");
    auto* rank2_complete_cmd = rank2->add_subcommand("complete", "consistency completion");
    std::string r_seed;
    int r_order = 2;
    rank2_complete_cmd->add_option("--seed", r_seed)->required();
    rank2_complete_cmd->add_option("--order", r_order)->required();
    auto* rank2_loop = rank2->add_subcommand("loopcheck", "complete, then check the loop");
    std::string rl_seed;
    int rl_order = 2;
    rank2_loop->add_option("--seed", rl_seed)->required();
    rank2_loop->add_option("--order", rl_order)->required();

    auto* restrict_cmd = app.add_subcommand("restrict-walls", "fold initial walls of a cover");
    std::string rw_cover;
    int rw_order = 6;
    restrict_cmd->add_option("--cover", rw_cover)->required();
    restrict_cmd->add_option("--order", rw_order);

    auto* surface = app.add_subcommand("surface", "triangulated surface constructions");
    auto* surface_cover = surface->add_subcommand("cover", "cyclic cover of a surface fixture");
    std::string sc_fixture = "torus1p", sc_cut;
    int sc_sheets = 2;
    surface_cover->add_option("--fixture", sc_fixture);
    surface_cover->add_option("--sheets", sc_sheets)->required();
    surface_cover->add_option("--cut", sc_cut, "cut arc (default b)");

    CLI11_PARSE(app, argc, argv);

    Output out;
    out.as_json = as_json;
    try {
        Workspace ws(input_file);
        int code = 2;
        if (*fixtures_list) code = cmd_fixtures_list(out);
        else if (*validate) code = cmd_validate(ws, out, v_cover);
        else if (*jacobian) code = cmd_jacobian(ws, out, j_quiver, j_potential, j_order, j_projective);
        else if (*supports_cmd) code = cmd_supports(ws, out, s_quiver, s_potential, s_order, s_projective);
        else if (*grading_nice) code = cmd_grading_nice(ws, out, g_cover, g_potential, g_vertex, g_order, g_bound);
        else if (*nonwrap) code = cmd_nonwrap(ws, out, n_cover, n_potential, n_bb);
        else if (*extend) code = cmd_extend_cover(ws, out, x_cover, x_potential, x_order);
        else if (*euler_gr_cmd) code = cmd_euler(ws, out, false, eg_quiver, eg_potential, eg_vertex, eg_order, eg_dim, eg_method);
        else if (*euler_quot_cmd) code = cmd_euler(ws, out, true, eq_quiver, eq_potential, eq_vertex, 1, eq_dim, eq_method);
        else if (*euler_cmp) code = cmd_euler_compare_cover(ws, out, ec_cover, ec_potential, ec_vertex, ec_dim, ec_max_total, ec_mode, ec_order, ec_method);
        else if (*theta_stab) code = cmd_theta_stability(ws, out, ts_quiver, ts_potential, ts_order, ts_principal, ts_opposite);
        else if (*theta_cmp) code = cmd_theta_compare(ws, out, tc_cover, tc_potential, tc_order, tc_opposite);
        else if (*rank2_complete_cmd) code = cmd_rank2(ws, out, r_seed, r_order, false);
        else if (*rank2_loop) code = cmd_rank2(ws, out, rl_seed, rl_order, true);
        else if (*restrict_cmd) code = cmd_restrict_walls(ws, out, rw_cover, rw_order);
        else if (*surface_cover) code = cmd_surface_cover(ws, out, sc_fixture, sc_sheets, sc_cut);
        out.j["exit"] = code;
        out.emit();
        return code;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const InconclusiveError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
