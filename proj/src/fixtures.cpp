#include "qpcover/document.hpp"
#include "qpcover/errors.hpp"
#include "qpcover/exact_linalg.hpp"
#include "qpcover/surface.hpp"

namespace qpcover {

namespace {

TriangulationData torus_triangulation() {
    // once-punctured torus: square with a diagonal, arcs a, b, c; the two
    // triangles carry the arrows a1,b1,c1 and a2,b2,c2
    TriangulationData t;
    t.arcs = {"a", "b", "c"};
    t.triangles.push_back({{0, 1, 2}, {"a1", "b1", "c1"}});
    t.triangles.push_back({{0, 1, 2}, {"a2", "b2", "c2"}});
    return t;
}

TriangulationData sphere4_triangulation() {
    // tetrahedron boundary: four punctures, six arcs, four triangles
    TriangulationData t;
    t.arcs = {"e12", "e13", "e14", "e23", "e24", "e34"};
    auto arc = [&](const std::string& n) {
        for (size_t i = 0; i < t.arcs.size(); ++i)
            if (t.arcs[i] == n) return static_cast<int>(i);
        throw StructuralError("bad arc name " + n);
    };
    // faces oriented so that each arc is traversed once in each direction
    t.triangles.push_back({{arc("e12"), arc("e23"), arc("e13")}, {"", "", ""}});
    t.triangles.push_back({{arc("e13"), arc("e34"), arc("e14")}, {"", "", ""}});
    t.triangles.push_back({{arc("e14"), arc("e24"), arc("e12")}, {"", "", ""}});
    t.triangles.push_back({{arc("e23"), arc("e24"), arc("e34")}, {"", "", ""}});
    return t;
}

void add_surface_fixture(DocumentModel& doc, const std::string& base_name,
                         const AdjacencyQuiver& base_adj) {
    doc.add_quiver(base_name, base_adj.quiver);
    doc.add_potential(base_name + "-w", base_name, surface_potential(base_adj, {}));
}

void add_surface_cover_fixture(DocumentModel& doc, const std::string& name,
                               const std::string& base_name, const TriangulationData& base,
                               const AdjacencyQuiver& base_adj, int sheets, int cut_arc) {
    SurfaceCoverSpec spec{base, sheets, cut_arc, &base_adj};
    SurfaceCoverResult res = cyclic_surface_cover(spec);
    doc.add_quiver(name + "-total", res.total_adj.quiver);
    doc.add_potential(name + "-w", name + "-total", surface_potential(res.total_adj, {}));
    CoverEntry entry;
    entry.covering = std::make_shared<QuiverCovering>(res.covering);
    entry.labeling = res.labeling;
    entry.total_name = name + "-total";
    entry.base_name = base_name;
    doc.add_cover(name, std::move(entry));
}

QuiverPtr kronecker_cover_quiver() {
    QuiverBuilder qb;
    qb.add_vertex("1", false);
    qb.add_vertex("2", false);
    qb.add_vertex("3", false);
    qb.add_vertex("4", false);
    qb.add_arrow("a1", "2", "1");
    qb.add_arrow("b1", "2", "3");
    qb.add_arrow("a2", "4", "3");
    qb.add_arrow("b2", "4", "1");
    return qb.build();
}

QuiverPtr kronecker_base_quiver() {
    QuiverBuilder qb;
    qb.add_vertex("1", false);
    qb.add_vertex("2", false);
    qb.add_arrow("a", "2", "1");
    qb.add_arrow("b", "2", "1");
    return qb.build();
}

void add_kronecker(DocumentModel& doc) {
    QuiverPtr total = kronecker_cover_quiver();
    QuiverPtr base = kronecker_base_quiver();
    doc.add_quiver("kronecker", total);
    doc.add_quiver("kronecker-base", base);
    doc.add_potential("kronecker-w", "kronecker", Potential(*total));
    doc.add_potential("kronecker-base-w", "kronecker-base", Potential(*base));

    std::vector<int> vmap = {0, 1, 0, 1}; // 1,3 -> 1; 2,4 -> 2
    std::vector<int> amap = {0, 1, 0, 1}; // a* -> a, b* -> b
    DeckElement g;
    g.vperm = {2, 3, 0, 1};
    g.aperm = {2, 3, 0, 1};
    CoverEntry entry;
    entry.covering = std::make_shared<QuiverCovering>(total, base, vmap, amap,
                                                      std::vector<DeckElement>{g}, 2);
    entry.labeling = sheet_labeling_from_map(*entry.covering, {0, 0, 1, 1});
    entry.total_name = "kronecker";
    entry.base_name = "kronecker-base";
    doc.add_cover("kronecker-cover2", std::move(entry));
}

void add_liegrass(DocumentModel& doc) {
    QuiverBuilder qb;
    for (const char* v : {"A", "B", "C", "D"}) qb.add_vertex(v, false);
    qb.add_arrow("a1", "A", "B");
    qb.add_arrow("a2", "A", "B");
    qb.add_arrow("b1", "B", "C");
    qb.add_arrow("b2", "B", "C");
    qb.add_arrow("c1", "C", "D");
    qb.add_arrow("c2", "C", "D");
    qb.add_arrow("c", "C", "A");
    qb.add_arrow("d", "D", "B");
    QuiverPtr base = qb.build();
    doc.add_quiver("liegrass-base", base);
    Potential wbar(*base);
    auto path = [&](std::initializer_list<const char*> names) {
        std::vector<int> arrows;
        for (const char* n : names) arrows.push_back(*base->arrow_index(n));
        return Path::of_arrows(*base, std::move(arrows));
    };
    // c b1 a1 + c b2 a2 + d c1 b1 + d c2 b2 (right factor traversed first)
    wbar.add_term(Rat(1), path({"a1", "b1", "c"}));
    wbar.add_term(Rat(1), path({"a2", "b2", "c"}));
    wbar.add_term(Rat(1), path({"b1", "c1", "d"}));
    wbar.add_term(Rat(1), path({"b2", "c2", "d"}));
    doc.add_potential("liegrass-base-w", "liegrass-base", wbar);

    for (int d = 2; d <= 3; ++d) {
        std::string name = "liegrass-cover" + std::to_string(d);
        QuiverBuilder tb;
        auto sheet = [&](const std::string& n, int s) {
            return n + "^(" + std::to_string(((s % d) + d) % d) + ")";
        };
        for (int s = 0; s < d; ++s)
            for (const char* v : {"A", "B", "C", "D"}) tb.add_vertex(sheet(v, s), false);
        // a2, c2 climb one sheet, b2 descends; everything else is horizontal
        for (int s = 0; s < d; ++s) {
            tb.add_arrow(sheet("a1", s), sheet("A", s), sheet("B", s));
            tb.add_arrow(sheet("a2", s), sheet("A", s), sheet("B", s + 1));
            tb.add_arrow(sheet("b1", s), sheet("B", s), sheet("C", s));
            tb.add_arrow(sheet("b2", s), sheet("B", s), sheet("C", s - 1));
            tb.add_arrow(sheet("c1", s), sheet("C", s), sheet("D", s));
            tb.add_arrow(sheet("c2", s), sheet("C", s), sheet("D", s + 1));
            tb.add_arrow(sheet("c", s), sheet("C", s), sheet("A", s));
            tb.add_arrow(sheet("d", s), sheet("D", s), sheet("B", s));
        }
        QuiverPtr total = tb.build();
        doc.add_quiver(name + "-total", total);
        std::vector<int> vmap(total->vertex_count()), amap(total->arrow_count());
        for (int v = 0; v < total->vertex_count(); ++v) {
            std::string n = total->vertex(v).name;
            vmap[v] = *base->vertex_index(n.substr(0, n.find('^')));
        }
        for (int a = 0; a < total->arrow_count(); ++a) {
            std::string n = total->arrow(a).name;
            amap[a] = *base->arrow_index(n.substr(0, n.find('^')));
        }
        DeckElement g;
        g.vperm.resize(total->vertex_count());
        g.aperm.resize(total->arrow_count());
        auto shift_name = [&](const std::string& n) {
            auto caret = n.find('^');
            int s = std::stoi(n.substr(caret + 2, n.size() - caret - 3));
            return sheet(n.substr(0, caret), s + 1);
        };
        for (int v = 0; v < total->vertex_count(); ++v)
            g.vperm[v] = *total->vertex_index(shift_name(total->vertex(v).name));
        for (int a = 0; a < total->arrow_count(); ++a)
            g.aperm[a] = *total->arrow_index(shift_name(total->arrow(a).name));
        CoverEntry entry;
        entry.covering = std::make_shared<QuiverCovering>(total, base, vmap, amap,
                                                          std::vector<DeckElement>{g}, d);
        std::vector<int> sheets(total->vertex_count());
        for (int v = 0; v < total->vertex_count(); ++v) {
            std::string n = total->vertex(v).name;
            auto caret = n.find('^');
            sheets[v] = std::stoi(n.substr(caret + 2, n.size() - caret - 3));
        }
        entry.labeling = sheet_labeling_from_map(*entry.covering, sheets);
        entry.total_name = name + "-total";
        entry.base_name = "liegrass-base";
        doc.add_cover(name, std::move(entry));
        doc.add_potential(name + "-w", name + "-total",
                          sigma_potential(*doc.cover(name).covering, wbar));
    }
}

void add_loopwrap(DocumentModel& doc) {
    QuiverBuilder bb;
    bb.add_vertex("v", false);
    bb.add_arrow("l", "v", "v");
    QuiverPtr base = bb.build();
    doc.add_quiver("loop-base", base);
    Potential wbar(*base);
    wbar.add_term(Rat(1), Path::of_arrows(*base, {0, 0}));
    doc.add_potential("loop-base-w", "loop-base", wbar);

    QuiverBuilder tb;
    tb.add_vertex("v^(0)", false);
    tb.add_vertex("v^(1)", false);
    tb.add_arrow("l^(0)", "v^(0)", "v^(1)");
    tb.add_arrow("l^(1)", "v^(1)", "v^(0)");
    QuiverPtr total = tb.build();
    doc.add_quiver("loopwrap-total", total);
    DeckElement g;
    g.vperm = {1, 0};
    g.aperm = {1, 0};
    CoverEntry entry;
    entry.covering = std::make_shared<QuiverCovering>(total, base, std::vector<int>{0, 0},
                                                      std::vector<int>{0, 0},
                                                      std::vector<DeckElement>{g}, 2);
    entry.labeling = sheet_labeling_from_map(*entry.covering, {0, 1});
    entry.total_name = "loopwrap-total";
    entry.base_name = "loop-base";
    doc.add_potential("loopwrap-w", "loopwrap-total", sigma_potential(*entry.covering, wbar));
    doc.add_cover("loopwrap", entry);
    doc.add_cover("loopwrap-fixture", std::move(entry));
}

void add_seeds(DocumentModel& doc) {
    auto mk = [&](const std::string& name, RatMat B, RatVec d) {
        Seed sd;
        sd.names = {"1", "2"};
        sd.frozen = {false, false};
        sd.d = std::move(d);
        sd.B = std::move(B);
        sd.validate();
        doc.add_seed(name, SeedEntry{std::move(sd), ""});
    };
    mk("seed-a2", {{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}}, {Rat(1), Rat(1)});
    mk("seed-a1xa1", {{Rat(0), Rat(0)}, {Rat(0), Rat(0)}}, {Rat(1), Rat(1)});
    mk("seed-kronecker", {{Rat(0), Rat(-2)}, {Rat(2), Rat(0)}}, {Rat(1), Rat(1)});
    mk("seed-kronecker-folded", {{Rat(0), Rat(-2)}, {Rat(2), Rat(0)}}, {Rat(2), Rat(2)});
}

} // namespace

const DocumentModel& fixture_registry() {
    static const DocumentModel doc = [] {
        DocumentModel d;
        add_kronecker(d);

        TriangulationData torus = torus_triangulation();
        AdjacencyQuiver torus_adj = adjacency_quiver(torus);
        add_surface_fixture(d, "torus1p", torus_adj);
        int cut_b = 1;
        add_surface_cover_fixture(d, "torus1p-cover2", "torus1p", torus, torus_adj, 2, cut_b);
        add_surface_cover_fixture(d, "torus1p-cover3", "torus1p", torus, torus_adj, 3, cut_b);

        TriangulationData sphere = sphere4_triangulation();
        AdjacencyQuiver sphere_adj = adjacency_quiver(sphere);
        add_surface_fixture(d, "sphere4p", sphere_adj);

        add_liegrass(d);
        add_loopwrap(d);
        add_seeds(d);
        return d;
    }();
    return doc;
}

} // namespace qpcover
