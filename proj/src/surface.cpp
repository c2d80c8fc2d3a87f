#include "qpcover/surface.hpp"

#include <algorithm>
#include <set>

#include "qpcover/errors.hpp"

namespace qpcover {

namespace {

struct SlotTable {
    // arc -> the (triangle, position) slots where it appears
    std::vector<std::vector<std::pair<int, int>>> slots;
};

SlotTable arc_slots(const TriangulationData& t) {
    SlotTable st;
    st.slots.resize(t.arcs.size());
    for (size_t ti = 0; ti < t.triangles.size(); ++ti) {
        const auto& tri = t.triangles[ti].arc;
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw StructuralError("triangulation: self-folded triangle at index " +
                                  std::to_string(ti));
        for (int j = 0; j < 3; ++j) {
            int a = tri[j];
            if (a < 0 || a >= static_cast<int>(t.arcs.size()))
                throw StructuralError("triangulation: arc index out of range");
            st.slots[a].emplace_back(static_cast<int>(ti), j);
        }
    }
    for (size_t a = 0; a < t.arcs.size(); ++a)
        if (st.slots[a].size() != 2)
            throw StructuralError("triangulation: arc '" + t.arcs[a] + "' lies in " +
                                  std::to_string(st.slots[a].size()) + " triangle slots, not 2");
    return st;
}

} // namespace

AdjacencyQuiver adjacency_quiver(const TriangulationData& t) {
    SlotTable st = arc_slots(t);
    AdjacencyQuiver adj;
    QuiverBuilder qb;
    for (const auto& arc : t.arcs) qb.add_vertex(arc, false);
    // one arrow per triangle corner: slot j gives arc[j] -> arc[j+1]
    std::vector<std::array<int, 3>> arrow_of_slot(t.triangles.size());
    for (size_t ti = 0; ti < t.triangles.size(); ++ti) {
        const auto& tri = t.triangles[ti];
        for (int j = 0; j < 3; ++j) {
            std::string name = tri.arrow_name[j];
            if (name.empty())
                name = "t" + std::to_string(ti) + "a" + std::to_string(j);
            arrow_of_slot[ti][j] = qb.add_arrow(name, tri.arc[j], tri.arc[(j + 1) % 3]);
        }
    }
    adj.quiver = qb.build();
    adj.triangle_arrows = arrow_of_slot;

    const Quiver& q = *adj.quiver;
    int na = q.arrow_count();
    adj.f.assign(na, -1);
    adj.g.assign(na, -1);
    for (size_t ti = 0; ti < t.triangles.size(); ++ti) {
        for (int j = 0; j < 3; ++j) {
            int alpha = arrow_of_slot[ti][j];
            adj.f[alpha] = arrow_of_slot[ti][(j + 1) % 3];
            // g: next arc counterclockwise past the head of alpha lives in
            // the other triangle slot of that arc
            int head_arc = t.triangles[ti].arc[(j + 1) % 3];
            auto [s0, s1] = std::pair(st.slots[head_arc][0], st.slots[head_arc][1]);
            auto other = (s0 == std::pair(static_cast<int>(ti), (j + 1) % 3)) ? s1 : s0;
            adj.g[alpha] = arrow_of_slot[other.first][other.second];
        }
    }
    for (int v = 0; v < q.vertex_count(); ++v)
        if (q.arrows_from(v).size() != 2 || q.arrows_into(v).size() != 2)
            throw StructuralError("adjacency quiver: vertex '" + q.vertex(v).name +
                                  "' does not have two arrows in and out");
    // f must be a triangle 3-cycle
    for (int a = 0; a < na; ++a)
        if (adj.f[adj.f[adj.f[a]]] != a)
            throw StructuralError("adjacency quiver: f^3 != id at arrow " + q.arrow(a).name);
    // g-orbits are the puncture rotations
    adj.rotation_of.assign(na, -1);
    for (int a = 0; a < na; ++a) {
        if (adj.rotation_of[a] != -1) continue;
        std::vector<int> cycle;
        int x = a;
        do {
            adj.rotation_of[x] = static_cast<int>(adj.rotations.size());
            cycle.push_back(x);
            x = adj.g[x];
            if (x < 0 || static_cast<int>(cycle.size()) > na)
                throw StructuralError("adjacency quiver: g is not a permutation");
        } while (x != a);
        adj.rotations.push_back(std::move(cycle));
    }
    adj.n_alpha.assign(na, 0);
    for (int a = 0; a < na; ++a)
        adj.n_alpha[a] = static_cast<int>(adj.rotations[adj.rotation_of[a]].size());
    // every arrow sits in exactly one triangle position and one rotation position
    for (int a = 0; a < na; ++a) {
        const Arrow& ar = q.arrow(a);
        const Arrow& gn = q.arrow(adj.g[a]);
        if (gn.src != ar.tgt)
            throw StructuralError("adjacency quiver: rotation step mismatch at arrow " + ar.name);
    }
    return adj;
}

namespace {

Path g_chain(const AdjacencyQuiver& adj, int alpha, int steps) {
    // traversal alpha, g(alpha), ..., g^{steps}(alpha)
    std::vector<int> arrows;
    int x = alpha;
    for (int r = 0; r <= steps; ++r) {
        arrows.push_back(x);
        x = adj.g[x];
    }
    return Path::of_arrows(*adj.quiver, std::move(arrows));
}

Path f_cycle(const AdjacencyQuiver& adj, int alpha) {
    return Path::of_arrows(*adj.quiver, {alpha, adj.f[alpha], adj.f[adj.f[alpha]]});
}

} // namespace

Potential surface_potential(const AdjacencyQuiver& adj, const std::map<int, Rat>& constants) {
    const Quiver& q = *adj.quiver;
    for (const auto& [p, c] : constants)
        if (c == 0)
            throw StructuralError("surface potential: zero puncture constant at rotation " +
                                  std::to_string(p));
    Potential w(q);
    std::set<int> seen;
    for (int a = 0; a < q.arrow_count(); ++a) {
        if (seen.count(a)) continue;
        seen.insert(a);
        seen.insert(adj.f[a]);
        seen.insert(adj.f[adj.f[a]]);
        w.add_term(Rat(1), f_cycle(adj, a));
    }
    for (const auto& rot : adj.rotations) {
        int beta = *std::min_element(rot.begin(), rot.end());
        Rat c(1);
        auto it = constants.find(adj.rotation_of[beta]);
        if (it != constants.end()) c = it->second;
        w.add_term(-c, g_chain(adj, beta, adj.n_alpha[beta] - 1));
    }
    return w;
}

JacobianBasisOracle jacobian_basis_oracle(const AdjacencyQuiver& adj,
                                          const std::map<int, Rat>& constants) {
    const Quiver& q = *adj.quiver;
    JacobianBasisOracle o;
    for (int a = 0; a < q.arrow_count(); ++a)
        for (int r = 0; r + 2 <= adj.n_alpha[a]; ++r) o.chain_basis.push_back(g_chain(adj, a, r));
    o.dimension = 2LL * q.vertex_count() + static_cast<long long>(o.chain_basis.size());

    auto constant_of = [&](int arrow) {
        auto it = constants.find(adj.rotation_of[arrow]);
        return it == constants.end() ? Rat(1) : it->second;
    };
    o.socle_exprs.resize(q.vertex_count());
    for (int v = 0; v < q.vertex_count(); ++v) {
        for (int a : q.arrows_from(v)) {
            AlgebraElement fc(q);
            fc.add(f_cycle(adj, a), Rat(1));
            o.socle_exprs[v].push_back(fc);
            AlgebraElement gc(q);
            gc.add(g_chain(adj, a, adj.n_alpha[a] - 1), constant_of(a));
            o.socle_exprs[v].push_back(gc);
        }
    }
    for (int a = 0; a < q.arrow_count(); ++a) {
        // gf(a).f(a).a and fg(a).g(a).a vanish
        AlgebraElement x(q);
        x.add(Path::of_arrows(q, {a, adj.f[a], adj.g[adj.f[a]]}), Rat(1));
        o.zero_exprs.push_back(x);
        AlgebraElement y(q);
        y.add(Path::of_arrows(q, {a, adj.g[a], adj.f[adj.g[a]]}), Rat(1));
        o.zero_exprs.push_back(y);
        // the superfluous cycles overshoot by the starting arrow
        std::vector<int> fc = {a, adj.f[a], adj.f[adj.f[a]], a};
        o.superfluous_cycles.push_back(Path::of_arrows(q, fc));
        std::vector<int> gc;
        int x2 = a;
        for (int r = 0; r < adj.n_alpha[a]; ++r) {
            gc.push_back(x2);
            x2 = adj.g[x2];
        }
        gc.push_back(a);
        o.superfluous_cycles.push_back(Path::of_arrows(q, gc));
    }
    return o;
}

SurfaceCoverResult cyclic_surface_cover(const SurfaceCoverSpec& spec) {
    if (spec.sheets < 2) throw StructuralError("surface cover: need at least 2 sheets");
    const TriangulationData& base = spec.base;
    SlotTable st = arc_slots(base);
    if (spec.cut_arc < 0 || spec.cut_arc >= static_cast<int>(base.arcs.size()))
        throw StructuralError("surface cover: cut arc out of range");

    AdjacencyQuiver base_adj = spec.prebuilt_base ? *spec.prebuilt_base : adjacency_quiver(base);
    if (base_adj.rotations.size() != 1)
        throw StructuralError("surface cover: base surface must have exactly one puncture");

    // the cut must not disconnect: triangles stay connected through shared
    // arcs other than the cut arc
    {
        int nt = static_cast<int>(base.triangles.size());
        std::vector<int> comp(nt, -1);
        std::vector<int> stack{0};
        comp[0] = 0;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int j = 0; j < 3; ++j) {
                int arc = base.triangles[t].arc[j];
                if (arc == spec.cut_arc) continue;
                for (auto [t2, p2] : st.slots[arc])
                    if (comp[t2] == -1) {
                        comp[t2] = 0;
                        stack.push_back(t2);
                    }
            }
        }
        for (int t = 0; t < nt; ++t)
            if (comp[t] == -1)
                throw StructuralError("surface cover: cutting arc '" + base.arcs[spec.cut_arc] +
                                      "' disconnects the surface");
    }

    int d = spec.sheets;
    // slot order decides the side of the cut that ascends a sheet
    auto plus_slot = st.slots[spec.cut_arc][1];

    auto sheet_name = [](const std::string& base_name, int s) {
        return base_name + "^(" + std::to_string(s) + ")";
    };

    TriangulationData total;
    for (const auto& arc : base.arcs)
        for (int s = 0; s < d; ++s) total.arcs.push_back(sheet_name(arc, s));
    auto arc_copy = [&](int arc, int s) { return arc * d + ((s % d) + d) % d; };

    for (size_t ti = 0; ti < base.triangles.size(); ++ti) {
        for (int s = 0; s < d; ++s) {
            TriangulationData::Triangle tri;
            for (int j = 0; j < 3; ++j) {
                int lift = s;
                if (base.triangles[ti].arc[j] == spec.cut_arc &&
                    plus_slot == std::pair(static_cast<int>(ti), j))
                    lift = s + 1;
                tri.arc[j] = arc_copy(base.triangles[ti].arc[j], lift);
                std::string bn = base.triangles[ti].arrow_name[j];
                if (bn.empty()) bn = "t" + std::to_string(ti) + "a" + std::to_string(j);
                tri.arrow_name[j] = sheet_name(bn, s);
            }
            total.triangles.push_back(tri);
        }
    }
    AdjacencyQuiver total_adj = adjacency_quiver(total);

    const Quiver& T = *total_adj.quiver;
    std::vector<int> vmap(T.vertex_count()), amap(T.arrow_count());
    for (int v = 0; v < T.vertex_count(); ++v) vmap[v] = v / d;
    // arrows of the total quiver are slots: triangle ti*d + s, corner j
    for (size_t ti = 0; ti < base.triangles.size(); ++ti)
        for (int s = 0; s < d; ++s)
            for (int j = 0; j < 3; ++j)
                amap[total_adj.triangle_arrows[ti * d + s][j]] = base_adj.triangle_arrows[ti][j];

    DeckElement gen;
    gen.vperm.resize(T.vertex_count());
    gen.aperm.resize(T.arrow_count());
    for (int arc = 0; arc < static_cast<int>(base.arcs.size()); ++arc)
        for (int s = 0; s < d; ++s) gen.vperm[arc_copy(arc, s)] = arc_copy(arc, s + 1);
    for (size_t ti = 0; ti < base.triangles.size(); ++ti)
        for (int s = 0; s < d; ++s)
            for (int j = 0; j < 3; ++j)
                gen.aperm[total_adj.triangle_arrows[ti * d + s][j]] =
                    total_adj.triangle_arrows[ti * d + (s + 1) % d][j];

    QuiverCovering covering(total_adj.quiver, base_adj.quiver, std::move(vmap), std::move(amap),
                            {gen}, d);
    std::vector<int> sheet(T.vertex_count());
    for (int arc = 0; arc < static_cast<int>(base.arcs.size()); ++arc)
        for (int s = 0; s < d; ++s) sheet[arc_copy(arc, s)] = s;
    SheetLabeling labeling = sheet_labeling_from_map(covering, sheet);
    return SurfaceCoverResult{std::move(total), std::move(total_adj), std::move(base_adj),
                              std::move(covering), std::move(labeling)};
}

} // namespace qpcover
