#include "qpcover/covering.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "qpcover/errors.hpp"

namespace qpcover {

DeckElement deck_identity(const Quiver& q) {
    DeckElement e;
    e.vperm.resize(q.vertex_count());
    e.aperm.resize(q.arrow_count());
    for (int i = 0; i < q.vertex_count(); ++i) e.vperm[i] = i;
    for (int a = 0; a < q.arrow_count(); ++a) e.aperm[a] = a;
    return e;
}

DeckElement deck_compose(const DeckElement& a, const DeckElement& b) {
    // (a o b).x = a.(b.x)
    DeckElement r;
    r.vperm.resize(a.vperm.size());
    r.aperm.resize(a.aperm.size());
    for (size_t i = 0; i < a.vperm.size(); ++i) r.vperm[i] = a.vperm[b.vperm[i]];
    for (size_t i = 0; i < a.aperm.size(); ++i) r.aperm[i] = a.aperm[b.aperm[i]];
    return r;
}

std::string ValidationReport::str() const {
    if (ok()) return "valid";
    std::ostringstream os;
    for (const auto& f : failures) os << f << "\n";
    return os.str();
}

QuiverCovering::QuiverCovering(QuiverPtr total, QuiverPtr base, std::vector<int> vmap,
                               std::vector<int> amap, std::vector<DeckElement> generators,
                               int declared_order)
    : total_(std::move(total)),
      base_(std::move(base)),
      vmap_(std::move(vmap)),
      amap_(std::move(amap)),
      generators_(std::move(generators)),
      declared_order_(declared_order) {
    if (static_cast<int>(vmap_.size()) != total_->vertex_count() ||
        static_cast<int>(amap_.size()) != total_->arrow_count())
        throw StructuralError("covering: projection maps have wrong sizes");
}

const std::vector<DeckElement>& QuiverCovering::deck_group() const {
    if (!group_.empty()) return group_;
    std::set<DeckElement> seen;
    std::deque<DeckElement> todo;
    DeckElement id = deck_identity(*total_);
    seen.insert(id);
    todo.push_back(id);
    while (!todo.empty()) {
        DeckElement g = todo.front();
        todo.pop_front();
        for (const auto& gen : generators_) {
            DeckElement h = deck_compose(gen, g);
            if (seen.insert(h).second) todo.push_back(h);
        }
    }
    group_.assign(seen.begin(), seen.end());
    // identity first, rest in permutation order
    std::stable_partition(group_.begin(), group_.end(),
                          [&](const DeckElement& g) { return g == id; });
    return group_;
}

std::vector<std::vector<int>> QuiverCovering::vertex_fibers() const {
    std::vector<std::vector<int>> f(base_->vertex_count());
    for (int v = 0; v < total_->vertex_count(); ++v) f[vmap_[v]].push_back(v);
    return f;
}

std::vector<std::vector<int>> QuiverCovering::arrow_fibers() const {
    std::vector<std::vector<int>> f(base_->arrow_count());
    for (int a = 0; a < total_->arrow_count(); ++a) f[amap_[a]].push_back(a);
    return f;
}

ValidationReport QuiverCovering::validate() const {
    ValidationReport rep;
    const Quiver& T = *total_;
    const Quiver& B = *base_;
    // projection respects sources and targets
    for (int a = 0; a < T.arrow_count(); ++a) {
        const Arrow& ar = T.arrow(a);
        const Arrow& br = B.arrow(amap_[a]);
        if (vmap_[ar.src] != br.src || vmap_[ar.tgt] != br.tgt)
            rep.failures.push_back("projection breaks incidence at arrow " + ar.name);
    }
    // each generator is an automorphism commuting with the projection
    for (const auto& g : generators_) {
        if (static_cast<int>(g.vperm.size()) != T.vertex_count() ||
            static_cast<int>(g.aperm.size()) != T.arrow_count()) {
            rep.failures.push_back("deck generator has wrong permutation sizes");
            continue;
        }
        for (int a = 0; a < T.arrow_count(); ++a) {
            const Arrow& ar = T.arrow(a);
            const Arrow& im = T.arrow(g.aperm[a]);
            if (im.src != g.vperm[ar.src] || im.tgt != g.vperm[ar.tgt])
                rep.failures.push_back("deck generator breaks incidence at arrow " + ar.name);
            if (amap_[g.aperm[a]] != amap_[a])
                rep.failures.push_back("deck generator does not commute with projection at arrow " +
                                       ar.name);
        }
        for (int v = 0; v < T.vertex_count(); ++v)
            if (vmap_[g.vperm[v]] != vmap_[v])
                rep.failures.push_back(
                    "deck generator does not commute with projection at vertex " + T.vertex(v).name);
    }
    if (!rep.ok()) return rep;

    const auto& G = deck_group();
    if (static_cast<int>(G.size()) != declared_order_) {
        rep.failures.push_back("deck group order is " + std::to_string(G.size()) +
                               ", declared " + std::to_string(declared_order_));
    }
    // freeness
    DeckElement id = deck_identity(T);
    for (const auto& g : G) {
        if (g == id) continue;
        for (int v = 0; v < T.vertex_count(); ++v)
            if (g.vperm[v] == v) {
                rep.failures.push_back("deck action not free at vertex " + T.vertex(v).name);
                break;
            }
    }
    // fibers are exactly the orbits
    auto vf = vertex_fibers();
    for (const auto& fiber : vf) {
        if (fiber.empty()) {
            rep.failures.push_back("projection is not surjective on vertices");
            continue;
        }
        std::set<int> orbit;
        for (const auto& g : G) orbit.insert(g.vperm[fiber[0]]);
        if (orbit != std::set<int>(fiber.begin(), fiber.end()))
            rep.failures.push_back("vertex fiber of " + B.vertex(vmap_[fiber[0]]).name +
                                   " is not a single deck orbit");
    }
    auto af = arrow_fibers();
    for (const auto& fiber : af) {
        if (fiber.empty()) {
            rep.failures.push_back("projection is not surjective on arrows");
            continue;
        }
        std::set<int> orbit;
        for (const auto& g : G) orbit.insert(g.aperm[fiber[0]]);
        if (orbit != std::set<int>(fiber.begin(), fiber.end()))
            rep.failures.push_back("arrow fiber of " + B.arrow(amap_[fiber[0]]).name +
                                   " is not a single deck orbit");
    }
    if (!rep.ok()) return rep;
    // local bijection: unique lift of each base arrow at each fiber point
    for (int ab = 0; ab < B.arrow_count(); ++ab) {
        const Arrow& br = B.arrow(ab);
        for (int v : vf[br.src]) {
            int count = 0;
            for (int a : af[ab])
                if (T.arrow(a).src == v) ++count;
            if (count != 1)
                rep.failures.push_back("lift count of arrow " + br.name + " at vertex " +
                                       T.vertex(v).name + " is " + std::to_string(count));
        }
        for (int v : vf[br.tgt]) {
            int count = 0;
            for (int a : af[ab])
                if (T.arrow(a).tgt == v) ++count;
            if (count != 1)
                rep.failures.push_back("colift count of arrow " + br.name + " at vertex " +
                                       T.vertex(v).name + " is " + std::to_string(count));
        }
    }
    return rep;
}

Path lift_path(const QuiverCovering& c, const Path& base_path, int anchor, bool anchor_at_start) {
    const Quiver& T = c.total();
    const Quiver& B = c.base();
    if (base_path.quiver() != &B) throw StructuralError("lift_path: path not over the base quiver");
    int base_end = anchor_at_start ? base_path.source() : base_path.target();
    if (anchor < 0 || anchor >= T.vertex_count() || c.vmap(anchor) != base_end)
        throw StructuralError("lift_path: anchor not in the fiber over the path endpoint");
    if (base_path.is_lazy()) return Path::lazy(T, anchor);

    std::vector<int> lifted(base_path.length(), -1);
    if (anchor_at_start) {
        int at = anchor;
        for (int i = 0; i < base_path.length(); ++i) {
            int ab = base_path.arrows()[i];
            int found = -1;
            for (int a : T.arrows_from(at))
                if (c.amap(a) == ab) {
                    if (found >= 0) throw StructuralError("lift_path: non-unique lift");
                    found = a;
                }
            if (found < 0) throw StructuralError("lift_path: no lift of arrow " + B.arrow(ab).name);
            lifted[i] = found;
            at = T.arrow(found).tgt;
        }
    } else {
        int at = anchor;
        for (int i = base_path.length() - 1; i >= 0; --i) {
            int ab = base_path.arrows()[i];
            int found = -1;
            for (int a : T.arrows_into(at))
                if (c.amap(a) == ab) {
                    if (found >= 0) throw StructuralError("lift_path: non-unique lift");
                    found = a;
                }
            if (found < 0) throw StructuralError("lift_path: no lift of arrow " + B.arrow(ab).name);
            lifted[i] = found;
            at = T.arrow(found).src;
        }
    }
    return Path::of_arrows(T, std::move(lifted));
}

AlgebraElement sigma_path_element(const QuiverCovering& c, const Path& p, const Rat& coeff,
                                  AlgebraElement& out) {
    const Quiver& T = c.total();
    for (int v = 0; v < T.vertex_count(); ++v) {
        if (c.vmap(v) != p.source()) continue;
        out.add(lift_path(c, p, v, true), coeff);
    }
    return out;
}

AlgebraElement sigma(const QuiverCovering& c, const AlgebraElement& x) {
    if (x.quiver() != &c.base()) throw StructuralError("sigma: element not over the base quiver");
    AlgebraElement out(c.total(), x.order_bound());
    for (const auto& [p, coeff] : x.terms()) sigma_path_element(c, p, coeff, out);
    return out;
}

AlgebraElement sigma_path(const QuiverCovering& c, const Path& p) {
    AlgebraElement out(c.total());
    return sigma_path_element(c, p, Rat(1), out);
}

Potential sigma_potential(const QuiverCovering& c, const Potential& wbar) {
    if (wbar.quiver() != &c.base())
        throw StructuralError("sigma_potential: potential not over the base quiver");
    Potential w(c.total());
    for (const auto& [coeff, cyc] : wbar.terms()) {
        AlgebraElement lifts = sigma_path(c, cyc);
        for (const auto& [p, cl] : lifts.terms()) {
            if (!p.is_cycle())
                throw StructuralError("sigma_potential: lift of '" + cyc.str() +
                                      "' does not close up");
            w.add_term(coeff * cl, p);
        }
    }
    return w;
}

Path project_path(const QuiverCovering& c, const Path& p) {
    const Quiver& B = c.base();
    if (p.quiver() != &c.total()) throw StructuralError("project_path: path not over the total quiver");
    if (p.is_lazy()) return Path::lazy(B, c.vmap(p.source()));
    std::vector<int> arrows;
    arrows.reserve(p.length());
    for (int a : p.arrows()) arrows.push_back(c.amap(a));
    return Path::of_arrows(B, std::move(arrows));
}

Potential project_potential(const QuiverCovering& c, const Potential& w) {
    Potential out(c.base());
    for (const auto& [coeff, cyc] : w.terms()) out.add_term(coeff, project_path(c, cyc));
    return out;
}

Path deck_apply(const Quiver& q, const DeckElement& g, const Path& p) {
    if (p.is_lazy()) return Path::lazy(q, g.vperm[p.source()]);
    std::vector<int> arrows;
    arrows.reserve(p.length());
    for (int a : p.arrows()) arrows.push_back(g.aperm[a]);
    return Path::of_arrows(q, std::move(arrows));
}

ModulePresentation pullback_module(const QuiverCovering& c, const ModulePresentation& mod,
                                   const Potential& wbar, int order) {
    if (mod.quiver != &c.total()) throw StructuralError("pullback: module not over the total quiver");
    // Relation compatibility: sigma of each base derivative must equal the
    // fiber sum of total derivatives of sigma(wbar).
    Potential w = sigma_potential(c, wbar);
    for (int ab = 0; ab < c.base().arrow_count(); ++ab) {
        AlgebraElement lhs = sigma(c, cyclic_derivative(ab, wbar));
        AlgebraElement rhs(c.total());
        for (int a = 0; a < c.total().arrow_count(); ++a)
            if (c.amap(a) == ab) rhs += cyclic_derivative(a, w);
        if (!(lhs == rhs))
            throw StructuralError("pullback: relation compatibility fails at base arrow " +
                                  c.base().arrow(ab).name);
    }
    (void)order;

    const Quiver& B = c.base();
    ModulePresentation out;
    out.quiver = &B;
    out.dims.assign(B.vertex_count(), 0);
    out.labels.resize(B.vertex_count());
    auto vf = c.vertex_fibers();
    // offset of each total vertex block inside its base fiber sum
    std::vector<long long> offset(c.total().vertex_count(), 0);
    for (int vb = 0; vb < B.vertex_count(); ++vb) {
        for (int v : vf[vb]) {
            offset[v] = out.dims[vb];
            out.dims[vb] += mod.dims[v];
            for (long long j = 0; j < mod.dims[v]; ++j)
                out.labels[vb].push_back(
                    mod.labels.empty() || mod.labels[v].empty()
                        ? c.total().vertex(v).name + "#" + std::to_string(j)
                        : mod.labels[v][j]);
        }
    }
    out.action.resize(B.arrow_count());
    auto af = c.arrow_fibers();
    for (int ab = 0; ab < B.arrow_count(); ++ab) {
        const Arrow& br = B.arrow(ab);
        Mat m = mat_zero(static_cast<int>(out.dims[br.tgt]), static_cast<int>(out.dims[br.src]));
        for (int a : af[ab]) {
            const Arrow& ar = c.total().arrow(a);
            const Mat& block = mod.action[a];
            for (size_t i = 0; i < block.size(); ++i)
                for (size_t j = 0; j < block[i].size(); ++j)
                    m[offset[ar.tgt] + i][offset[ar.src] + j] = block[i][j];
        }
        out.action[ab] = std::move(m);
    }
    out.validate_shapes();
    return out;
}

InjectivityResult check_sigma_injectivity(const QuiverCovering& c, const Potential& wbar,
                                          int order) {
    Potential w = sigma_potential(c, wbar);
    TruncatedJacobianAlgebra base_alg(c.base(), wbar, order);
    TruncatedJacobianAlgebra total_alg(c.total(), w, order);

    // Matrix of the induced linear map on residue classes, base basis to
    // total basis, assembled per block pair.
    std::vector<Path> base_basis;
    for (int s = 0; s < c.base().vertex_count(); ++s)
        for (int t = 0; t < c.base().vertex_count(); ++t)
            for (const auto& p : base_alg.block_basis(s, t)) base_basis.push_back(p);

    std::vector<Path> total_basis;
    std::map<Path, int, PathLess> total_row;
    for (int s = 0; s < c.total().vertex_count(); ++s)
        for (int t = 0; t < c.total().vertex_count(); ++t)
            for (const auto& p : total_alg.block_basis(s, t)) {
                total_row.emplace(p, static_cast<int>(total_basis.size()));
                total_basis.push_back(p);
            }

    Mat m = mat_zero(static_cast<int>(total_basis.size()), static_cast<int>(base_basis.size()));
    for (size_t col = 0; col < base_basis.size(); ++col) {
        AlgebraElement img = total_alg.normal_form(sigma_path(c, base_basis[col]));
        for (const auto& [p, coeff] : img.terms()) m[total_row.at(p)][col] = coeff;
    }
    InjectivityResult r;
    r.base_dim = static_cast<long long>(base_basis.size());
    r.total_dim = static_cast<long long>(total_basis.size());
    r.kernel_dim = r.base_dim - rank(m);
    r.injective = r.kernel_dim == 0;
    return r;
}

std::vector<DeckElement> find_deck_transformations(const Quiver& total, const Quiver& base,
                                                   const std::vector<int>& vmap,
                                                   const std::vector<int>& amap) {
    std::vector<DeckElement> found;
    if (total.vertex_count() == 0) return found;
    int root = 0;
    for (int cand = 0; cand < total.vertex_count(); ++cand) {
        if (vmap[cand] != vmap[root]) continue;
        DeckElement g;
        g.vperm.assign(total.vertex_count(), -1);
        g.aperm.assign(total.arrow_count(), -1);
        g.vperm[root] = cand;
        std::deque<int> todo{root};
        bool ok = true;
        while (ok && !todo.empty()) {
            int v = todo.front();
            todo.pop_front();
            auto extend = [&](int a, bool outgoing) {
                int w = outgoing ? total.arrow(a).tgt : total.arrow(a).src;
                int anchor = g.vperm[v];
                int image = -1;
                const auto& cands = outgoing ? total.arrows_from(anchor) : total.arrows_into(anchor);
                for (int b : cands)
                    if (amap[b] == amap[a]) {
                        if (image >= 0) { ok = false; return; }
                        image = b;
                    }
                if (image < 0) { ok = false; return; }
                if (g.aperm[a] >= 0 && g.aperm[a] != image) { ok = false; return; }
                g.aperm[a] = image;
                int wi = outgoing ? total.arrow(image).tgt : total.arrow(image).src;
                if (g.vperm[w] == -1) {
                    g.vperm[w] = wi;
                    todo.push_back(w);
                } else if (g.vperm[w] != wi) {
                    ok = false;
                }
            };
            for (int a : total.arrows_from(v)) { extend(a, true); if (!ok) break; }
            if (!ok) break;
            for (int a : total.arrows_into(v)) { extend(a, false); if (!ok) break; }
        }
        if (!ok) continue;
        // connected totals reach everything; otherwise reject partial maps
        bool complete = true;
        for (int v : g.vperm)
            if (v == -1) complete = false;
        for (int a : g.aperm)
            if (a == -1) complete = false;
        if (!complete) continue;
        // check bijectivity and incidence
        std::set<int> vs(g.vperm.begin(), g.vperm.end());
        std::set<int> as(g.aperm.begin(), g.aperm.end());
        if (static_cast<int>(vs.size()) != total.vertex_count() ||
            static_cast<int>(as.size()) != total.arrow_count())
            continue;
        bool incident = true;
        for (int a = 0; a < total.arrow_count(); ++a) {
            const Arrow& ar = total.arrow(a);
            const Arrow& im = total.arrow(g.aperm[a]);
            if (im.src != g.vperm[ar.src] || im.tgt != g.vperm[ar.tgt]) incident = false;
        }
        if (incident) found.push_back(std::move(g));
    }
    (void)base;
    return found;
}

QuiverCovering compose_coverings(const QuiverCovering& c1, const QuiverCovering& c2) {
    if (&c1.base() != &c2.total())
        throw StructuralError("compose_coverings: base of the first is not the total of the second");
    std::vector<int> vmap(c1.total().vertex_count());
    std::vector<int> amap(c1.total().arrow_count());
    for (int v = 0; v < c1.total().vertex_count(); ++v) vmap[v] = c2.vmap(c1.vmap(v));
    for (int a = 0; a < c1.total().arrow_count(); ++a) amap[a] = c2.amap(c1.amap(a));
    auto deck = find_deck_transformations(c1.total(), c2.base(), vmap, amap);
    int expected = c1.degree() * c2.degree();
    if (static_cast<int>(deck.size()) != expected)
        throw StructuralError("compose_coverings: composite deck group has order " +
                              std::to_string(deck.size()) + ", expected " +
                              std::to_string(expected));
    return QuiverCovering(c1.total_ptr(), c2.base_ptr(), std::move(vmap), std::move(amap),
                          std::move(deck), expected);
}

SheetLabeling sheet_labeling_from_map(const QuiverCovering& c, const std::vector<int>& sheet) {
    const Quiver& T = c.total();
    SheetLabeling lab;
    lab.d = c.degree();
    lab.sheet = sheet;
    if (static_cast<int>(sheet.size()) != T.vertex_count())
        throw StructuralError("sheet labeling: wrong size");
    if (c.generators().size() != 1)
        throw StructuralError("sheet labeling requires a cyclic deck group with one generator");
    const DeckElement& g = c.generators()[0];
    for (int v = 0; v < T.vertex_count(); ++v) {
        if (sheet[v] < 0 || sheet[v] >= lab.d)
            throw StructuralError("sheet labeling: label out of range at " + T.vertex(v).name);
        if (sheet[g.vperm[v]] != (sheet[v] + 1) % lab.d)
            throw StructuralError("sheet labeling: generator does not advance sheets at " +
                                  T.vertex(v).name);
    }
    for (int a = 0; a < T.arrow_count(); ++a) {
        const Arrow& ar = T.arrow(a);
        int shift = ((sheet[ar.tgt] - sheet[ar.src]) % lab.d + lab.d) % lab.d;
        auto [it, fresh] = lab.delta.emplace(c.amap(a), shift);
        if (!fresh && it->second != shift)
            throw StructuralError("sheet labeling: inconsistent shift for base arrow " +
                                  c.base().arrow(c.amap(a)).name);
    }
    return lab;
}

SheetLabeling compute_sheet_labeling(const QuiverCovering& c) {
    const Quiver& T = c.total();
    if (c.generators().size() != 1)
        throw StructuralError("sheet labeling requires a cyclic deck group with one generator");
    const DeckElement& g = c.generators()[0];
    std::vector<int> sheet(T.vertex_count(), -1);
    if (T.vertex_count() == 0) return sheet_labeling_from_map(c, sheet);

    // Spread sheet 0 across one representative per fiber by breadth-first
    // search that keeps tree neighbours on the same sheet, then push the
    // labels around each fiber with the generator.
    auto fibers = c.vertex_fibers();
    std::vector<int> fiber_done(c.base().vertex_count(), 0);
    auto label_fiber = [&](int rep, int value) {
        int v = rep;
        int s = value;
        for (int k = 0; k < c.degree(); ++k) {
            sheet[v] = ((s % c.degree()) + c.degree()) % c.degree();
            v = g.vperm[v];
            ++s;
        }
        fiber_done[c.vmap(rep)] = 1;
    };
    label_fiber(0, 0);
    std::deque<int> todo{0};
    std::vector<int> seen(T.vertex_count(), 0);
    seen[0] = 1;
    while (!todo.empty()) {
        int v = todo.front();
        todo.pop_front();
        auto visit = [&](int w) {
            if (seen[w]) return;
            seen[w] = 1;
            if (!fiber_done[c.vmap(w)]) label_fiber(w, sheet[v]);
            todo.push_back(w);
        };
        for (int a : T.arrows_from(v)) visit(T.arrow(a).tgt);
        for (int a : T.arrows_into(v)) visit(T.arrow(a).src);
    }
    for (int v = 0; v < T.vertex_count(); ++v)
        if (sheet[v] == -1) {
            std::string components = "total quiver is disconnected; unlabeled vertex " +
                                     T.vertex(v).name;
            throw StructuralError("sheet labeling: " + components);
        }
    return sheet_labeling_from_map(c, sheet);
}

SeedCovering induced_seed_covering(const QuiverCovering& c) {
    Seed total_seed = seed_from_quiver(c.total());
    std::vector<std::vector<int>> orbits = c.vertex_fibers();
    std::vector<std::string> names;
    for (int vb = 0; vb < c.base().vertex_count(); ++vb) names.push_back(c.base().vertex(vb).name);
    return seed_covering(total_seed, orbits, names);
}

} // namespace qpcover
