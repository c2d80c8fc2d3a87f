#include "qpcover/grading.hpp"

#include <algorithm>
#include <functional>

#include "qpcover/errors.hpp"

namespace qpcover {

GradingCheck check_nice_grading(const QuiverCovering& c, const SupportData& supp,
                                const std::map<int, int>& vertex_degree) {
    const Quiver& T = c.total();
    GradingCheck rep;
    for (int v : supp.vertices)
        if (!vertex_degree.count(v))
            throw StructuralError("nice grading check: vertex " + T.vertex(v).name +
                                  " of the support has no degree");
    // fiber injectivity on the support
    auto fibers = c.vertex_fibers();
    for (const auto& fiber : fibers) {
        for (size_t i = 0; i < fiber.size(); ++i) {
            if (!supp.vertices.count(fiber[i])) continue;
            for (size_t j = i + 1; j < fiber.size(); ++j) {
                if (!supp.vertices.count(fiber[j])) continue;
                if (vertex_degree.at(fiber[i]) == vertex_degree.at(fiber[j]))
                    rep.violations.push_back("vertices " + T.vertex(fiber[i]).name + " and " +
                                             T.vertex(fiber[j]).name +
                                             " share a fiber and a degree");
            }
        }
    }
    // fiber-constant arrow degrees on the support
    std::map<int, std::pair<int, int>> seen; // base arrow -> (arrow, degree)
    for (int a : supp.arrows) {
        const Arrow& ar = T.arrow(a);
        int deg = vertex_degree.at(ar.tgt) - vertex_degree.at(ar.src);
        auto [it, fresh] = seen.emplace(c.amap(a), std::pair(a, deg));
        if (!fresh && it->second.second != deg)
            rep.violations.push_back("arrows " + T.arrow(it->second.first).name + " and " +
                                     ar.name + " share a fiber but have degrees " +
                                     std::to_string(it->second.second) + " and " +
                                     std::to_string(deg));
    }
    return rep;
}

GradingCheck check_nice_grading(const QuiverCovering& c, const ProjectiveModulePresentation& p,
                                const std::map<int, int>& vertex_degree) {
    return check_nice_grading(c, supports(p.mod), vertex_degree);
}

namespace {

// weighted union-find over support vertices: value(child) - value(parent)
struct OffsetDsu {
    std::vector<int> parent;
    std::vector<int> offset; // value(i) - value(parent(i))
    explicit OffsetDsu(int n) : parent(n), offset(n, 0) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    std::pair<int, int> find(int x) {
        if (parent[x] == x) return {x, 0};
        auto [root, off] = find(parent[x]);
        parent[x] = root;
        offset[x] += off;
        return {root, offset[x]};
    }
    // impose value(b) - value(a) = diff; false on conflict
    bool merge(int a, int b, int diff) {
        auto [ra, oa] = find(a);
        auto [rb, ob] = find(b);
        if (ra == rb) return ob - oa == diff;
        parent[rb] = ra;
        offset[rb] = oa + diff - ob;
        return true;
    }
};

} // namespace

std::optional<NiceGrading> find_nice_grading(const QuiverCovering& c,
                                             const ProjectiveModulePresentation& p, int bound,
                                             const SheetLabeling* labeling) {
    if (bound < 1) throw StructuralError("find_nice_grading: bound must be >= 1");
    const Quiver& T = c.total();
    SupportData supp = supports(p.mod);
    int d = c.degree();

    // variables: base-arrow orbits meeting the support, in base arrow order
    std::map<int, std::vector<int>> orbit_arrows;
    for (int a : supp.arrows) orbit_arrows[c.amap(a)].push_back(a);
    std::vector<int> orbit_ids;
    for (const auto& [ob, list] : orbit_arrows) orbit_ids.push_back(ob);

    // candidate values per orbit, magnitude order with positive first
    std::vector<std::vector<int>> domain;
    for (int ob : orbit_ids) {
        std::vector<int> vals;
        for (int v = -bound * d; v <= bound * d; ++v) {
            if (labeling) {
                int delta = labeling->delta.at(ob);
                if (((v - delta) % d + d) % d != 0) continue;
            }
            vals.push_back(v);
        }
        std::sort(vals.begin(), vals.end(), [](int x, int y) {
            auto key = [](int v) { return std::pair(std::abs(v), v < 0); };
            return key(x) < key(y);
        });
        domain.push_back(std::move(vals));
    }

    std::vector<int> supp_vertices(supp.vertices.begin(), supp.vertices.end());
    std::map<int, int> vpos;
    for (size_t i = 0; i < supp_vertices.size(); ++i) vpos[supp_vertices[i]] = static_cast<int>(i);

    auto fibers = c.vertex_fibers();

    std::vector<int> chosen(orbit_ids.size(), 0);
    std::optional<NiceGrading> result;

    auto evaluate = [&](const OffsetDsu& dsu_in) -> bool {
        // all orbit degrees assigned consistently; read off vertex values
        OffsetDsu dsu = dsu_in;
        std::map<int, int> value;
        for (int v : supp_vertices) {
            auto [root, off] = dsu.find(vpos[v]);
            value[v] = off; // roots at 0 per component
        }
        for (const auto& fiber : fibers) {
            for (size_t i = 0; i < fiber.size(); ++i) {
                if (!supp.vertices.count(fiber[i])) continue;
                for (size_t j = i + 1; j < fiber.size(); ++j) {
                    if (!supp.vertices.count(fiber[j])) continue;
                    if (value.at(fiber[i]) == value.at(fiber[j])) return false;
                }
            }
        }
        NiceGrading g;
        g.bound = bound;
        g.vertex_degree = value;
        for (int a : supp.arrows)
            g.arrow_degree[a] = value.at(T.arrow(a).tgt) - value.at(T.arrow(a).src);
        result = std::move(g);
        return true;
    };

    std::function<bool(size_t, OffsetDsu)> search = [&](size_t k, OffsetDsu dsu) -> bool {
        if (k == orbit_ids.size()) return evaluate(dsu);
        for (int v : domain[k]) {
            OffsetDsu next = dsu;
            bool ok = true;
            for (int a : orbit_arrows[orbit_ids[k]]) {
                const Arrow& ar = T.arrow(a);
                if (!next.merge(vpos.at(ar.src), vpos.at(ar.tgt), v)) {
                    ok = false;
                    break;
                }
            }
            if (ok && search(k + 1, next)) return true;
        }
        return false;
    };

    search(0, OffsetDsu(static_cast<int>(supp_vertices.size())));
    return result;
}

std::optional<WrapAssignment> check_non_wrapping(const QuiverCovering& c,
                                                 const SheetLabeling& labeling, const Potential& w,
                                                 const NonWrapOptions& opts) {
    if (w.quiver() != &c.total())
        throw StructuralError("check_non_wrapping: potential not over the total quiver");
    int d = labeling.d;

    // terms as base-arrow multisets
    std::vector<std::map<int, int>> term_uses;
    std::set<int> vars_set;
    for (const auto& [coeff, cyc] : w.terms()) {
        std::map<int, int> uses;
        for (int a : cyc.arrows()) {
            ++uses[c.amap(a)];
            vars_set.insert(c.amap(a));
        }
        term_uses.push_back(std::move(uses));
    }
    std::vector<int> vars(vars_set.begin(), vars_set.end());
    if (static_cast<int>(vars.size()) > opts.max_plain_vars && !opts.allow_large)
        throw ResourceError("check_non_wrapping: " + std::to_string(vars.size()) +
                            " undetermined binary variables; rerun with the branch-and-bound "
                            "fallback enabled");

    // per-term partial sums with bounds pruning
    std::vector<int> lo(vars.size()), hi(vars.size());
    for (size_t k = 0; k < vars.size(); ++k) {
        int delta = labeling.delta.at(vars[k]);
        lo[k] = delta - d;
        hi[k] = delta;
    }
    std::vector<int> choice(vars.size(), 0);
    std::map<int, size_t> var_pos;
    for (size_t k = 0; k < vars.size(); ++k) var_pos[vars[k]] = k;

    std::optional<WrapAssignment> result;
    std::function<bool(size_t)> search = [&](size_t k) -> bool {
        if (k == vars.size()) {
            WrapAssignment wa;
            wa.d = d;
            for (size_t i = 0; i < vars.size(); ++i) wa.degree[vars[i]] = choice[i];
            result = std::move(wa);
            return true;
        }
        int delta = labeling.delta.at(vars[k]);
        for (int v : {delta, delta - d}) {
            choice[k] = v;
            bool feasible = true;
            for (const auto& uses : term_uses) {
                long long fixed = 0, min_rest = 0, max_rest = 0;
                for (const auto& [ob, mult] : uses) {
                    size_t pos = var_pos.at(ob);
                    if (pos <= k) {
                        fixed += static_cast<long long>(mult) * choice[pos];
                    } else {
                        min_rest += static_cast<long long>(mult) * lo[pos];
                        max_rest += static_cast<long long>(mult) * hi[pos];
                    }
                }
                if (fixed + min_rest > 0 || fixed + max_rest < 0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible && search(k + 1)) return true;
        }
        return false;
    };
    search(0);
    return result;
}

ExtendedCover build_extended_cyclic_cover(const QuiverCovering& c, const SheetLabeling& labeling,
                                          const WrapAssignment& wa, const Potential& wbar, int l) {
    int d = c.degree();
    if (d <= 1) throw StructuralError("extended cover: the covering degree must exceed 1");
    if (l < 1) throw StructuralError("extended cover: order must be >= 1");
    const Quiver& B = c.base();
    int D = 2 * l * d;

    auto sheet_name = [](const std::string& n, int s) {
        return n + "^(" + std::to_string(s) + ")";
    };
    QuiverBuilder qb;
    for (int v = 0; v < B.vertex_count(); ++v)
        for (int s = 0; s < D; ++s) qb.add_vertex(sheet_name(B.vertex(v).name, s), B.vertex(v).frozen);
    auto vat = [&](int v, int s) { return v * D + ((s % D) + D) % D; };
    std::vector<std::vector<int>> arrow_at(B.arrow_count(), std::vector<int>(D));
    for (int ab = 0; ab < B.arrow_count(); ++ab) {
        const Arrow& br = B.arrow(ab);
        int shift = wa.degree.at(ab);
        for (int s = 0; s < D; ++s)
            arrow_at[ab][s] = qb.add_arrow(sheet_name(br.name, s), vat(br.src, s),
                                           vat(br.tgt, s + shift));
    }
    QuiverPtr ext = qb.build();

    std::vector<int> vmap(ext->vertex_count()), amap(ext->arrow_count());
    for (int v = 0; v < B.vertex_count(); ++v)
        for (int s = 0; s < D; ++s) vmap[vat(v, s)] = v;
    for (int ab = 0; ab < B.arrow_count(); ++ab)
        for (int s = 0; s < D; ++s) amap[arrow_at[ab][s]] = ab;
    DeckElement gen;
    gen.vperm.resize(ext->vertex_count());
    gen.aperm.resize(ext->arrow_count());
    for (int v = 0; v < B.vertex_count(); ++v)
        for (int s = 0; s < D; ++s) gen.vperm[vat(v, s)] = vat(v, s + 1);
    for (int ab = 0; ab < B.arrow_count(); ++ab)
        for (int s = 0; s < D; ++s) gen.aperm[arrow_at[ab][s]] = arrow_at[ab][(s + 1) % D];
    QuiverCovering to_base(ext, c.base_ptr(), vmap, amap, {gen}, D);

    std::vector<int> sheets(ext->vertex_count());
    for (int v = 0; v < B.vertex_count(); ++v)
        for (int s = 0; s < D; ++s) sheets[vat(v, s)] = s;
    SheetLabeling lab = sheet_labeling_from_map(to_base, sheets);

    // winding zero makes every lifted term close up; sigma_potential checks
    Potential wt = sigma_potential(to_base, wbar);

    // factor through the original covering: sheet s lands on the vertex of
    // the middle cover carrying label s mod d
    auto vfibers = c.vertex_fibers();
    std::vector<int> vmap2(ext->vertex_count(), -1), amap2(ext->arrow_count(), -1);
    for (int v = 0; v < B.vertex_count(); ++v)
        for (int s = 0; s < D; ++s) {
            int want = ((s % d) + d) % d;
            for (int m : vfibers[v])
                if (labeling.sheet[m] == want) vmap2[vat(v, s)] = m;
        }
    for (int ab = 0; ab < B.arrow_count(); ++ab)
        for (int s = 0; s < D; ++s) {
            int src_mid = vmap2[vat(B.arrow(ab).src, s)];
            int img = -1;
            for (int a : c.total().arrows_from(src_mid))
                if (c.amap(a) == ab) img = a;
            if (img < 0) throw StructuralError("extended cover: no middle lift of " + B.arrow(ab).name);
            amap2[arrow_at[ab][s]] = img;
        }
    DeckElement gen_d = gen;
    for (int k = 1; k < d; ++k) gen_d = deck_compose(gen, gen_d);
    QuiverCovering to_mid(ext, c.total_ptr(), vmap2, amap2, {gen_d}, 2 * l);

    return ExtendedCover{std::move(to_base), std::move(to_mid), std::move(lab), std::move(wt)};
}

} // namespace qpcover
