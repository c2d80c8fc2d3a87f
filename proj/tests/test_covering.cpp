#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpcover/covering.hpp"
#include "qpcover/document.hpp"
#include "qpcover/errors.hpp"
#include "qpcover/exact_linalg.hpp"

using namespace qpcover;

namespace {

const DocumentModel& reg() { return fixture_registry(); }

QuiverCovering identity_cover(QuiverPtr q) {
    std::vector<int> vmap(q->vertex_count()), amap(q->arrow_count());
    for (int v = 0; v < q->vertex_count(); ++v) vmap[v] = v;
    for (int a = 0; a < q->arrow_count(); ++a) amap[a] = a;
    return QuiverCovering(q, q, vmap, amap, {deck_identity(*q)}, 1);
}

// cyclic d:1 cover of the one-loop quiver
QuiverCovering loop_cover(QuiverPtr base, int d, QuiverPtr* out_total) {
    QuiverBuilder qb;
    for (int s = 0; s < d; ++s) qb.add_vertex("v" + std::to_string(s), false);
    for (int s = 0; s < d; ++s)
        qb.add_arrow("l" + std::to_string(s), "v" + std::to_string(s),
                     "v" + std::to_string((s + 1) % d));
    QuiverPtr total = qb.build();
    *out_total = total;
    DeckElement g;
    for (int s = 0; s < d; ++s) {
        g.vperm.push_back((s + 1) % d);
        g.aperm.push_back((s + 1) % d);
    }
    return QuiverCovering(total, base, std::vector<int>(d, 0), std::vector<int>(d, 0), {g}, d);
}

} // namespace

TEST_CASE("fixture coverings validate; corrupted data is caught with a witness") {
    for (const char* name :
         {"kronecker-cover2", "torus1p-cover2", "torus1p-cover3", "liegrass-cover2", "loopwrap"}) {
        CHECK_MESSAGE(reg().cover(name).covering->validate().ok(), name);
    }

    QuiverPtr q = reg().quiver_ptr("kronecker");
    QuiverCovering id = identity_cover(q);
    CHECK(id.validate().ok());
    CHECK(id.degree() == 1);

    // corrupt one arrow image: send b2 to a instead of b
    const QuiverCovering& good = *reg().cover("kronecker-cover2").covering;
    std::vector<int> amap;
    for (int a = 0; a < q->arrow_count(); ++a) amap.push_back(good.amap(a));
    amap[*q->arrow_index("b2")] = good.amap(*q->arrow_index("a2"));
    std::vector<int> vmap;
    for (int v = 0; v < q->vertex_count(); ++v) vmap.push_back(good.vmap(v));
    QuiverCovering bad(good.total_ptr(), good.base_ptr(), vmap, amap, good.generators(), 2);
    ValidationReport rep = bad.validate();
    CHECK_FALSE(rep.ok());
    bool names_b2 = false;
    for (const auto& f : rep.failures)
        if (f.find("b2") != std::string::npos) names_b2 = true;
    CHECK(names_b2);
}

TEST_CASE("unique path lifts through chosen fiber points") {
    const QuiverCovering& c = *reg().cover("kronecker-cover2").covering;
    const Quiver& base = c.base();
    const Quiver& total = c.total();
    Path abar = Path::of_arrows(base, {*base.arrow_index("a")});

    Path at2 = lift_path(c, abar, *total.vertex_index("2"), true);
    CHECK(at2.str() == "a1");
    Path at4 = lift_path(c, abar, *total.vertex_index("4"), true);
    CHECK(at4.str() == "a2");

    Path lazy = lift_path(c, Path::lazy(base, 0), *total.vertex_index("3"), true);
    CHECK(lazy.is_lazy());
    CHECK(lazy.source() == *total.vertex_index("3"));

    CHECK_THROWS_AS(lift_path(c, abar, *total.vertex_index("1"), true), StructuralError);
}

TEST_CASE("lifting a base cycle at every sheet of the triple cover") {
    const QuiverCovering& c = *reg().cover("torus1p-cover3").covering;
    const Quiver& base = c.base();
    // a length-6 rotation cycle in the base
    std::vector<int> arrows;
    for (const char* n : {"a1", "b2", "c1", "a2", "b1", "c2"}) arrows.push_back(*base.arrow_index(n));
    Path cycle = Path::of_arrows(base, arrows);
    REQUIRE(cycle.is_cycle());

    std::vector<Path> lifts;
    for (int v = 0; v < c.total().vertex_count(); ++v) {
        if (c.vmap(v) != cycle.source()) continue;
        lifts.push_back(lift_path(c, cycle, v, true));
    }
    CHECK(lifts.size() == 3);
    for (size_t i = 0; i < lifts.size(); ++i) {
        CHECK(project_path(c, lifts[i]).arrows() == cycle.arrows());
        for (size_t j = i + 1; j < lifts.size(); ++j) CHECK_FALSE(lifts[i] == lifts[j]);
    }
    // anchoring at the end recovers the same lifts
    for (const Path& p : lifts) CHECK(lift_path(c, cycle, p.target(), false) == p);
}

TEST_CASE("sigma: fiber sums, identity sums and potentials") {
    const QuiverCovering& c = *reg().cover("kronecker-cover2").covering;
    const Quiver& base = c.base();
    AlgebraElement sa = sigma_path(c, Path::of_arrows(base, {*base.arrow_index("a")}));
    CHECK(sa.term_count() == 2);
    CHECK(sa.coefficient(Path::of_arrows(c.total(), {*c.total().arrow_index("a1")})) == Rat(1));
    CHECK(sa.coefficient(Path::of_arrows(c.total(), {*c.total().arrow_index("a2")})) == Rat(1));

    AlgebraElement se = sigma_path(c, Path::lazy(base, *base.vertex_index("1")));
    CHECK(se.term_count() == 2);

    const QuiverCovering& t3 = *reg().cover("torus1p-cover3").covering;
    const Potential& wbar = reg().potential("torus1p-w");
    Potential w = sigma_potential(t3, wbar);
    CHECK(w.terms().size() == 3 * wbar.terms().size());
    // pi(W) = d * Wbar
    Potential wsum(*wbar.quiver());
    for (int i = 0; i < 3; ++i)
        for (const auto& [coeff, cyc] : wbar.terms()) wsum.add_term(coeff, cyc);
    CHECK(project_potential(t3, w).cyclically_equal(wsum));
    // and it matches the surface potential of the total triangulation
    CHECK(w.cyclically_equal(reg().potential("torus1p-cover3-w")));
}

TEST_CASE("sigma is multiplicative on truncated base elements") {
    for (const char* name : {"kronecker-cover2", "torus1p-cover3"}) {
        const QuiverCovering& c = *reg().cover(name).covering;
        auto paths = enumerate_paths(c.base(), {}, 2);
        for (const auto& p : paths)
            for (const auto& q : paths) {
                AlgebraElement lhs(c.total());
                if (auto pq = compose(p, q)) lhs = sigma_path(c, *pq);
                AlgebraElement rhs = sigma_path(c, p) * sigma_path(c, q);
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("deck orbits are exactly the lifts of the projection") {
    const QuiverCovering& c = *reg().cover("torus1p-cover2").covering;
    for (const auto& p : enumerate_paths(c.total(), {}, 3)) {
        AlgebraElement orbit_sum(c.total());
        for (const auto& g : c.deck_group()) orbit_sum.add(deck_apply(c.total(), g, p), Rat(1));
        CHECK(sigma_path(c, project_path(c, p)) == orbit_sum);
    }
}

TEST_CASE("a deck transformation is determined by one fiber") {
    const QuiverCovering& c = *reg().cover("torus1p-cover3").covering;
    auto found = find_deck_transformations(c.total(), c.base(),
                                           [&] {
                                               std::vector<int> m(c.total().vertex_count());
                                               for (int v = 0; v < c.total().vertex_count(); ++v)
                                                   m[v] = c.vmap(v);
                                               return m;
                                           }(),
                                           [&] {
                                               std::vector<int> m(c.total().arrow_count());
                                               for (int a = 0; a < c.total().arrow_count(); ++a)
                                                   m[a] = c.amap(a);
                                               return m;
                                           }());
    CHECK(found.size() == 3);
    // reconstruction recovers the declared generator among them
    bool has_gen = false;
    for (const auto& g : found)
        if (g == c.generators()[0]) has_gen = true;
    CHECK(has_gen);
}

TEST_CASE("derivative/sigma exchange for every base arrow") {
    struct Case {
        const char* cover;
        const char* wbar;
    };
    for (const Case cs : {Case{"torus1p-cover3", "torus1p-w"}, Case{"liegrass-cover2", "liegrass-base-w"},
                          Case{"loopwrap", "loop-base-w"}}) {
        const QuiverCovering& c = *reg().cover(cs.cover).covering;
        const Potential& wbar = reg().potential(cs.wbar);
        Potential w = sigma_potential(c, wbar);
        for (int ab = 0; ab < c.base().arrow_count(); ++ab) {
            AlgebraElement lhs = sigma(c, cyclic_derivative(ab, wbar));
            AlgebraElement rhs(c.total());
            for (int a = 0; a < c.total().arrow_count(); ++a)
                if (c.amap(a) == ab) rhs += cyclic_derivative(a, w);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("free truncated modules pull back to free base modules") {
    const QuiverCovering& c = *reg().cover("torus1p-cover3").covering;
    Potential zero_total(c.total());
    Potential zero_base(c.base());
    int l = 3;
    TruncatedJacobianAlgebra ta(c.total(), zero_total, l);
    TruncatedJacobianAlgebra ba(c.base(), zero_base, l);
    for (int k = 0; k < c.total().vertex_count(); ++k) {
        ProjectiveModulePresentation pk = projective_presentation(ta, k);
        ProjectiveModulePresentation pb = projective_presentation(ba, c.vmap(k));
        DimVec pushed(c.base().vertex_count(), 0);
        for (int v = 0; v < c.total().vertex_count(); ++v) pushed[c.vmap(v)] += pk.mod.dims[v];
        CHECK(pushed == pb.mod.dims);
    }
}

TEST_CASE("pullback of the Kronecker projective is the base projective") {
    const QuiverCovering& c = *reg().cover("kronecker-cover2").covering;
    Potential wbar(c.base());
    int l = 2;
    TruncatedJacobianAlgebra total_alg(c.total(), sigma_potential(c, wbar), l);
    TruncatedJacobianAlgebra base_alg(c.base(), wbar, l);
    ProjectiveModulePresentation p2 = projective_presentation(total_alg, 1); // vertex "2"
    ModulePresentation pulled = pullback_module(c, p2.mod, wbar, l);
    ProjectiveModulePresentation pbar = projective_presentation(base_alg, c.vmap(1));
    CHECK(pulled.dims == pbar.mod.dims);
    CHECK(pulled.total_dim() == 3);

    ModulePresentation zero;
    zero.quiver = &c.total();
    zero.dims.assign(c.total().vertex_count(), 0);
    zero.action.resize(c.total().arrow_count());
    for (int a = 0; a < c.total().arrow_count(); ++a) zero.action[a] = Mat{};
    ModulePresentation zpull = pullback_module(c, zero, wbar, l);
    CHECK(zpull.total_dim() == 0);
}

TEST_CASE("pullback of projectives matches the base projective with its action") {
    struct Case {
        const char* cover;
        const char* wbar;
        int order;
    };
    for (const Case cs : {Case{"kronecker-cover2", "", 2}, Case{"torus1p-cover3", "torus1p-w", 7}}) {
        const QuiverCovering& c = *reg().cover(cs.cover).covering;
        Potential wbar = *cs.wbar ? reg().potential(cs.wbar) : Potential(c.base());
        Potential w = sigma_potential(c, wbar);
        TruncatedJacobianAlgebra total_alg(c.total(), w, cs.order);
        TruncatedJacobianAlgebra base_alg(c.base(), wbar, cs.order);
        for (int k = 0; k < c.total().vertex_count(); ++k) {
            ProjectiveModulePresentation pk = projective_presentation(total_alg, k);
            ProjectiveModulePresentation pb = projective_presentation(base_alg, c.vmap(k));
            REQUIRE(pk.basis.size() == pb.basis.size());

            // Phi: class of cover path p  |->  class of pi(p) in the base
            const Quiver& B = c.base();
            std::vector<std::map<Path, int, PathLess>> row_of(B.vertex_count());
            std::vector<int> offset(B.vertex_count(), 0);
            for (size_t i = 0; i < pb.basis.size(); ++i)
                row_of[pb.basis_vertex[i]].emplace(pb.basis[i], offset[pb.basis_vertex[i]]++);

            std::vector<Mat> phi(B.vertex_count());
            std::vector<int> col_count(B.vertex_count(), 0);
            // columns follow the pullback layout: fibers in order, then local index
            auto vf = c.vertex_fibers();
            for (int vb = 0; vb < B.vertex_count(); ++vb) {
                int cols = 0;
                for (int v : vf[vb]) cols += static_cast<int>(pk.mod.dims[v]);
                phi[vb] = mat_zero(static_cast<int>(pb.mod.dims[vb]), cols);
                col_count[vb] = cols;
            }
            std::vector<int> next_col(B.vertex_count(), 0);
            for (int vb = 0; vb < B.vertex_count(); ++vb) {
                for (int v : vf[vb]) {
                    for (size_t i = 0; i < pk.basis.size(); ++i) {
                        if (pk.basis_vertex[i] != v) continue;
                        AlgebraElement img = base_alg.normal_form(project_path(c, pk.basis[i]));
                        int col = next_col[vb]++;
                        for (const auto& [bp, coeff] : img.terms())
                            phi[vb][row_of[vb].at(bp)][col] = coeff;
                    }
                }
            }
            for (int vb = 0; vb < B.vertex_count(); ++vb)
                CHECK(rank(phi[vb]) == static_cast<int>(pb.mod.dims[vb]));

            ModulePresentation pulled = pullback_module(c, pk.mod, wbar, cs.order);
            CHECK(pulled.dims == pb.mod.dims);
            for (int ab = 0; ab < B.arrow_count(); ++ab) {
                const Arrow& br = B.arrow(ab);
                Mat lhs = mat_mul(phi[br.tgt], pulled.action[ab]);
                Mat rhs = mat_mul(pb.mod.action[ab], phi[br.src]);
                CHECK(mat_equal(lhs, rhs));
            }
        }
    }
}

TEST_CASE("sigma induces an injective map of truncated Jacobian algebras") {
    {
        const QuiverCovering& c = *reg().cover("kronecker-cover2").covering;
        InjectivityResult r = check_sigma_injectivity(c, Potential(c.base()), 2);
        CHECK(r.injective);
        CHECK(r.base_dim == 4);
    }
    {
        QuiverPtr q = reg().quiver_ptr("torus1p");
        QuiverCovering id = identity_cover(q);
        InjectivityResult r = check_sigma_injectivity(id, reg().potential("torus1p-w"), 6);
        CHECK(r.injective);
        CHECK(r.base_dim == r.total_dim);
    }
    {
        const QuiverCovering& c = *reg().cover("torus1p-cover3").covering;
        const Potential& wbar = reg().potential("torus1p-w");
        auto stab = stabilization_order(c.base(), wbar, 8);
        REQUIRE(stab.has_value());
        InjectivityResult r = check_sigma_injectivity(c, wbar, *stab);
        CHECK(r.injective);
    }
}

TEST_CASE("composition of coverings") {
    QuiverBuilder qb;
    qb.add_vertex("v", false);
    qb.add_arrow("l", "v", "v");
    QuiverPtr base = qb.build();

    QuiverPtr mid_ptr, top_ptr;
    QuiverCovering mid = loop_cover(base, 2, &mid_ptr);
    // 3:1 cover of the 2-cycle quiver: the 6-cycle
    QuiverBuilder tb;
    for (int s = 0; s < 6; ++s) tb.add_vertex("w" + std::to_string(s), false);
    for (int s = 0; s < 6; ++s)
        tb.add_arrow("m" + std::to_string(s), "w" + std::to_string(s),
                     "w" + std::to_string((s + 1) % 6));
    top_ptr = tb.build();
    DeckElement g;
    for (int s = 0; s < 6; ++s) {
        g.vperm.push_back((s + 2) % 6);
        g.aperm.push_back((s + 2) % 6);
    }
    std::vector<int> vmap(6), amap(6);
    for (int s = 0; s < 6; ++s) vmap[s] = amap[s] = s % 2;
    QuiverCovering top(top_ptr, mid_ptr, vmap, amap, {g}, 3);
    REQUIRE(top.validate().ok());
    REQUIRE(mid.validate().ok());

    QuiverCovering composite = compose_coverings(top, mid);
    CHECK(composite.degree() == 6);
    CHECK(composite.validate().ok());
    for (const auto& fiber : composite.vertex_fibers()) CHECK(fiber.size() == 6);

    QuiverCovering id = identity_cover(base);
    QuiverCovering same = compose_coverings(mid, id);
    CHECK(same.degree() == 2);
    for (int v = 0; v < mid.total().vertex_count(); ++v) CHECK(same.vmap(v) == mid.vmap(v));
}

TEST_CASE("breadth-first sheet labelings are valid and cycle-compatible") {
    const CoverEntry& e = fixture_registry().cover("torus1p-cover3");
    SheetLabeling computed = compute_sheet_labeling(*e.covering); // validates internally
    CHECK(computed.d == 3);
    // every closed base cycle winds by 0 mod d under any compatible labeling
    const Potential& wbar = fixture_registry().potential("torus1p-w");
    for (const auto& [c0, cyc] : wbar.terms()) {
        int sum = 0;
        for (int a : cyc.arrows()) sum += computed.delta.at(a);
        CHECK(sum % 3 == 0);
    }
}
