#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpcover/document.hpp"
#include "qpcover/errors.hpp"
#include "qpcover/grading.hpp"
#include "qpcover/scattering.hpp"

using namespace qpcover;

namespace {

const DocumentModel& reg() { return fixture_registry(); }

ProjectiveModulePresentation cover_projective(const char* cover, const char* wbar_name,
                                              const char* vertex, int order,
                                              const QuiverCovering** out_cov,
                                              const SheetLabeling** out_lab) {
    const CoverEntry& e = reg().cover(cover);
    *out_cov = e.covering.get();
    *out_lab = e.labeling ? &*e.labeling : nullptr;
    Potential wbar = *wbar_name ? reg().potential(wbar_name) : Potential(e.covering->base());
    Potential w = sigma_potential(*e.covering, wbar);
    static std::vector<std::shared_ptr<TruncatedJacobianAlgebra>> keep;
    keep.push_back(
        std::make_shared<TruncatedJacobianAlgebra>(e.covering->total(), w, order));
    return projective_presentation(*keep.back(), *e.covering->total().vertex_index(vertex));
}

} // namespace

TEST_CASE("the worked grading on the Kronecker cover passes the check") {
    const QuiverCovering* c;
    const SheetLabeling* lab;
    ProjectiveModulePresentation p = cover_projective("kronecker-cover2", "", "2", 2, &c, &lab);
    const Quiver& q = c->total();
    std::map<int, int> deg{{*q.vertex_index("2"), 0}, {*q.vertex_index("1"), 0},
                           {*q.vertex_index("3"), 1}};
    CHECK(check_nice_grading(*c, p, deg).ok());

    // breaking fiber injectivity is reported
    deg[*q.vertex_index("3")] = 0;
    GradingCheck bad = check_nice_grading(*c, p, deg);
    CHECK_FALSE(bad.ok());

    // a missing vertex is a precondition error
    std::map<int, int> partial{{*q.vertex_index("2"), 0}};
    CHECK_THROWS_AS(check_nice_grading(*c, p, partial), StructuralError);
}

TEST_CASE("trivial fibers admit any constant grading") {
    QuiverPtr q = reg().quiver_ptr("torus1p");
    std::vector<int> idmap_v(q->vertex_count()), idmap_a(q->arrow_count());
    for (int v = 0; v < q->vertex_count(); ++v) idmap_v[v] = v;
    for (int a = 0; a < q->arrow_count(); ++a) idmap_a[a] = a;
    QuiverCovering id(q, q, idmap_v, idmap_a, {deck_identity(*q)}, 1);
    const Potential& w = reg().potential("torus1p-w");
    TruncatedJacobianAlgebra alg(*q, w, 6);
    ProjectiveModulePresentation p = projective_presentation(alg, 0);
    std::map<int, int> deg;
    for (int v = 0; v < q->vertex_count(); ++v) deg[v] = 4;
    CHECK(check_nice_grading(id, p, deg).ok());
}

TEST_CASE("sheet labels give a nice grading on the triple cover") {
    const QuiverCovering* c;
    const SheetLabeling* lab;
    ProjectiveModulePresentation p =
        cover_projective("torus1p-cover3", "torus1p-w", "a^(1)", 7, &c, &lab);
    REQUIRE(lab != nullptr);
    std::map<int, int> deg;
    for (int v : supports(p.mod).vertices) deg[v] = lab->sheet[v];
    CHECK(check_nice_grading(*c, p, deg).ok());
}

TEST_CASE("bounded search finds the worked Kronecker grading up to shift") {
    const QuiverCovering* c;
    const SheetLabeling* lab;
    ProjectiveModulePresentation p = cover_projective("kronecker-cover2", "", "2", 2, &c, &lab);
    auto g = find_nice_grading(*c, p, 1, lab);
    REQUIRE(g.has_value());
    CHECK(check_nice_grading(*c, p, g->vertex_degree).ok());
    const Quiver& q = c->total();
    // arrow degrees are shift-invariant; they pin the grading down
    CHECK(g->arrow_degree.at(*q.arrow_index("a1")) == 0);
    CHECK(g->arrow_degree.at(*q.arrow_index("b1")) == 1);
}

TEST_CASE("single-vertex-per-fiber supports get the zero grading") {
    // P_1 of the Kronecker cover is simple: its support meets each fiber once
    const CoverEntry& e = reg().cover("kronecker-cover2");
    Potential zero(e.covering->total());
    TruncatedJacobianAlgebra alg(e.covering->total(), zero, 1);
    ProjectiveModulePresentation p =
        projective_presentation(alg, *e.covering->total().vertex_index("1"));
    auto g = find_nice_grading(*e.covering, p, 1, &*e.labeling);
    REQUIRE(g.has_value());
    for (const auto& [v, deg] : g->vertex_degree) CHECK(deg == 0);
}

TEST_CASE("every projective of the triple cover is graded with sheet-shift degrees") {
    const CoverEntry& e = reg().cover("torus1p-cover3");
    const Quiver& q = e.covering->total();
    const Potential& w = reg().potential("torus1p-cover3-w");
    TruncatedJacobianAlgebra alg(q, w, 7);
    for (int k = 0; k < q.vertex_count(); ++k) {
        ProjectiveModulePresentation p = projective_presentation(alg, k);
        auto g = find_nice_grading(*e.covering, p, 1, &*e.labeling);
        REQUIRE(g.has_value());
        // arrow degrees agree with the sheet shifts up to the wrap choice
        for (const auto& [a, deg] : g->arrow_degree) {
            int delta = e.labeling->delta.at(e.covering->amap(a));
            CHECK((deg - delta) % 3 == 0);
            CHECK(std::abs(deg) <= 3);
        }
    }
}

TEST_CASE("no sheet-uniform extension to the whole Kronecker cover exists") {
    const CoverEntry& e = reg().cover("kronecker-cover2");
    const Quiver& q = e.covering->total();
    SupportData full;
    for (int v = 0; v < q.vertex_count(); ++v) full.vertices.insert(v);
    for (int a = 0; a < q.arrow_count(); ++a) full.arrows.insert(a);
    // enumerate all gradings in the bound-1 window with one value fixed
    int found = 0;
    for (int d1 = -2; d1 <= 2; ++d1)
        for (int d3 = -2; d3 <= 2; ++d3)
            for (int d4 = -2; d4 <= 2; ++d4) {
                std::map<int, int> deg{{*q.vertex_index("1"), d1}, {*q.vertex_index("2"), 0},
                                       {*q.vertex_index("3"), d3}, {*q.vertex_index("4"), d4}};
                if (check_nice_grading(*e.covering, full, deg).ok()) ++found;
            }
    CHECK(found == 0);
}

TEST_CASE("validity survives shifting a connected component") {
    const QuiverCovering* c;
    const SheetLabeling* lab;
    ProjectiveModulePresentation p =
        cover_projective("torus1p-cover3", "torus1p-w", "b^(1)", 7, &c, &lab);
    auto g = find_nice_grading(*c, p, 1, lab);
    REQUIRE(g.has_value());
    std::map<int, int> shifted = g->vertex_degree;
    for (auto& [v, deg] : shifted) deg += 11; // the support is connected
    CHECK(check_nice_grading(*c, p, shifted).ok());
}

TEST_CASE("non-wrapping assignments") {
    // the Lie-theoretic cover admits one
    {
        const CoverEntry& e = reg().cover("liegrass-cover2");
        Potential w = sigma_potential(*e.covering, reg().potential("liegrass-base-w"));
        auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
        REQUIRE(wa.has_value());
        // winding of every term is zero
        for (const auto& [c0, cyc] : w.terms()) {
            int sum = 0;
            for (int a : cyc.arrows()) sum += wa->degree.at(e.covering->amap(a));
            CHECK(sum == 0);
        }
    }
    // all-zero assignment when the involved shifts vanish
    {
        const CoverEntry& e = reg().cover("liegrass-cover2");
        const Quiver& base = e.covering->base();
        Potential horizontal(base);
        auto path = [&](std::initializer_list<const char*> names) {
            std::vector<int> arrows;
            for (const char* n : names) arrows.push_back(*base.arrow_index(n));
            return Path::of_arrows(base, std::move(arrows));
        };
        horizontal.add_term(Rat(1), path({"a1", "b1", "c"}));
        horizontal.add_term(Rat(1), path({"b1", "c1", "d"}));
        Potential w = sigma_potential(*e.covering, horizontal);
        auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
        REQUIRE(wa.has_value());
        for (const auto& [ab, deg] : wa->degree) CHECK(deg == 0);
    }
    // the wrapping fixture has none
    {
        const CoverEntry& e = reg().cover("loopwrap");
        Potential w = sigma_potential(*e.covering, reg().potential("loop-base-w"));
        auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
        CHECK_FALSE(wa.has_value());
    }
    // torus triple cover is non-wrapping
    {
        const CoverEntry& e = reg().cover("torus1p-cover3");
        Potential w = sigma_potential(*e.covering, reg().potential("torus1p-w"));
        auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
        CHECK(wa.has_value());
    }
}

TEST_CASE("variable guard routes large searches to the fallback flag") {
    const CoverEntry& e = reg().cover("liegrass-cover2");
    Potential w = sigma_potential(*e.covering, reg().potential("liegrass-base-w"));
    NonWrapOptions tight;
    tight.max_plain_vars = 2;
    CHECK_THROWS_AS(check_non_wrapping(*e.covering, *e.labeling, w, tight), ResourceError);
    tight.allow_large = true;
    CHECK(check_non_wrapping(*e.covering, *e.labeling, w, tight).has_value());
}

TEST_CASE("extended cyclic cover: construction, factoring, middle-sheet grading") {
    const CoverEntry& e = reg().cover("liegrass-cover2");
    Potential wbar = reg().potential("liegrass-base-w");
    Potential w = sigma_potential(*e.covering, wbar);
    auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
    REQUIRE(wa.has_value());

    int l = 2, d = 2;
    ExtendedCover ext = build_extended_cyclic_cover(*e.covering, *e.labeling, *wa, wbar, l);
    CHECK(ext.to_base.degree() == 2 * l * d);
    CHECK(ext.to_base.validate().ok());
    CHECK(ext.to_mid.validate().ok());
    for (const auto& [c0, cyc] : ext.total_potential.terms()) CHECK(cyc.is_cycle());

    // the tower composes back to the extended projection
    QuiverCovering composed = compose_coverings(ext.to_mid, *e.covering);
    CHECK(composed.degree() == ext.to_base.degree());
    for (int v = 0; v < ext.to_base.total().vertex_count(); ++v)
        CHECK(composed.vmap(v) == ext.to_base.vmap(v));
    for (int a = 0; a < ext.to_base.total().arrow_count(); ++a)
        CHECK(composed.amap(a) == ext.to_base.amap(a));

    // sheet labels read back the wrap assignment inside the window
    for (const auto& [ab, deg] : wa->degree) {
        int lift0 = -1;
        for (int a = 0; a < ext.to_base.total().arrow_count(); ++a)
            if (ext.to_base.amap(a) == ab &&
                ext.labeling.sheet[ext.to_base.total().arrow(a).src] == 0)
                lift0 = a;
        REQUIRE(lift0 >= 0);
        int shift = ext.labeling.sheet[ext.to_base.total().arrow(lift0).tgt];
        int D = ext.to_base.degree();
        CHECK(((deg % D) + D) % D == shift);
    }

    // the labels restrict to a nice grading for middle-sheet projectives
    TruncatedJacobianAlgebra alg(ext.to_base.total(), ext.total_potential, l);
    int middle = l * d;
    for (int k = 0; k < ext.to_base.total().vertex_count(); ++k) {
        if (ext.labeling.sheet[k] != middle) continue;
        ProjectiveModulePresentation p = projective_presentation(alg, k);
        std::map<int, int> deg;
        for (int v : supports(p.mod).vertices) deg[v] = ext.labeling.sheet[v];
        CHECK(check_nice_grading(ext.to_base, p, deg).ok());
    }
}

TEST_CASE("both legs of the extended tower preserve the stability operator") {
    const CoverEntry& e = reg().cover("liegrass-cover2");
    Potential wbar = reg().potential("liegrass-base-w");
    Potential w = sigma_potential(*e.covering, wbar);
    auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
    REQUIRE(wa.has_value());
    int l = 2;
    ExtendedCover ext = build_extended_cyclic_cover(*e.covering, *e.labeling, *wa, wbar, l);
    CHECK(compare_theta_covering(ext.to_base, wbar, l, {}).equal);
    CHECK(compare_theta_covering(ext.to_mid, w, l, {}).equal);
}

TEST_CASE("degree-one coverings are rejected by the extension") {
    QuiverPtr q = reg().quiver_ptr("liegrass-base");
    std::vector<int> vm(q->vertex_count()), am(q->arrow_count());
    for (int v = 0; v < q->vertex_count(); ++v) vm[v] = v;
    for (int a = 0; a < q->arrow_count(); ++a) am[a] = a;
    QuiverCovering id(q, q, vm, am, {deck_identity(*q)}, 1);
    SheetLabeling lab = sheet_labeling_from_map(id, std::vector<int>(q->vertex_count(), 0));
    WrapAssignment wa;
    wa.d = 1;
    CHECK_THROWS_AS(
        build_extended_cyclic_cover(id, lab, wa, reg().potential("liegrass-base-w"), 2),
        StructuralError);
}
