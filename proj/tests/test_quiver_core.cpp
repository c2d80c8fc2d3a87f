#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpcover/document.hpp"
#include "qpcover/errors.hpp"
#include "qpcover/quiver.hpp"

using namespace qpcover;

namespace {

const Quiver& fx_quiver(const std::string& name) {
    return fixture_registry().quiver(name);
}

Path arrow_path(const Quiver& q, const std::string& name) {
    return Path::of_arrows(q, {*q.arrow_index(name)});
}

// independent oracle: every occurrence of the arrow found by scanning all
// rotations of each cycle
AlgebraElement derivative_by_rotations(int arrow, const Potential& w) {
    const Quiver& q = *w.quiver();
    AlgebraElement out(q);
    for (const auto& [c, cyc] : w.terms()) {
        int k = cyc.length();
        for (int i = 0; i < k; ++i) {
            Path rot = cyc.rotated(i); // starts with arrows[i]
            if (rot.arrows()[0] != arrow) continue;
            if (k == 1) {
                out.add(Path::lazy(q, q.arrow(arrow).src), c);
            } else {
                std::vector<int> rest(rot.arrows().begin() + 1, rot.arrows().end());
                out.add(Path::of_arrows(q, std::move(rest)), c);
            }
        }
    }
    return out;
}

long long dfs_count_paths(const Quiver& q, int from, int max_len) {
    if (max_len < 0) return 0;
    long long count = 1; // lazy path
    std::function<void(int, int)> rec = [&](int at, int left) {
        if (left == 0) return;
        for (int a : q.arrows_from(at)) {
            ++count;
            rec(q.arrow(a).tgt, left - 1);
        }
    };
    rec(from, max_len);
    return count;
}

} // namespace

TEST_CASE("compose: identities, mismatches and concatenation") {
    const Quiver& q = fx_quiver("kronecker");
    Path a1 = arrow_path(q, "a1");
    Path e2 = Path::lazy(q, *q.vertex_index("2"));

    auto with_identity = compose(a1, e2);
    REQUIRE(with_identity.has_value());
    CHECK(*with_identity == a1);
    CHECK(compose(e2, a1) == std::nullopt); // t(a1) = 1 != 2

    const Quiver& base = fx_quiver("kronecker-base");
    Path abar = arrow_path(base, "a");
    Path bbar = arrow_path(base, "b");
    // both end at the same vertex they do not start from
    CHECK(compose(bbar, abar) == std::nullopt);

    const Quiver& cover3 = fx_quiver("torus1p-cover3-total");
    Path alpha = arrow_path(cover3, "a1^(1)");
    Path beta = arrow_path(cover3, "b1^(1)");
    auto two = compose(beta, alpha);
    REQUIRE(two.has_value());
    CHECK(two->length() == 2);
    CHECK(two->source() == alpha.source());
    CHECK(two->target() == beta.target());

    CHECK_THROWS_AS(compose(a1, abar), StructuralError);
}

TEST_CASE("compose is associative with zero absorbing on short paths") {
    for (const char* name : {"kronecker", "torus1p"}) {
        const Quiver& q = fx_quiver(name);
        auto paths = enumerate_paths(q, {}, 4);
        std::vector<Path> sample;
        for (const auto& p : paths)
            if (p.length() <= 2) sample.push_back(p);
        for (const auto& p : sample)
            for (const auto& r : sample)
                for (const auto& s : sample) {
                    auto rs = compose(r, s);
                    auto pr = compose(p, r);
                    auto lhs = rs ? compose(p, *rs) : std::nullopt;
                    auto rhs = pr ? compose(*pr, s) : std::nullopt;
                    CHECK(lhs == rhs);
                }
    }
}

TEST_CASE("cyclic derivative on the four-term potential") {
    const Quiver& q = fx_quiver("liegrass-base");
    const Potential& w = fixture_registry().potential("liegrass-base-w");
    AlgebraElement dc = cyclic_derivative(*q.arrow_index("c"), w);
    AlgebraElement expected(q);
    expected.add(Path::of_arrows(q, {*q.arrow_index("a1"), *q.arrow_index("b1")}), Rat(1));
    expected.add(Path::of_arrows(q, {*q.arrow_index("a2"), *q.arrow_index("b2")}), Rat(1));
    CHECK(dc == expected);
}

TEST_CASE("cyclic derivative of the zero potential vanishes") {
    const Quiver& q = fx_quiver("kronecker");
    Potential zero(q);
    CHECK(cyclic_derivative(0, zero).is_zero());
}

TEST_CASE("cyclic derivative agrees with the rotation-scan oracle") {
    const Potential& w = fixture_registry().potential("torus1p-w");
    const Quiver& q = *w.quiver();
    for (int a = 0; a < q.arrow_count(); ++a) {
        AlgebraElement d = cyclic_derivative(a, w);
        CHECK(d == derivative_by_rotations(a, w));
        CHECK(d.term_count() == 2);
    }
}

TEST_CASE("cyclic derivative is linear and counts occurrences") {
    const Quiver& q = fx_quiver("torus1p");
    const Potential& w = fixture_registry().potential("torus1p-w");
    Potential w1(q), w2(q);
    w1.add_term(w.terms()[0].first, w.terms()[0].second);
    for (size_t i = 1; i < w.terms().size(); ++i) w2.add_term(w.terms()[i].first, w.terms()[i].second);
    for (int a = 0; a < q.arrow_count(); ++a)
        CHECK(cyclic_derivative(a, w) == cyclic_derivative(a, w1) + cyclic_derivative(a, w2));

    for (const auto& [c, cyc] : w.terms()) {
        Potential single(q);
        single.add_term(Rat(1), cyc);
        int total_terms = 0;
        for (int a = 0; a < q.arrow_count(); ++a)
            total_terms += cyclic_derivative(a, single).term_count();
        CHECK(total_terms == cyc.length());
    }
}

TEST_CASE("opposite reverses arrows and is an involution") {
    const Quiver& base = fx_quiver("kronecker-base");
    QuiverPtr op = opposite(base);
    for (int a = 0; a < base.arrow_count(); ++a) {
        CHECK(op->arrow(a).src == base.arrow(a).tgt);
        CHECK(op->arrow(a).tgt == base.arrow(a).src);
    }

    QuiverBuilder empty;
    empty.add_vertex("x", false);
    QuiverPtr no_arrows = empty.build();
    QuiverPtr op2 = opposite(*no_arrows);
    CHECK(op2->arrow_count() == 0);
    CHECK(op2->vertex(0).name == "x");

    const Potential& w = fixture_registry().potential("torus1p-w");
    auto [q1, w1] = opposite(*w.quiver(), w);
    auto [q2, w2] = opposite(*q1, w1);
    REQUIRE(w2.terms().size() == w.terms().size());
    for (size_t i = 0; i < w.terms().size(); ++i) {
        CHECK(w2.terms()[i].first == w.terms()[i].first);
        CHECK(w2.terms()[i].second.arrows() == w.terms()[i].second.arrows());
    }
}

TEST_CASE("enumerate_paths ordering and filters") {
    const Quiver& base = fx_quiver("kronecker-base");
    auto from2 = enumerate_paths(base, {.from = *base.vertex_index("2"), .to = std::nullopt}, 1);
    REQUIRE(from2.size() == 3);
    CHECK(from2[0].is_lazy());
    CHECK(from2[1].arrows() == std::vector<int>{*base.arrow_index("a")});
    CHECK(from2[2].arrows() == std::vector<int>{*base.arrow_index("b")});

    auto lazies = enumerate_paths(base, {}, 0);
    CHECK(lazies.size() == 2);
    for (const auto& p : lazies) CHECK(p.is_lazy());

    const Quiver& lg = fx_quiver("liegrass-base");
    for (const char* v : {"A", "B", "C", "D"}) {
        int idx = *lg.vertex_index(v);
        auto paths = enumerate_paths(lg, {.from = idx, .to = std::nullopt}, 3);
        CHECK(static_cast<long long>(paths.size()) == dfs_count_paths(lg, idx, 3));
        // deterministic order: length first, then arrow-lexicographic
        for (size_t i = 1; i < paths.size(); ++i) CHECK(paths[i - 1] < paths[i]);
    }
}

TEST_CASE("potential construction merges terms and normalizes cyclically") {
    const Quiver& q = fx_quiver("torus1p");
    const Potential& w = fixture_registry().potential("torus1p-w");
    Potential rotated(q);
    for (const auto& [c, cyc] : w.terms()) rotated.add_term(c, cyc.rotated(1));
    CHECK(rotated.cyclically_equal(w));
    CHECK_FALSE(rotated == w);

    Potential merged(q);
    Path cyc = w.terms()[0].second;
    merged.add_term(Rat(1), cyc);
    merged.add_term(Rat(-1), cyc);
    CHECK(merged.is_zero());
}
