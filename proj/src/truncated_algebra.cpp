#include "qpcover/truncated_algebra.hpp"

#include <algorithm>
#include <random>

#include "qpcover/errors.hpp"

namespace qpcover {

void ModulePresentation::validate_shapes() const {
    if (!quiver) throw StructuralError("module: no quiver");
    if (static_cast<int>(dims.size()) != quiver->vertex_count())
        throw StructuralError("module: wrong dims length");
    if (static_cast<int>(action.size()) != quiver->arrow_count())
        throw StructuralError("module: wrong action count");
    for (int a = 0; a < quiver->arrow_count(); ++a) {
        const Arrow& ar = quiver->arrow(a);
        if (static_cast<long long>(action[a].size()) != dims[ar.tgt])
            throw StructuralError("module: bad row count for arrow " + ar.name);
        for (const auto& row : action[a])
            if (static_cast<long long>(row.size()) != dims[ar.src])
                throw StructuralError("module: bad column count for arrow " + ar.name);
    }
}

Mat ModulePresentation::path_action(const Path& p) const {
    if (p.is_lazy()) return mat_identity(static_cast<int>(dims[p.source()]));
    Mat m = mat_identity(static_cast<int>(dims[p.source()]));
    for (int a : p.arrows()) m = mat_mul(action[a], m);
    return m;
}

Mat ModulePresentation::element_action(const AlgebraElement& x, int src, int tgt) const {
    Mat m = mat_zero(static_cast<int>(dims[tgt]), static_cast<int>(dims[src]));
    for (const auto& [p, c] : x.terms()) {
        if (p.source() != src || p.target() != tgt)
            throw StructuralError("element_action: term endpoints do not match");
        Mat pm = path_action(p);
        for (size_t i = 0; i < pm.size(); ++i)
            for (size_t j = 0; j < pm[i].size(); ++j) m[i][j] += c * pm[i][j];
    }
    return m;
}

SupportData supports(const ModulePresentation& mod) {
    SupportData s;
    for (int v = 0; v < mod.quiver->vertex_count(); ++v)
        if (mod.dims[v] > 0) s.vertices.insert(v);
    for (int a = 0; a < mod.quiver->arrow_count(); ++a)
        if (!mat_is_zero(mod.action[a])) s.arrows.insert(a);
    return s;
}

TruncatedJacobianAlgebra::TruncatedJacobianAlgebra(const Quiver& q, const Potential& w, int order,
                                                   const Options& opts)
    : q_(&q), w_(nullptr), w_copy_(w), order_(order) {
    w_ = &w_copy_;
    if (w.quiver() != &q) throw StructuralError("truncated algebra: potential over wrong quiver");
    if (order < 1) throw StructuralError("truncated algebra: order must be >= 1");
    for (const auto& [c, cyc] : w.terms())
        if (cyc.length() < 3)
            throw StructuralError("truncated algebra: potential cycle '" + cyc.str() +
                                  "' has length < 3, so some derivative leaves m^2");

    int nv = q.vertex_count();
    relations_.reserve(q.arrow_count());
    for (int a = 0; a < q.arrow_count(); ++a) relations_.push_back(cyclic_derivative(a, w));

    blocks_.resize(nv * nv);
    for (int s = 0; s < nv; ++s) {
        auto from_s = enumerate_paths(q, {.from = s, .to = std::nullopt}, order_);
        for (const auto& p : from_s) block(s, p.target()).paths.push_back(p);
    }
    if (opts.shuffle_seed) {
        std::mt19937_64 rng(*opts.shuffle_seed);
        for (auto& b : blocks_) std::shuffle(b.paths.begin(), b.paths.end(), rng);
    }
    for (auto& b : blocks_)
        for (int i = 0; i < static_cast<int>(b.paths.size()); ++i) b.index.emplace(b.paths[i], i);

    // Spanning vectors of the order-l ideal: truncations of u * r * v over
    // path pairs, grouped into (source, target) blocks.
    for (int a = 0; a < q.arrow_count(); ++a) {
        const AlgebraElement& r = relations_[a];
        if (r.is_zero()) continue;
        int rs = q.arrow(a).tgt; // derivative runs from tgt(a) ...
        int rt = q.arrow(a).src; // ... to src(a)
        int minlen = order_ + 1;
        for (const auto& [p, c] : r.terms()) minlen = std::min(minlen, p.length());
        if (minlen > order_) continue;
        auto vs = enumerate_paths(q, {.from = std::nullopt, .to = rs}, order_ - minlen);
        for (const auto& v : vs) {
            auto us = enumerate_paths(q, {.from = rt, .to = std::nullopt},
                                      order_ - minlen - v.length());
            for (const auto& u : us) {
                Block& b = block(v.source(), u.target());
                std::map<int, Rat> row;
                for (const auto& [w_path, cw] : r.terms()) {
                    if (v.length() + w_path.length() + u.length() > order_) continue;
                    auto wv = compose(w_path, v);
                    auto uwv = compose(u, *wv);
                    int col = b.index.at(*uwv);
                    auto [it, fresh] = row.emplace(col, cw);
                    if (!fresh) {
                        it->second += cw;
                        if (it->second == 0) row.erase(it);
                    }
                }
                insert_row(b, std::move(row));
            }
        }
    }

    for (auto& b : blocks_) {
        int n = static_cast<int>(b.paths.size());
        b.nf.resize(n);
        for (int col = 0; col < n; ++col) {
            auto rit = b.rules.find(col);
            if (rit == b.rules.end()) {
                b.basis.push_back(col);
                b.nf[col] = {{col, Rat(1)}};
                continue;
            }
            std::map<int, Rat> acc;
            for (const auto& [j, cj] : rit->second)
                for (const auto& [bcol, cb] : b.nf[j]) {
                    auto [it, fresh] = acc.emplace(bcol, cj * cb);
                    if (!fresh) {
                        it->second += cj * cb;
                        if (it->second == 0) acc.erase(it);
                    }
                }
            b.nf[col] = std::move(acc);
        }
        for (int col : b.basis) b.basis_paths.push_back(b.paths[col]);
        std::sort(b.basis_paths.begin(), b.basis_paths.end(), PathLess{});
    }
}

void TruncatedJacobianAlgebra::insert_row(Block& b, std::map<int, Rat> row) {
    while (!row.empty()) {
        int lead = row.rbegin()->first;
        auto rit = b.rules.find(lead);
        if (rit == b.rules.end()) break;
        Rat c = row.rbegin()->second;
        row.erase(std::prev(row.end()));
        for (const auto& [j, cj] : rit->second) {
            auto [it, fresh] = row.emplace(j, c * cj);
            if (!fresh) {
                it->second += c * cj;
                if (it->second == 0) row.erase(it);
            }
        }
    }
    if (row.empty()) return;
    int pivot = row.rbegin()->first;
    Rat lead = row.rbegin()->second;
    row.erase(std::prev(row.end()));
    std::map<int, Rat> rhs;
    for (const auto& [j, cj] : row) rhs.emplace(j, -cj / lead);
    b.rules.emplace(pivot, std::move(rhs));
}

long long TruncatedJacobianAlgebra::dimension() const {
    long long d = 0;
    for (const auto& b : blocks_) d += static_cast<long long>(b.basis.size());
    return d;
}

long long TruncatedJacobianAlgebra::block_dimension(int src, int tgt) const {
    return static_cast<long long>(block(src, tgt).basis.size());
}

const std::vector<Path>& TruncatedJacobianAlgebra::block_basis(int src, int tgt) const {
    return block(src, tgt).basis_paths;
}

AlgebraElement TruncatedJacobianAlgebra::normal_form(const AlgebraElement& x) const {
    if (x.quiver() != q_) throw StructuralError("normal_form: element over wrong quiver");
    AlgebraElement out(*q_, order_);
    for (const auto& [p, c] : x.terms()) {
        if (p.length() > order_) continue;
        const Block& b = block(p.source(), p.target());
        const auto& combo = b.nf[b.index.at(p)];
        for (const auto& [col, cc] : combo) out.add(b.paths[col], c * cc);
    }
    return out;
}

AlgebraElement TruncatedJacobianAlgebra::normal_form(const Path& p) const {
    AlgebraElement x(*q_, order_);
    x.add(p, Rat(1));
    return normal_form(x);
}

bool TruncatedJacobianAlgebra::is_zero(const AlgebraElement& x) const {
    return normal_form(x).is_zero();
}

ProjectiveModulePresentation projective_presentation(const TruncatedJacobianAlgebra& alg,
                                                     int vertex) {
    const Quiver& q = alg.quiver();
    if (vertex < 0 || vertex >= q.vertex_count())
        throw StructuralError("projective_presentation: vertex out of range");
    ProjectiveModulePresentation p;
    p.algebra = &alg;
    p.source_vertex = vertex;
    p.order = alg.order();
    for (int t = 0; t < q.vertex_count(); ++t)
        for (const auto& path : alg.block_basis(vertex, t)) p.basis.push_back(path);
    std::sort(p.basis.begin(), p.basis.end(), PathLess{});

    p.mod.quiver = &q;
    p.mod.dims.assign(q.vertex_count(), 0);
    p.mod.labels.resize(q.vertex_count());
    std::vector<std::map<Path, int, PathLess>> row_of(q.vertex_count());
    for (const auto& path : p.basis) {
        int t = path.target();
        p.basis_vertex.push_back(t);
        row_of[t].emplace(path, static_cast<int>(p.mod.dims[t]));
        p.mod.labels[t].push_back(path.str());
        p.mod.dims[t] += 1;
    }
    p.mod.action.resize(q.arrow_count());
    for (int a = 0; a < q.arrow_count(); ++a) {
        const Arrow& ar = q.arrow(a);
        Mat m = mat_zero(static_cast<int>(p.mod.dims[ar.tgt]), static_cast<int>(p.mod.dims[ar.src]));
        for (const auto& [path, col] : row_of[ar.src]) {
            auto ap = compose(Path::of_arrows(q, {a}), path);
            AlgebraElement img = alg.normal_form(*ap);
            for (const auto& [bp, c] : img.terms()) m[row_of[ar.tgt].at(bp)][col] = c;
        }
        p.mod.action[a] = std::move(m);
    }
    p.mod.validate_shapes();
    return p;
}

std::optional<int> stabilization_order(const Quiver& q, const Potential& w, int l_max) {
    if (l_max < 2) throw StructuralError("stabilization_order: l_max must be >= 2");
    long long prev = TruncatedJacobianAlgebra(q, w, 1).dimension();
    for (int l = 1; l <= l_max; ++l) {
        long long next = TruncatedJacobianAlgebra(q, w, l + 1).dimension();
        if (next == prev) return l;
        prev = next;
    }
    return std::nullopt;
}

} // namespace qpcover
