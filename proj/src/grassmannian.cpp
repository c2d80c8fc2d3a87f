#include "qpcover/grassmannian.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "qpcover/errors.hpp"
#include "qpcover/exact_linalg.hpp"
#include "qpcover/parallel.hpp"

namespace qpcover {

namespace {

struct NodeId {
    int vertex;
    int elem;
};

} // namespace

WeightedBasis auto_weighting(const ModulePresentation& mod,
                             const std::vector<std::vector<std::vector<long long>>>& extra) {
    mod.validate_shapes();
    const Quiver& q = *mod.quiver;
    int na = q.arrow_count();

    // flatten basis elements
    std::vector<NodeId> nodes;
    std::vector<std::vector<int>> node_of(q.vertex_count());
    for (int v = 0; v < q.vertex_count(); ++v)
        for (long long j = 0; j < mod.dims[v]; ++j) {
            node_of[v].push_back(static_cast<int>(nodes.size()));
            nodes.push_back({v, static_cast<int>(j)});
        }
    int nn = static_cast<int>(nodes.size());

    struct Edge {
        int from, to, arrow;
    };
    std::vector<Edge> edges;
    for (int a = 0; a < na; ++a) {
        const Arrow& ar = q.arrow(a);
        for (long long col = 0; col < mod.dims[ar.src]; ++col)
            for (long long row = 0; row < mod.dims[ar.tgt]; ++row)
                if (mod.action[a][row][col] != 0)
                    edges.push_back({node_of[ar.src][col], node_of[ar.tgt][row], a});
    }

    // formal node weights in the arrow-symbol space, one component at a time
    std::vector<std::vector<std::pair<int, int>>> adj(nn); // node -> (edge idx, orientation)
    for (size_t e = 0; e < edges.size(); ++e) {
        adj[edges[e].from].emplace_back(static_cast<int>(e), +1);
        adj[edges[e].to].emplace_back(static_cast<int>(e), -1);
    }
    std::vector<RatVec> w(nn);
    std::vector<int> comp(nn, -1);
    std::vector<RatVec> constraints;
    int ncomp = 0;
    for (int start = 0; start < nn; ++start) {
        if (comp[start] != -1) continue;
        comp[start] = ncomp;
        w[start].assign(na, Rat(0));
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (auto [e, sign] : adj[x]) {
                int y = sign > 0 ? edges[e].to : edges[e].from;
                RatVec cand = w[x];
                cand[edges[e].arrow] += sign;
                if (comp[y] == -1) {
                    comp[y] = ncomp;
                    w[y] = std::move(cand);
                    stack.push_back(y);
                } else {
                    // non-tree edge: the symbol difference must vanish
                    RatVec diff(na, Rat(0));
                    bool nonzero = false;
                    for (int s = 0; s < na; ++s) {
                        diff[s] = cand[s] - w[y][s];
                        if (diff[s] != 0) nonzero = true;
                    }
                    if (nonzero) constraints.push_back(std::move(diff));
                }
            }
        }
        ++ncomp;
    }

    // functionals on the arrow symbols vanishing on all cycle constraints
    std::vector<RatVec> functionals;
    if (constraints.empty()) {
        for (int s = 0; s < na; ++s) {
            RatVec f(na, Rat(0));
            f[s] = 1;
            functionals.push_back(std::move(f));
        }
    } else {
        functionals = kernel_basis(constraints);
    }

    WeightedBasis wb;
    wb.mod = &mod;
    wb.weight.resize(q.vertex_count());
    for (int v = 0; v < q.vertex_count(); ++v)
        wb.weight[v].assign(mod.dims[v], std::vector<long long>(1 + functionals.size(), 0));
    // first coordinate tells components apart; the rest are the cleared
    // functional values of the formal weights
    for (int x = 0; x < nn; ++x) wb.weight[nodes[x].vertex][nodes[x].elem][0] = comp[x];
    for (size_t fi = 0; fi < functionals.size(); ++fi) {
        std::vector<Rat> vals(nn, Rat(0));
        mpz_class lcm(1);
        for (int x = 0; x < nn; ++x) {
            for (int s = 0; s < na; ++s) vals[x] += functionals[fi][s] * w[x][s];
            mpz_class den = vals[x].get_den();
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
        }
        for (int x = 0; x < nn; ++x)
            wb.weight[nodes[x].vertex][nodes[x].elem][1 + fi] = rat_ll(vals[x] * Rat(lcm));
    }
    // append user-supplied coordinates
    if (!extra.empty()) {
        for (int v = 0; v < q.vertex_count(); ++v)
            for (long long j = 0; j < mod.dims[v]; ++j) {
                const auto& add = extra[v][j];
                auto& t = wb.weight[v][j];
                t.insert(t.end(), add.begin(), add.end());
            }
    }
    // arrow homogeneity re-check
    std::map<int, std::vector<long long>> arrow_diff;
    for (const auto& e : edges) {
        const auto& wf = wb.weight[nodes[e.from].vertex][nodes[e.from].elem];
        const auto& wt = wb.weight[nodes[e.to].vertex][nodes[e.to].elem];
        std::vector<long long> diff(wt.size());
        for (size_t i = 0; i < wt.size(); ++i) diff[i] = wt[i] - wf[i];
        auto [it, fresh] = arrow_diff.emplace(e.arrow, diff);
        if (!fresh && it->second != diff)
            throw StructuralError("auto_weighting: weighting is not arrow-homogeneous at arrow " +
                                  q.arrow(e.arrow).name);
    }
    // multiplicity-free?
    wb.multiplicity_free = true;
    for (int v = 0; v < q.vertex_count(); ++v) {
        auto sorted = wb.weight[v];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            wb.multiplicity_free = false;
    }
    return wb;
}

std::vector<std::vector<unsigned long long>> localization_fixed_points(const WeightedBasis& wb,
                                                                       const DimVec& n) {
    const ModulePresentation& mod = *wb.mod;
    const Quiver& q = *mod.quiver;
    if (!wb.multiplicity_free)
        throw StructuralError("localization: weighting has a repeated weight within a vertex");
    if (static_cast<int>(n.size()) != q.vertex_count())
        throw StructuralError("localization: dimension vector has wrong length");
    for (int v = 0; v < q.vertex_count(); ++v) {
        if (n[v] < 0) throw StructuralError("localization: negative dimension entry");
        if (mod.dims[v] > 62) throw StructuralError("localization: fiber dimension too large");
    }
    for (int v = 0; v < q.vertex_count(); ++v)
        if (n[v] > mod.dims[v]) return {};

    // support masks: arrow a maps element j of src to a subset of tgt
    std::vector<std::vector<unsigned long long>> support(q.arrow_count());
    for (int a = 0; a < q.arrow_count(); ++a) {
        const Arrow& ar = q.arrow(a);
        support[a].assign(mod.dims[ar.src], 0);
        for (long long col = 0; col < mod.dims[ar.src]; ++col)
            for (long long row = 0; row < mod.dims[ar.tgt]; ++row)
                if (mod.action[a][row][col] != 0) support[a][col] |= 1ULL << row;
    }

    // per-vertex candidate masks with the demanded popcount
    std::vector<std::vector<unsigned long long>> cand(q.vertex_count());
    for (int v = 0; v < q.vertex_count(); ++v) {
        unsigned long long full = mod.dims[v] == 0 ? 0 : ((1ULL << mod.dims[v]) - 1);
        for (unsigned long long m = 0;; ++m) {
            if (m > full) break;
            if (std::popcount(m) == static_cast<int>(n[v])) cand[v].push_back(m);
            if (m == full) break;
        }
    }

    std::vector<std::vector<unsigned long long>> found;
    std::vector<unsigned long long> chosen(q.vertex_count(), 0);
    // arrows become checkable once both endpoints are chosen
    std::vector<std::vector<int>> check_at(q.vertex_count());
    for (int a = 0; a < q.arrow_count(); ++a)
        check_at[std::max(q.arrow(a).src, q.arrow(a).tgt)].push_back(a);

    std::function<void(int)> rec = [&](int v) {
        if (v == q.vertex_count()) {
            found.push_back(chosen);
            return;
        }
        for (unsigned long long m : cand[v]) {
            chosen[v] = m;
            bool ok = true;
            for (int a : check_at[v]) {
                const Arrow& ar = q.arrow(a);
                unsigned long long source = chosen[ar.src];
                unsigned long long target = chosen[ar.tgt];
                for (long long col = 0; col < mod.dims[ar.src] && ok; ++col)
                    if ((source >> col) & 1ULL)
                        if ((support[a][col] & ~target) != 0) ok = false;
                if (!ok) break;
            }
            if (ok) rec(v + 1);
        }
    };
    rec(0);
    return found;
}

namespace {

long long mod_inverse(long long a, long long q) {
    long long t = 0, new_t = 1, r = q, new_r = ((a % q) + q) % q;
    while (new_r != 0) {
        long long quot = r / new_r;
        std::swap(t -= quot * new_t, new_t);
        std::swap(r -= quot * new_r, new_r);
    }
    if (r != 1) throw StructuralError("finite field: non-invertible element");
    return ((t % q) + q) % q;
}

long long rat_mod(const Rat& x, long long q) {
    mpz_class qz(static_cast<long>(q));
    mpz_class num = x.get_num() % qz;
    mpz_class den = x.get_den() % qz;
    long long n = ((num.get_si() % q) + q) % q;
    long long d = ((den.get_si() % q) + q) % q;
    if (d == 0) throw StructuralError("finite field: denominator vanishes mod " + std::to_string(q));
    return (n * mod_inverse(d, q)) % q;
}

using FMat = std::vector<std::vector<long long>>;

// enumerate reduced-row-echelon bases of k-dimensional subspaces of F_q^d
void for_each_subspace(int d, int k, long long q,
                       const std::function<void(const FMat&, const std::vector<int>&)>& fn) {
    if (k == 0) {
        fn(FMat{}, {});
        return;
    }
    std::vector<int> pivots(k);
    std::function<void(int, int)> choose = [&](int pos, int start) {
        if (pos == k) {
            // free entries: (r, c) with c > pivots[r], c not a pivot
            std::vector<std::pair<int, int>> free_cells;
            std::vector<bool> is_pivot(d, false);
            for (int r = 0; r < k; ++r) is_pivot[pivots[r]] = true;
            for (int r = 0; r < k; ++r)
                for (int c = pivots[r] + 1; c < d; ++c)
                    if (!is_pivot[c]) free_cells.emplace_back(r, c);
            FMat m(k, std::vector<long long>(d, 0));
            for (int r = 0; r < k; ++r) m[r][pivots[r]] = 1;
            std::function<void(size_t)> fill = [&](size_t idx) {
                if (idx == free_cells.size()) {
                    fn(m, pivots);
                    return;
                }
                auto [r, c] = free_cells[idx];
                for (long long val = 0; val < q; ++val) {
                    m[r][c] = val;
                    fill(idx + 1);
                }
                m[r][c] = 0;
            };
            fill(0);
            return;
        }
        for (int c = start; c < d; ++c) {
            pivots[pos] = c;
            choose(pos + 1, c + 1);
        }
    };
    choose(0, 0);
}

// reduce v by the rows of an RREF basis; true when v lies in the row space
bool reduces_to_zero(std::vector<long long> v, const FMat& basis, const std::vector<int>& pivots,
                     long long q) {
    for (size_t r = 0; r < basis.size(); ++r) {
        long long c = v[pivots[r]] % q;
        if (c == 0) continue;
        for (size_t j = 0; j < v.size(); ++j) v[j] = ((v[j] - c * basis[r][j]) % q + q) % q;
    }
    for (long long x : v)
        if (x % q != 0) return false;
    return true;
}

RatVec newton_interpolate(const std::vector<std::pair<long long, long long>>& pts) {
    // divided differences, converted to monomial coefficients
    int n = static_cast<int>(pts.size());
    std::vector<Rat> coef(n);
    std::vector<Rat> ys(n);
    for (int i = 0; i < n; ++i) ys[i] = Rat(static_cast<long>(pts[i].second));
    for (int i = 0; i < n; ++i) coef[i] = ys[i];
    for (int level = 1; level < n; ++level)
        for (int i = n - 1; i >= level; --i)
            coef[i] = (coef[i] - coef[i - 1]) /
                      Rat(static_cast<long>(pts[i].first - pts[i - level].first));
    RatVec poly{Rat(0)};
    RatVec basis{Rat(1)}; // prod (x - x_j)
    for (int i = 0; i < n; ++i) {
        if (poly.size() < basis.size()) poly.resize(basis.size(), Rat(0));
        for (size_t j = 0; j < basis.size(); ++j) poly[j] += coef[i] * basis[j];
        // basis *= (x - x_i)
        RatVec nb(basis.size() + 1, Rat(0));
        for (size_t j = 0; j < basis.size(); ++j) {
            nb[j + 1] += basis[j];
            nb[j] -= basis[j] * Rat(static_cast<long>(pts[i].first));
        }
        basis = std::move(nb);
    }
    while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
    return poly;
}

Rat poly_eval(const RatVec& poly, const Rat& x) {
    Rat v(0);
    for (size_t i = poly.size(); i-- > 0;) v = v * x + poly[i];
    return v;
}

} // namespace

EulerResult finite_field_count_oracle(const ModulePresentation& mod, const DimVec& n,
                                      const std::vector<long long>& primes, int held_out) {
    mod.validate_shapes();
    const Quiver& q = *mod.quiver;
    if (static_cast<int>(n.size()) != q.vertex_count())
        throw StructuralError("finite field oracle: dimension vector has wrong length");
    EulerResult res;
    res.method = EulerMethod::FiniteField;
    res.polynomial_count_caveat = true;

    for (int v = 0; v < q.vertex_count(); ++v)
        if (n[v] < 0 || n[v] > mod.dims[v]) {
            res.conclusive = true;
            res.value = 0;
            res.note = "empty: dimension vector exceeds the module";
            return res;
        }

    long long degree_bound = 0;
    for (int v = 0; v < q.vertex_count(); ++v) degree_bound += n[v] * (mod.dims[v] - n[v]);
    if (static_cast<long long>(primes.size()) < degree_bound + held_out + 1)
        throw InputError("finite field oracle: need at least " +
                         std::to_string(degree_bound + held_out + 1) + " primes, got " +
                         std::to_string(primes.size()));

    std::vector<long long> sorted = primes;
    std::sort(sorted.begin(), sorted.end());

    auto count_for = [&](long long p) -> long long {
        // all denominators must be invertible mod p (checked by rat_mod)
        std::vector<FMat> act(q.arrow_count());
        for (int a = 0; a < q.arrow_count(); ++a) {
            const Arrow& ar = q.arrow(a);
            act[a].assign(mod.dims[ar.tgt], std::vector<long long>(mod.dims[ar.src], 0));
            for (long long r = 0; r < mod.dims[ar.tgt]; ++r)
                for (long long c2 = 0; c2 < mod.dims[ar.src]; ++c2)
                    act[a][r][c2] = rat_mod(mod.action[a][r][c2], p);
        }
        // enumerate per-vertex subspaces and check closure
        std::vector<FMat> chosen(q.vertex_count());
        std::vector<std::vector<int>> chosen_pivots(q.vertex_count());
        long long count = 0;
        std::vector<std::vector<int>> check_at(q.vertex_count());
        for (int a = 0; a < q.arrow_count(); ++a)
            check_at[std::max(q.arrow(a).src, q.arrow(a).tgt)].push_back(a);
        std::function<void(int)> rec = [&](int v) {
            if (v == q.vertex_count()) {
                ++count;
                return;
            }
            for_each_subspace(static_cast<int>(mod.dims[v]), static_cast<int>(n[v]), p,
                              [&](const FMat& basis, const std::vector<int>& pivots) {
                                  chosen[v] = basis;
                                  chosen_pivots[v] = pivots;
                                  bool ok = true;
                                  for (int a : check_at[v]) {
                                      const Arrow& ar = q.arrow(a);
                                      for (const auto& row : chosen[ar.src]) {
                                          std::vector<long long> img(mod.dims[ar.tgt], 0);
                                          for (long long r = 0; r < mod.dims[ar.tgt]; ++r) {
                                              long long s = 0;
                                              for (size_t c2 = 0; c2 < row.size(); ++c2)
                                                  s += act[a][r][c2] * row[c2];
                                              img[r] = ((s % p) + p) % p;
                                          }
                                          if (!reduces_to_zero(img, chosen[ar.tgt],
                                                               chosen_pivots[ar.tgt], p)) {
                                              ok = false;
                                              break;
                                          }
                                      }
                                      if (!ok) break;
                                  }
                                  if (ok) rec(v + 1);
                              });
        };
        rec(0);
        return count;
    };
    std::vector<long long> counts = parallel_map<long long>(
        static_cast<int>(sorted.size()), [&](int i) { return count_for(sorted[i]); });
    for (size_t i = 0; i < sorted.size(); ++i) res.counts.emplace_back(sorted[i], counts[i]);

    int fit_count = static_cast<int>(sorted.size()) - held_out;
    std::vector<std::pair<long long, long long>> fit(res.counts.begin(),
                                                     res.counts.begin() + fit_count);
    res.fitted_polynomial = newton_interpolate(fit);
    for (int i = fit_count; i < static_cast<int>(res.counts.size()); ++i) {
        Rat predicted = poly_eval(res.fitted_polynomial, Rat(static_cast<long>(res.counts[i].first)));
        if (predicted != Rat(static_cast<long>(res.counts[i].second))) {
            res.conclusive = false;
            res.note = "held-out validation failed at q = " + std::to_string(res.counts[i].first);
            return res;
        }
    }
    Rat at_one = poly_eval(res.fitted_polynomial, Rat(1));
    res.value = rat_ll(at_one);
    res.conclusive = true;
    return res;
}

EulerResult euler_gr(const ModulePresentation& mod, const DimVec& n, const EulerOptions& opts) {
    if (static_cast<int>(n.size()) != mod.quiver->vertex_count())
        throw StructuralError("euler_gr: dimension vector has wrong length");
    for (int v = 0; v < mod.quiver->vertex_count(); ++v)
        if (n[v] < 0 || n[v] > mod.dims[v]) {
            EulerResult r;
            r.conclusive = true;
            r.value = 0;
            r.method = EulerMethod::Localization;
            r.note = "empty";
            return r;
        }
    bool want_loc = !opts.force_method || *opts.force_method == EulerMethod::Localization;
    if (want_loc) {
        WeightedBasis wb = auto_weighting(mod);
        if (wb.multiplicity_free) {
            EulerResult r;
            r.conclusive = true;
            r.method = EulerMethod::Localization;
            r.value = static_cast<long long>(localization_fixed_points(wb, n).size());
            return r;
        }
        if (opts.force_method) {
            EulerResult r;
            r.conclusive = false;
            r.note = "localization unavailable: weighting has multiplicities";
            return r;
        }
    }
    return finite_field_count_oracle(mod, n, opts.primes, opts.held_out);
}

EulerResult euler_quot_of_presentation(const ProjectiveModulePresentation& p, const DimVec& n,
                                       const EulerOptions& opts) {
    DimVec complement(n.size());
    for (size_t v = 0; v < n.size(); ++v) {
        complement[v] = p.mod.dims[v] - n[v];
        if (complement[v] < 0) {
            EulerResult r;
            r.conclusive = true;
            r.value = 0;
            r.method = EulerMethod::Localization;
            r.note = "empty quot";
            return r;
        }
    }
    return euler_gr(p.mod, complement, opts);
}

EulerResult euler_quot_nilp(const Quiver& q, const Potential& w, int k, const DimVec& n,
                            const EulerOptions& opts) {
    long long tot = total(n);
    int l = static_cast<int>(std::max<long long>(tot - 1, 1));
    TruncatedJacobianAlgebra alg(q, w, l);
    ProjectiveModulePresentation p = projective_presentation(alg, k);
    return euler_quot_of_presentation(p, n, opts);
}

void for_each_fiber_dimvec(const QuiverCovering& c, const DimVec& nbar,
                           const std::function<void(const DimVec&)>& fn) {
    const Quiver& B = c.base();
    if (static_cast<int>(nbar.size()) != B.vertex_count())
        throw StructuralError("fiber enumeration: base dimension vector has wrong length");
    auto fibers = c.vertex_fibers();
    DimVec n(c.total().vertex_count(), 0);
    // compositions of nbar[vb] over the fiber of vb, vertex by vertex
    std::function<void(int)> per_vertex = [&](int vb) {
        if (vb == B.vertex_count()) {
            fn(n);
            return;
        }
        const auto& fiber = fibers[vb];
        std::function<void(size_t, long long)> comp = [&](size_t idx, long long rest) {
            if (idx + 1 == fiber.size()) {
                n[fiber[idx]] = rest;
                per_vertex(vb + 1);
                n[fiber[idx]] = 0;
                return;
            }
            for (long long take = 0; take <= rest; ++take) {
                n[fiber[idx]] = take;
                comp(idx + 1, rest - take);
            }
            n[fiber[idx]] = 0;
        };
        comp(0, nbar[vb]);
    };
    per_vertex(0);
}

ProjectionEulerRow verify_projection_euler(const QuiverCovering& c, const Potential& wbar, int k,
                                           const DimVec& nbar, ProjectionMode mode,
                                           int order_for_gr, const EulerOptions& opts) {
    Potential w = sigma_potential(c, wbar);
    ProjectionEulerRow row;
    row.nbar = nbar;

    int l = mode == ProjectionMode::GrAtOrder
                ? order_for_gr
                : static_cast<int>(std::max<long long>(total(nbar) - 1, 1));
    TruncatedJacobianAlgebra base_alg(c.base(), wbar, l);
    TruncatedJacobianAlgebra total_alg(c.total(), w, l);
    ProjectiveModulePresentation pbase = projective_presentation(base_alg, c.vmap(k));
    ProjectiveModulePresentation ptotal = projective_presentation(total_alg, k);

    auto side = [&](const ProjectiveModulePresentation& p, const DimVec& nv) {
        EulerResult r = mode == ProjectionMode::GrAtOrder ? euler_gr(p.mod, nv, opts)
                                                          : euler_quot_of_presentation(p, nv, opts);
        if (!r.conclusive)
            throw InconclusiveError("projection euler: inconclusive value (" + r.note + ")");
        return r.value;
    };
    row.base_value = side(pbase, nbar);
    row.cover_sum = 0;
    for_each_fiber_dimvec(c, nbar, [&](const DimVec& n) {
        long long v = side(ptotal, n);
        if (v != 0) row.fiber_values.emplace_back(n, v);
        row.cover_sum += v;
    });
    row.equal = row.base_value == row.cover_sum;
    return row;
}

namespace {

void for_each_dimvec_upto(int len, int max_total, const std::function<void(const DimVec&)>& fn) {
    DimVec n(len, 0);
    std::function<void(int, int)> rec = [&](int idx, int rest) {
        if (idx == len) {
            fn(n);
            return;
        }
        for (int take = 0; take <= rest; ++take) {
            n[idx] = take;
            rec(idx + 1, rest - take);
        }
        n[idx] = 0;
    };
    rec(0, max_total);
}

} // namespace

ProjectionEulerReport verify_projection_euler_upto(const QuiverCovering& c, const Potential& wbar,
                                                   int k, int max_total, ProjectionMode mode,
                                                   const EulerOptions& opts) {
    ProjectionEulerReport rep;
    for_each_dimvec_upto(c.base().vertex_count(), max_total, [&](const DimVec& nbar) {
        ProjectionEulerRow row = verify_projection_euler(c, wbar, k, nbar, mode, 0, opts);
        rep.all_equal = rep.all_equal && row.equal;
        rep.rows.push_back(std::move(row));
    });
    return rep;
}

} // namespace qpcover
