#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpcover/quiver.hpp"
#include "qpcover/seed.hpp"
#include "qpcover/truncated_algebra.hpp"

namespace qpcover {

/// A quiver automorphism given by its vertex and arrow permutations.
struct DeckElement {
    std::vector<int> vperm;
    std::vector<int> aperm;
    bool operator==(const DeckElement&) const = default;
    bool operator<(const DeckElement& o) const { return vperm < o.vperm || (vperm == o.vperm && aperm < o.aperm); }
};

DeckElement deck_identity(const Quiver& q);
DeckElement deck_compose(const DeckElement& a, const DeckElement& b);

struct ValidationReport {
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
    std::string str() const;
};

/// A d:1 covering of quivers: a structure-respecting surjection whose
/// vertex and arrow fibers are the orbits of a free deck-group action.
class QuiverCovering {
public:
    QuiverCovering(QuiverPtr total, QuiverPtr base, std::vector<int> vmap, std::vector<int> amap,
                   std::vector<DeckElement> generators, int declared_order);

    const Quiver& total() const { return *total_; }
    const Quiver& base() const { return *base_; }
    QuiverPtr total_ptr() const { return total_; }
    QuiverPtr base_ptr() const { return base_; }
    int degree() const { return declared_order_; }
    int vmap(int v) const { return vmap_[v]; }
    int amap(int a) const { return amap_[a]; }
    const std::vector<DeckElement>& generators() const { return generators_; }

    /// Full deck group (closure of the generators, identity first).
    const std::vector<DeckElement>& deck_group() const;
    std::vector<std::vector<int>> vertex_fibers() const;
    std::vector<std::vector<int>> arrow_fibers() const;

    ValidationReport validate() const;

private:
    QuiverPtr total_, base_;
    std::vector<int> vmap_, amap_;
    std::vector<DeckElement> generators_;
    int declared_order_;
    mutable std::vector<DeckElement> group_;
};

/// The unique lift of a base path through the given fiber point.
Path lift_path(const QuiverCovering& c, const Path& base_path, int anchor,
               bool anchor_at_start = true);

/// Linear map sending each base path to the sum of its lifts.
AlgebraElement sigma(const QuiverCovering& c, const AlgebraElement& x);
AlgebraElement sigma_path(const QuiverCovering& c, const Path& p);
/// sigma applied to a potential; every lift must close up.
Potential sigma_potential(const QuiverCovering& c, const Potential& wbar);
/// pi applied termwise to a potential of the total quiver.
Potential project_potential(const QuiverCovering& c, const Potential& w);
Path project_path(const QuiverCovering& c, const Path& p);

Path deck_apply(const Quiver& q, const DeckElement& g, const Path& p);

/// Pullback of a module over the total quiver along sigma: fiber direct
/// sums of vector spaces and action matrices.  Checks that the base
/// relations are carried into the total relations first.
ModulePresentation pullback_module(const QuiverCovering& c, const ModulePresentation& mod,
                                   const Potential& wbar, int order);

struct InjectivityResult {
    bool injective = false;
    long long kernel_dim = 0;
    long long base_dim = 0;
    long long total_dim = 0;
};

/// Exact kernel computation of the induced map between truncated Jacobian
/// algebras of the base and the total quiver at the given order.
InjectivityResult check_sigma_injectivity(const QuiverCovering& c, const Potential& wbar, int order);

/// Composite covering; the composite deck group is recovered by the
/// fiber-extension search and must have order deg(c1) * deg(c2).
QuiverCovering compose_coverings(const QuiverCovering& c1, const QuiverCovering& c2);

/// All automorphisms of the total quiver over the projection maps.
std::vector<DeckElement> find_deck_transformations(const Quiver& total, const Quiver& base,
                                                   const std::vector<int>& vmap,
                                                   const std::vector<int>& amap);

/// Sheet decomposition for a cyclic deck group: vertex labels in 0..d-1
/// advanced by the generator, with per-base-arrow sheet shifts.
struct SheetLabeling {
    int d = 0;
    std::vector<int> sheet;       // per total vertex
    std::map<int, int> delta;     // base arrow -> shift in 0..d-1
};

/// Breadth-first labeling from the fiber of the first base vertex using
/// the first generator; requires a connected total quiver.
SheetLabeling compute_sheet_labeling(const QuiverCovering& c);
SheetLabeling sheet_labeling_from_map(const QuiverCovering& c, const std::vector<int>& sheet);

/// Seed covering induced by a loop-free 2-cycle-free quiver covering.
SeedCovering induced_seed_covering(const QuiverCovering& c);

} // namespace qpcover
