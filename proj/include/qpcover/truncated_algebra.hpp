#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "qpcover/exact_linalg.hpp"
#include "qpcover/quiver.hpp"
#include "qpcover/seed.hpp"

namespace qpcover {

/// A quiver representation given by explicit vector spaces and exact
/// action matrices (action[a] maps the fiber at src(a) to the one at tgt(a)).
struct ModulePresentation {
    const Quiver* quiver = nullptr;
    DimVec dims;
    std::vector<Mat> action;
    std::vector<std::vector<std::string>> labels;

    long long total_dim() const { return total(dims); }
    void validate_shapes() const;
    /// Matrix by which a path acts (first arrow of the traversal applied first).
    Mat path_action(const Path& p) const;
    /// Matrix of a linear combination of same-endpoint paths.
    Mat element_action(const AlgebraElement& x, int src, int tgt) const;
};

struct SupportData {
    std::set<int> vertices;
    std::set<int> arrows;
};

SupportData supports(const ModulePresentation& mod);

/// The order-l truncation of the Jacobian algebra of (Q, W): the path
/// algebra modulo paths longer than l and the two-sided ideal generated by
/// the cyclic derivatives of W.  Provides linear normal forms per
/// (source, target) block via exact Gaussian elimination, with the residue
/// basis chosen greedily in path enumeration order.
class TruncatedJacobianAlgebra {
public:
    struct Options {
        /// Test hook: permutes the elimination order of each block.  The
        /// complement dimensions must not depend on it.
        std::optional<unsigned long> shuffle_seed;
    };

    TruncatedJacobianAlgebra(const Quiver& q, const Potential& w, int order,
                             const Options& opts = {});

    const Quiver& quiver() const { return *q_; }
    const Potential& potential() const { return *w_; }
    int order() const { return order_; }

    long long dimension() const;
    long long block_dimension(int src, int tgt) const;
    const std::vector<Path>& block_basis(int src, int tgt) const;

    /// All relations (cyclic derivatives), indexed by arrow.
    const std::vector<AlgebraElement>& relations() const { return relations_; }

    AlgebraElement normal_form(const AlgebraElement& x) const;
    AlgebraElement normal_form(const Path& p) const;
    bool is_zero(const AlgebraElement& x) const;

private:
    struct Block {
        std::vector<Path> paths;               // elimination order
        std::map<Path, int, PathLess> index;
        std::map<int, std::map<int, Rat>> rules; // pivot -> combo of smaller columns
        std::vector<int> basis;                  // non-pivot columns, ascending
        std::vector<Path> basis_paths;
        std::vector<std::map<int, Rat>> nf;      // per column: combo over basis columns
    };

    Block& block(int s, int t) { return blocks_[s * q_->vertex_count() + t]; }
    const Block& block(int s, int t) const { return blocks_[s * q_->vertex_count() + t]; }
    void insert_row(Block& b, std::map<int, Rat> row);

    const Quiver* q_;
    const Potential* w_;
    Potential w_copy_;
    int order_;
    std::vector<AlgebraElement> relations_;
    std::vector<Block> blocks_;
};

/// The projective left module A^l e_k presented by the residue classes of
/// paths starting at k, in enumeration order.
struct ProjectiveModulePresentation {
    const TruncatedJacobianAlgebra* algebra = nullptr;
    int source_vertex = -1;
    int order = 0;
    std::vector<Path> basis;        // global (length, lex) order
    std::vector<int> basis_vertex;  // endpoint per basis element
    ModulePresentation mod;

    const DimVec& dimension_vector() const { return mod.dims; }
};

ProjectiveModulePresentation projective_presentation(const TruncatedJacobianAlgebra& alg,
                                                     int vertex);

/// Smallest l <= l_max with dim A^l = dim A^{l+1}, if any.
std::optional<int> stabilization_order(const Quiver& q, const Potential& w, int l_max);

} // namespace qpcover
