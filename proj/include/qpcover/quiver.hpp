#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpcover/rational.hpp"

namespace qpcover {

struct Vertex {
    std::string name;
    bool frozen = false;
};

struct Arrow {
    std::string name;
    int src = -1;
    int tgt = -1;
};

class Quiver;
using QuiverPtr = std::shared_ptr<const Quiver>;

/// A finite directed multigraph with named vertices and arrows.
/// Instances are immutable once built; paths keep a pointer to their quiver.
class Quiver {
public:
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int arrow_count() const { return static_cast<int>(arrows_.size()); }
    const Vertex& vertex(int i) const { return vertices_[i]; }
    const Arrow& arrow(int a) const { return arrows_[a]; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Arrow>& arrows() const { return arrows_; }

    std::optional<int> vertex_index(const std::string& name) const;
    std::optional<int> arrow_index(const std::string& name) const;

    /// Arrow indices with the given source (ascending).
    const std::vector<int>& arrows_from(int v) const { return out_[v]; }
    /// Arrow indices with the given target (ascending).
    const std::vector<int>& arrows_into(int v) const { return in_[v]; }

    std::vector<int> loops_and_two_cycles() const;

private:
    friend class QuiverBuilder;
    std::vector<Vertex> vertices_;
    std::vector<Arrow> arrows_;
    std::map<std::string, int> vertex_by_name_;
    std::map<std::string, int> arrow_by_name_;
    std::vector<std::vector<int>> out_, in_;
};

class QuiverBuilder {
public:
    int add_vertex(const std::string& name, bool frozen = false);
    int add_arrow(const std::string& name, const std::string& src, const std::string& tgt);
    int add_arrow(const std::string& name, int src, int tgt);
    /// Finalizes the quiver on stable heap storage.
    QuiverPtr build();

private:
    Quiver q_;
};

/// A path in a quiver: either the lazy path at a vertex, or a nonempty
/// arrow sequence stored in traversal order (arrow k is walked before
/// arrow k+1, so tgt(a_k) = src(a_{k+1})).  In the product convention
/// used throughout, the right factor of a product is traversed first.
class Path {
public:
    static Path lazy(const Quiver& q, int v);
    static Path of_arrows(const Quiver& q, std::vector<int> arrows);

    const Quiver* quiver() const { return q_; }
    bool is_lazy() const { return arrows_.empty(); }
    int length() const { return static_cast<int>(arrows_.size()); }
    int source() const;
    int target() const;
    bool is_cycle() const { return source() == target(); }
    const std::vector<int>& arrows() const { return arrows_; }

    /// (length, arrow sequence) lexicographic; lazy paths tie-break by vertex.
    int compare(const Path& other) const;
    bool operator==(const Path& o) const { return compare(o) == 0; }
    bool operator<(const Path& o) const { return compare(o) < 0; }

    /// Cyclic rotation starting after position i (valid for cycles).
    Path rotated(int i) const;
    /// Lexicographically minimal rotation of a cycle.
    Path cyclic_normal_form() const;

    std::string str() const;

private:
    Path(const Quiver* q, int lazy_vertex, std::vector<int> arrows);
    const Quiver* q_ = nullptr;
    int lazy_vertex_ = -1;
    std::vector<int> arrows_;
};

struct PathLess {
    bool operator()(const Path& a, const Path& b) const { return a.compare(b) < 0; }
};

/// Concatenation p*q with q traversed first; empty when tgt(q) != src(p).
std::optional<Path> compose(const Path& p, const Path& q);

constexpr int kUnbounded = -1;

/// A finite linear combination of paths with an order bound: terms longer
/// than the bound are dropped by every operation.
class AlgebraElement {
public:
    explicit AlgebraElement(const Quiver& q, int order_bound = kUnbounded);

    const Quiver* quiver() const { return q_; }
    int order_bound() const { return bound_; }
    bool is_zero() const { return terms_.empty(); }
    int term_count() const { return static_cast<int>(terms_.size()); }
    const std::map<Path, Rat, PathLess>& terms() const { return terms_; }

    void add(const Path& p, const Rat& c);
    Rat coefficient(const Path& p) const;

    AlgebraElement& operator+=(const AlgebraElement& other);
    AlgebraElement operator+(const AlgebraElement& other) const;
    AlgebraElement operator-(const AlgebraElement& other) const;
    AlgebraElement scaled(const Rat& c) const;
    /// Product with the same traversal convention as compose().
    AlgebraElement operator*(const AlgebraElement& other) const;
    AlgebraElement truncated(int order_bound) const;

    bool operator==(const AlgebraElement& other) const;
    std::string str() const;

private:
    const Quiver* q_;
    int bound_;
    std::map<Path, Rat, PathLess> terms_;
};

/// A potential: rational combination of closed paths of the quiver.
/// Terms with equal arrow sequences are merged at construction.
class Potential {
public:
    explicit Potential(const Quiver& q);
    Potential(const Quiver& q, const std::vector<std::pair<Rat, Path>>& terms);

    const Quiver* quiver() const { return q_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<std::pair<Rat, Path>>& terms() const { return terms_; }

    void add_term(const Rat& c, const Path& cycle);
    Potential operator+(const Potential& other) const;
    AlgebraElement as_element(int order_bound = kUnbounded) const;

    /// Every cycle replaced by its lexicographically minimal rotation.
    Potential cyclically_normalized() const;
    /// Equality of normalized term lists.
    bool cyclically_equal(const Potential& other) const;
    bool operator==(const Potential& other) const;

    int shortest_cycle() const;
    std::string str() const;

private:
    const Quiver* q_;
    std::vector<std::pair<Rat, Path>> terms_;
};

/// Sum over occurrences of the arrow in each cycle of the rotated remainder.
AlgebraElement cyclic_derivative(int arrow, const Potential& w);

/// Arrow-reversed quiver; arrow/vertex names are preserved.
QuiverPtr opposite(const Quiver& q);
/// Quiver and potential with all arrows and cycles reversed.
std::pair<QuiverPtr, Potential> opposite(const Quiver& q, const Potential& w);

struct PathFilter {
    std::optional<int> from;
    std::optional<int> to;
};

/// All paths with length <= max_len matching the filter, ordered by
/// (length, arrow sequence); lazy paths come first.
std::vector<Path> enumerate_paths(const Quiver& q, const PathFilter& filter, int max_len);

} // namespace qpcover
