#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qpcover/covering.hpp"
#include "qpcover/quiver.hpp"

namespace qpcover {

/// Combinatorial ideal triangulation of a closed punctured surface.
/// Triangles list their arcs cyclically in arrow order: the triple
/// (p, q, r) contributes the adjacency arrows p->q, q->r, r->p.  The
/// counterclockwise rotations around punctures are recovered from the
/// gluing (each arc sits in exactly two triangle slots).
struct TriangulationData {
    std::vector<std::string> arcs;
    struct Triangle {
        std::array<int, 3> arc;
        std::array<std::string, 3> arrow_name; // optional; auto-named when empty
    };
    std::vector<Triangle> triangles;
};

/// Adjacency quiver with the triangle map f (3-cycles within triangles)
/// and the rotation map g (counterclockwise around punctures).
struct AdjacencyQuiver {
    QuiverPtr quiver;
    std::vector<int> f;                      // per arrow
    std::vector<int> g;                      // per arrow
    std::vector<int> n_alpha;                // g-orbit length per arrow
    std::vector<std::vector<int>> rotations; // g-orbits in cyclic order (one per puncture)
    std::vector<int> rotation_of;            // arrow -> rotation index
    std::vector<std::array<int, 3>> triangle_arrows;
};

AdjacencyQuiver adjacency_quiver(const TriangulationData& t);

/// W = sum of triangle 3-cycles minus constant-weighted puncture cycles,
/// one term per f-orbit and per g-orbit, representatives at the smallest
/// arrow id.
Potential surface_potential(const AdjacencyQuiver& adj, const std::map<int, Rat>& constants);

/// Combinatorial basis count of the (completed) Jacobian algebra of a
/// surface quiver with potential: lazy paths, proper rotation chains, and
/// one socle element per vertex.
struct JacobianBasisOracle {
    long long dimension = 0;
    std::vector<Path> chain_basis;                        // g^r(.)...(.) chains, r <= n-2
    std::vector<std::vector<AlgebraElement>> socle_exprs; // per vertex: the four equal cycles
    std::vector<AlgebraElement> zero_exprs;               // mixed f/g compositions that vanish
    std::vector<Path> superfluous_cycles;                 // one-step overshoots that vanish
};

JacobianBasisOracle jacobian_basis_oracle(const AdjacencyQuiver& adj,
                                          const std::map<int, Rat>& constants);

struct SurfaceCoverSpec {
    TriangulationData base;
    int sheets = 0;
    int cut_arc = -1;
    /// Reuse an existing adjacency quiver of the base (pointer identity of
    /// the base quiver is preserved in the covering).
    const AdjacencyQuiver* prebuilt_base = nullptr;
};

struct SurfaceCoverResult {
    TriangulationData total;
    AdjacencyQuiver total_adj;
    AdjacencyQuiver base_adj;
    QuiverCovering covering;
    SheetLabeling labeling;
};

/// Glues d copies of a once-punctured triangulated surface along the cut
/// arc, sheet s passing to sheet s+1 across the cut.  The deck generator
/// advances sheets; vertex and arrow names carry the sheet as "^(s)".
SurfaceCoverResult cyclic_surface_cover(const SurfaceCoverSpec& spec);

} // namespace qpcover
