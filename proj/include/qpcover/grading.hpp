#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qpcover/covering.hpp"
#include "qpcover/truncated_algebra.hpp"

namespace qpcover {

/// Integer grading on the support of a projective module: injective on
/// every vertex fiber met by the support, with fiber-constant induced
/// arrow degrees.
struct NiceGrading {
    std::map<int, int> vertex_degree; // over supp vertices
    std::map<int, int> arrow_degree;  // over supp arrows
    int bound = 0;
};

struct GradingCheck {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

GradingCheck check_nice_grading(const QuiverCovering& c, const SupportData& supp,
                                const std::map<int, int>& vertex_degree);
GradingCheck check_nice_grading(const QuiverCovering& c, const ProjectiveModulePresentation& p,
                                const std::map<int, int>& vertex_degree);

/// Bounded backtracking search over per-arrow-orbit degrees.  With a sheet
/// labeling the degree of an orbit is constrained to its shift mod d; the
/// window is [-bound*d, bound*d] either way.  Values are tried by
/// magnitude, positive first; vertex degrees propagate along a spanning
/// forest with roots at 0.
std::optional<NiceGrading> find_nice_grading(const QuiverCovering& c,
                                             const ProjectiveModulePresentation& p, int bound,
                                             const SheetLabeling* labeling);

/// Per-base-arrow winding choices delta or delta - d giving every
/// potential term winding number zero.
struct WrapAssignment {
    int d = 0;
    std::map<int, int> degree; // base arrow -> chosen value
};

struct NonWrapOptions {
    int max_plain_vars = 24;
    bool allow_large = false; // branch-and-bound continues past the guard
};

std::optional<WrapAssignment> check_non_wrapping(const QuiverCovering& c,
                                                 const SheetLabeling& labeling, const Potential& w,
                                                 const NonWrapOptions& opts = {});

struct ExtendedCover {
    QuiverCovering to_base; // 2ld : 1
    QuiverCovering to_mid;  // 2l : 1, factors through the original covering
    SheetLabeling labeling; // sheets 0 .. 2ld-1
    Potential total_potential;
};

/// The 2ld:1 cyclic cover determined by a non-wrapping assignment; every
/// potential term lifts to a closed cycle, and the sheet labels restrict
/// to a nice grading for projectives based on the middle sheet.
ExtendedCover build_extended_cyclic_cover(const QuiverCovering& c, const SheetLabeling& labeling,
                                          const WrapAssignment& wa, const Potential& wbar, int l);

} // namespace qpcover
