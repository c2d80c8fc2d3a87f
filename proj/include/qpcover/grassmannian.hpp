#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpcover/covering.hpp"
#include "qpcover/truncated_algebra.hpp"

namespace qpcover {

/// Integer weight tuples on a module basis whose differences along every
/// nonzero action entry depend only on the arrow.
struct WeightedBasis {
    const ModulePresentation* mod = nullptr;
    std::vector<std::vector<std::vector<long long>>> weight; // [vertex][element][coord]
    bool multiplicity_free = false;
};

/// Universal arrow-homogeneous weighting from the difference constraints
/// w(b') - w(b) = omega(arrow) solved by spanning-forest propagation; the
/// functional space is cut out by the cycle constraints.  Extra per-element
/// integer coordinates (e.g. induced by a grading on a covering) are
/// appended and re-checked for homogeneity.
WeightedBasis auto_weighting(const ModulePresentation& mod,
                             const std::vector<std::vector<std::vector<long long>>>& extra = {});

enum class EulerMethod { Localization, FiniteField };

struct EulerResult {
    bool conclusive = false;
    long long value = 0;
    EulerMethod method = EulerMethod::Localization;
    bool polynomial_count_caveat = false;
    std::string note;
    /// finite-field certificate: (q, count) pairs and the fitted polynomial
    std::vector<std::pair<long long, long long>> counts;
    RatVec fitted_polynomial;
};

struct EulerOptions {
    std::optional<EulerMethod> force_method;
    std::vector<long long> primes = {2, 3, 5, 7, 11, 13, 17, 19};
    int held_out = 2;
};

/// Euler characteristic of the quiver Grassmannian of submodules with
/// dimension vector n: torus fixed-point count when a multiplicity-free
/// weighting exists, finite-field point counts otherwise.
EulerResult euler_gr(const ModulePresentation& mod, const DimVec& n, const EulerOptions& opts = {});

/// All torus-fixed submodules with dimension vector n as per-vertex basis
/// masks (requires a multiplicity-free weighting).
std::vector<std::vector<unsigned long long>> localization_fixed_points(const WeightedBasis& wb,
                                                                       const DimVec& n);

/// Counts submodules over F_q for each listed prime, interpolates, checks
/// the held-out primes, and evaluates at q = 1.
EulerResult finite_field_count_oracle(const ModulePresentation& mod, const DimVec& n,
                                      const std::vector<long long>& primes, int held_out = 2);

/// chi of the variety of n-dimensional nilpotent quotients of P_k, via the
/// complementary Grassmannian of P_k at order max(|n| - 1, 1).
EulerResult euler_quot_nilp(const Quiver& q, const Potential& w, int k, const DimVec& n,
                            const EulerOptions& opts = {});
EulerResult euler_quot_of_presentation(const ProjectiveModulePresentation& p, const DimVec& n,
                                       const EulerOptions& opts = {});

struct ProjectionEulerRow {
    DimVec nbar;
    long long base_value = 0;
    long long cover_sum = 0;
    std::vector<std::pair<DimVec, long long>> fiber_values;
    bool equal = false;
};

struct ProjectionEulerReport {
    std::vector<ProjectionEulerRow> rows;
    bool all_equal = true;
};

enum class ProjectionMode { GrAtOrder, QuotNilp };

/// Compares the base Euler characteristic with the fiber sum over all
/// cover dimension vectors projecting to nbar.
ProjectionEulerRow verify_projection_euler(const QuiverCovering& c, const Potential& wbar, int k,
                                           const DimVec& nbar, ProjectionMode mode,
                                           int order_for_gr = 0, const EulerOptions& opts = {});

/// Runs the comparison for every nbar with |nbar| <= max_total.
ProjectionEulerReport verify_projection_euler_upto(const QuiverCovering& c, const Potential& wbar,
                                                   int k, int max_total, ProjectionMode mode,
                                                   const EulerOptions& opts = {});

/// Streaming enumeration of the fiber of nbar under the projection.
void for_each_fiber_dimvec(const QuiverCovering& c, const DimVec& nbar,
                           const std::function<void(const DimVec&)>& fn);

} // namespace qpcover
