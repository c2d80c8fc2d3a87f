#pragma once

#include <string>
#include <vector>

#include "qpcover/quiver.hpp"
#include "qpcover/rational.hpp"

namespace qpcover {

/// Nonnegative integer vector indexed like a quiver's vertices (or a
/// seed's unfrozen part); entries at frozen indices stay zero.
using DimVec = std::vector<long long>;

long long total(const DimVec& n);
std::string dimvec_str(const DimVec& n);

/// Vector in the dual lattice, coordinates in the f-basis.
using MVec = RatVec;

/// A seed: index set with a frozen/unfrozen split, positive weights d_i,
/// and an exchange matrix B with B_ij d_j = -B_ji d_i.  The underlying
/// skew form is {e_i, e_j} = B_ji / d_j.
struct Seed {
    std::vector<std::string> names;
    std::vector<bool> frozen;
    RatVec d;
    RatMat B;

    int size() const { return static_cast<int>(names.size()); }
    std::vector<int> unfrozen() const;
    Rat skew(int i, int j) const { return B[j][i] / d[j]; }
    /// Natural pairing of n in the e-basis with m in the f-basis.
    Rat pairing(const DimVec& n, const MVec& m) const;
    void validate() const;
};

/// p*(n) = {n, .} in f-coordinates: p*(e_k) = sum_i B_ik f_i.
MVec p_star(const Seed& sd, const DimVec& n);

/// Matrix of p_star restricted to the unfrozen part (columns = unfrozen).
RatMat p_star_matrix(const Seed& sd);
bool p_star_injective(const Seed& sd);

/// Skew-symmetric seed of a loop-free, 2-cycle-free quiver: all d_i = 1
/// and B_ij = #(i->j) - #(j->i).
Seed seed_from_quiver(const Quiver& q);

/// Appends one frozen partner i' per index with d_{i'} = 1, {e_i, e_j'} =
/// delta_ij and {e_i', e_j'} = 0; the extended B entries are derived from
/// the skew form (B_{i'i} = +1, B_{ii'} = -d_i), making p* injective.
Seed principal_seed(const Seed& sd);

/// A covering of seeds: orbits on the index set with d constant on orbits
/// and orbit-summed B columns independent of the column representative.
struct SeedCovering {
    Seed total;
    Seed base;
    std::vector<int> orbit_of;            // total index -> base index
    std::vector<std::vector<int>> orbits; // base index -> members (ascending)

    /// kappa(f_obar) = 1/|orbit| sum of f_i over the orbit, as a total MVec.
    MVec kappa(const MVec& base_m) const;
    /// f_i -> f_ibar on the dual side.
    MVec project_m(const MVec& total_m) const;
    /// e_k -> e_kbar (fiber sums of dimension vectors).
    DimVec project_n(const DimVec& total_n) const;
};

SeedCovering seed_covering(const Seed& sd, const std::vector<std::vector<int>>& orbits,
                           const std::vector<std::string>& base_names = {});

} // namespace qpcover
