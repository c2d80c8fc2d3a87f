#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpcover/covering.hpp"
#include "qpcover/grassmannian.hpp"
#include "qpcover/seed.hpp"

namespace qpcover {

using SeedPtr = std::shared_ptr<const Seed>;
SeedPtr make_seed(Seed sd);

/// Exponent of a y-monomial: nonnegative coordinates over the unfrozen
/// indices of a seed.
using Expo = std::vector<int>;

int expo_total(const Expo& n);
std::string expo_str(const Expo& n);

/// Formal series supported on the monoid of nonnegative unfrozen exponents,
/// truncated at a total degree.  Used both for Hamiltonians (y-monomials)
/// and for automorphism images (monomials standing for x^{p*(n)}).
class TruncatedSeries {
public:
    TruncatedSeries(SeedPtr seed, int order);
    static TruncatedSeries one(SeedPtr seed, int order);

    const SeedPtr& seed() const { return seed_; }
    int order() const { return order_; }
    const std::map<Expo, Rat>& terms() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const;
    Rat coefficient(const Expo& n) const;
    int min_degree() const; // order + 1 when zero

    void add(const Expo& n, const Rat& c);
    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries scaled(const Rat& c) const;
    /// Multiplicative inverse; requires a nonzero constant term.
    TruncatedSeries inverse() const;
    TruncatedSeries pow(long long e) const;
    TruncatedSeries truncated(int order) const;
    bool operator==(const TruncatedSeries& o) const;
    std::string str() const;

private:
    SeedPtr seed_;
    int order_;
    std::map<Expo, Rat> c_;
};

/// A wall-crossing operator recorded through its images theta(x_i) =
/// x_i * S_i, with S_i a series in the monomials x^{p*(n)} and constant
/// term 1; frozen indices are fixed.
class TruncatedAutomorphism {
public:
    TruncatedAutomorphism(SeedPtr seed, int order, std::vector<TruncatedSeries> images);
    static TruncatedAutomorphism identity(SeedPtr seed, int order);

    const SeedPtr& seed() const { return seed_; }
    int order() const { return order_; }
    const TruncatedSeries& image(int i) const { return images_[i]; }

    /// Applies the substitution x^{p*(n)} -> x^{p*(n)} * prod_j S_j^{(Bn)_j}.
    TruncatedSeries apply(const TruncatedSeries& s) const;
    /// this after other (right factor acts first).
    TruncatedAutomorphism compose(const TruncatedAutomorphism& other) const;
    TruncatedAutomorphism inverse() const;
    TruncatedAutomorphism truncated(int order) const;
    bool is_identity() const;
    bool operator==(const TruncatedAutomorphism& o) const;

    /// Coefficients of theta(x_i)/x_i re-keyed by the actual dual-lattice
    /// exponent p*(n); collapses monomials when p* is not injective.
    std::map<RatVec, Rat> exponent_table(int i) const;

private:
    SeedPtr seed_;
    int order_;
    std::vector<TruncatedSeries> images_;
};

/// theta = exp of the Hamiltonian action {y^n, x^m} = <n, m> x^{m + p*(n)}.
TruncatedAutomorphism exp_action(const TruncatedSeries& hamiltonian, int order);

struct ThetaOptions {
    bool principal = true;
    bool use_opposite = false;
    EulerOptions euler;
};

struct ThetaResult {
    SeedPtr seed;        // seed of the automorphism (principal when requested)
    SeedPtr plain_seed;  // seed of the quiver itself
    QuiverPtr module_quiver;      // quiver the modules were taken over
    std::shared_ptr<Potential> module_potential;
    TruncatedAutomorphism theta;
};

/// The stability wall-crossing operator: S_i = sum over n of
/// chi(Quot_n^nilp(P_i)) x^{p*(n)} up to total degree `order`.
ThetaResult theta_stability(const Quiver& q, const Potential& w, int order,
                            const ThetaOptions& opts = {});

/// Substitutes 1 for every principal frozen variable; the result lives
/// over the plain seed.
TruncatedAutomorphism evaluate_principal_at_one(const TruncatedAutomorphism& theta, SeedPtr plain);

/// Projects an automorphism over the total seed of a covering to the base:
/// monomial exponents push forward along fiber sums.  The images must
/// agree along every unfrozen orbit.
TruncatedAutomorphism project_automorphism(const SeedCovering& sc,
                                           const TruncatedAutomorphism& theta);

struct ThetaDiscrepancy {
    int base_index = -1;
    Expo nbar;
    Rat cover_value, base_value;
};

struct CompareThetaReport {
    bool equal = true;
    std::vector<ThetaDiscrepancy> rows;
    long long coefficients_compared = 0;
};

/// Computes the stability operators of both sides of a covering with
/// principal coefficients, projects the cover side, and compares all
/// coefficients up to the order.
CompareThetaReport compare_theta_covering(const QuiverCovering& c, const Potential& wbar, int order,
                                          const ThetaOptions& opts = {});

/// A wall: primitive normal in the positive unfrozen cone, a support that
/// is either the full hyperplane normal^perp or (rank two only) a ray, and
/// a Hamiltonian in powers of y^normal.
struct Wall {
    Expo normal;
    enum class Kind { Hyperplane, Ray } kind = Kind::Hyperplane;
    std::pair<long long, long long> ray_dir{0, 0};
    /// Ray direction in f-coordinates when the seed rank exceeds two;
    /// only restriction consumes it.
    RatVec ray_dir_full;
    std::map<int, Rat> ham; // multiple m -> coefficient of y^{m * normal}
    bool incoming = false;
};

struct RankTwoDiagram {
    SeedPtr seed;
    int order = 0;
    std::vector<Wall> walls;
};

/// One incoming wall per unfrozen index with the dilogarithm Hamiltonian
/// scaled by d_k.
std::vector<Wall> initial_cluster_walls(const SeedPtr& seed, int order);

TruncatedSeries wall_hamiltonian_series(const SeedPtr& seed, const Wall& w, int order);

/// Order-by-order consistency completion around the origin for a rank-2
/// seed: outgoing rays along -p*(n) absorb each loop defect.
RankTwoDiagram rank2_complete(const SeedPtr& seed, const std::vector<Wall>& incoming, int order);

/// Crossing = (wall index, sign of <normal, gamma'>); sign 0 is rejected.
TruncatedAutomorphism path_ordered_product(const RankTwoDiagram& d,
                                           const std::vector<std::pair<int, int>>& crossings);

/// Crossing sequence of a full counterclockwise loop from a generic start.
std::vector<std::pair<int, int>> full_loop_crossings(const RankTwoDiagram& d);
/// Crossing sequence of the standard positive-to-negative half loop.
std::vector<std::pair<int, int>> half_loop_crossings(const RankTwoDiagram& d);

bool loop_is_identity(const RankTwoDiagram& d);

/// Restriction of cover walls to the base along kappa: supports pull back
/// (hyperplanes to hyperplanes), normals push forward, functions project;
/// walls landing on a shared support are merged.
std::vector<Wall> restrict_walls(const SeedCovering& sc, const std::vector<Wall>& walls,
                                 int order);

bool walls_equal(const SeedPtr& seed, const std::vector<Wall>& a, const std::vector<Wall>& b,
                 int order);

} // namespace qpcover
