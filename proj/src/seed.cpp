#include "qpcover/seed.hpp"

#include <algorithm>
#include <sstream>

#include "qpcover/errors.hpp"
#include "qpcover/exact_linalg.hpp"

namespace qpcover {

long long total(const DimVec& n) {
    long long s = 0;
    for (long long x : n) s += x;
    return s;
}

std::string dimvec_str(const DimVec& n) {
    std::ostringstream os;
    for (size_t i = 0; i < n.size(); ++i) {
        if (i) os << ",";
        os << n[i];
    }
    return os.str();
}

std::vector<int> Seed::unfrozen() const {
    std::vector<int> u;
    for (int i = 0; i < size(); ++i)
        if (!frozen[i]) u.push_back(i);
    return u;
}

Rat Seed::pairing(const DimVec& n, const MVec& m) const {
    // <e_i, f_j> = delta_ij / d_j
    Rat s(0);
    for (int i = 0; i < size(); ++i)
        if (n[i] != 0 && m[i] != 0) s += Rat(static_cast<long>(n[i])) * m[i] / d[i];
    return s;
}

void Seed::validate() const {
    int n = size();
    if (static_cast<int>(frozen.size()) != n || static_cast<int>(d.size()) != n ||
        static_cast<int>(B.size()) != n)
        throw StructuralError("seed: inconsistent field sizes");
    for (int i = 0; i < n; ++i) {
        if (d[i] <= 0) throw StructuralError("seed: d must be positive at " + names[i]);
        if (static_cast<int>(B[i].size()) != n) throw StructuralError("seed: B is not square");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (B[i][j] * d[j] != -B[j][i] * d[i])
                throw StructuralError("seed: B_ij d_j != -B_ji d_i at (" + names[i] + "," +
                                      names[j] + ")");
            if ((!frozen[i] || !frozen[j]) && !rat_is_integer(B[i][j]))
                throw StructuralError("seed: B_ij must be an integer when i or j is unfrozen");
        }
}

MVec p_star(const Seed& sd, const DimVec& n) {
    if (static_cast<int>(n.size()) != sd.size())
        throw StructuralError("p_star: dimension vector has wrong length");
    for (int k = 0; k < sd.size(); ++k)
        if (sd.frozen[k] && n[k] != 0)
            throw StructuralError("p_star: vector supported on a frozen index");
    MVec m(sd.size(), Rat(0));
    for (int k = 0; k < sd.size(); ++k) {
        if (n[k] == 0) continue;
        for (int i = 0; i < sd.size(); ++i) m[i] += Rat(static_cast<long>(n[k])) * sd.B[i][k];
    }
    return m;
}

RatMat p_star_matrix(const Seed& sd) {
    auto uf = sd.unfrozen();
    RatMat m(sd.size(), RatVec(uf.size(), Rat(0)));
    for (size_t c = 0; c < uf.size(); ++c)
        for (int i = 0; i < sd.size(); ++i) m[i][c] = sd.B[i][uf[c]];
    return m;
}

bool p_star_injective(const Seed& sd) {
    return rank(p_star_matrix(sd)) == static_cast<int>(sd.unfrozen().size());
}

Seed seed_from_quiver(const Quiver& q) {
    auto bad = q.loops_and_two_cycles();
    // Loops and 2-cycles are tolerated between frozen vertices only.
    std::vector<std::string> offending;
    for (int a : bad) {
        const Arrow& ar = q.arrow(a);
        if (!q.vertex(ar.src).frozen || !q.vertex(ar.tgt).frozen) offending.push_back(ar.name);
    }
    if (!offending.empty()) {
        std::string msg = "seed_from_quiver: loop or 2-cycle at arrows";
        for (const auto& s : offending) msg += " " + s;
        throw StructuralError(msg);
    }
    Seed sd;
    int n = q.vertex_count();
    sd.names.reserve(n);
    for (const auto& v : q.vertices()) {
        sd.names.push_back(v.name);
        sd.frozen.push_back(v.frozen);
    }
    sd.d.assign(n, Rat(1));
    sd.B = mat_zero(n, n);
    for (const auto& a : q.arrows()) {
        sd.B[a.src][a.tgt] += 1;
        sd.B[a.tgt][a.src] -= 1;
    }
    sd.validate();
    return sd;
}

Seed principal_seed(const Seed& sd) {
    int n = sd.size();
    Seed p;
    p.names = sd.names;
    p.frozen = sd.frozen;
    p.d = sd.d;
    for (int i = 0; i < n; ++i) {
        p.names.push_back(sd.names[i] + "'");
        p.frozen.push_back(true);
        p.d.push_back(Rat(1));
    }
    // Extend the skew form by {e_i, e_j'} = delta_ij, {e_i', e_j'} = 0 and
    // read B back off it: B_ij = {e_j, e_i} d_i.
    p.B = mat_zero(2 * n, 2 * n);
    auto skew = [&](int i, int j) -> Rat {
        bool ip = i >= n, jp = j >= n;
        if (!ip && !jp) return sd.skew(i, j);
        if (ip && jp) return Rat(0);
        if (!ip && jp) return i == j - n ? Rat(1) : Rat(0);
        return i - n == j ? Rat(-1) : Rat(0);
    };
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) p.B[i][j] = skew(j, i) * p.d[i];
    p.validate();
    return p;
}

MVec SeedCovering::kappa(const MVec& base_m) const {
    MVec m(total.size(), Rat(0));
    for (int ib = 0; ib < base.size(); ++ib) {
        if (base_m[ib] == 0) continue;
        Rat share = base_m[ib] / Rat(static_cast<long>(orbits[ib].size()));
        for (int i : orbits[ib]) m[i] += share;
    }
    return m;
}

MVec SeedCovering::project_m(const MVec& total_m) const {
    MVec m(base.size(), Rat(0));
    for (int i = 0; i < total.size(); ++i) m[orbit_of[i]] += total_m[i];
    return m;
}

DimVec SeedCovering::project_n(const DimVec& total_n) const {
    DimVec n(base.size(), 0);
    for (int i = 0; i < total.size(); ++i) n[orbit_of[i]] += total_n[i];
    return n;
}

SeedCovering seed_covering(const Seed& sd, const std::vector<std::vector<int>>& orbits,
                           const std::vector<std::string>& base_names) {
    sd.validate();
    if (!base_names.empty() && base_names.size() != orbits.size())
        throw StructuralError("seed covering: wrong number of base names");
    int n = sd.size();
    std::vector<int> orbit_of(n, -1);
    for (size_t ob = 0; ob < orbits.size(); ++ob) {
        if (orbits[ob].empty()) throw StructuralError("seed covering: empty orbit");
        for (int i : orbits[ob]) {
            if (i < 0 || i >= n || orbit_of[i] != -1)
                throw StructuralError("seed covering: orbits are not a partition");
            orbit_of[i] = static_cast<int>(ob);
        }
    }
    for (int i = 0; i < n; ++i)
        if (orbit_of[i] == -1) throw StructuralError("seed covering: orbits are not a partition");

    for (const auto& orbit : orbits) {
        for (int i : orbit) {
            if (sd.frozen[i] != sd.frozen[orbit[0]])
                throw StructuralError("seed covering: orbit mixes frozen and unfrozen indices");
            if (sd.d[i] != sd.d[orbit[0]])
                throw StructuralError("seed covering: d not constant on orbit of " +
                                      sd.names[orbit[0]]);
        }
    }
    // Column condition: orbit sums of B columns agree within each orbit.
    for (size_t ib = 0; ib < orbits.size(); ++ib) {
        for (size_t jb = 0; jb < orbits.size(); ++jb) {
            const auto& oj = orbits[jb];
            Rat ref(0);
            for (int ip : orbits[ib]) ref += sd.B[ip][oj[0]];
            for (size_t t = 1; t < oj.size(); ++t) {
                Rat s(0);
                for (int ip : orbits[ib]) s += sd.B[ip][oj[t]];
                if (s != ref)
                    throw StructuralError("seed covering: column sums differ, witness (" +
                                          sd.names[orbits[ib][0]] + "-orbit, " + sd.names[oj[0]] +
                                          ", " + sd.names[oj[t]] + ")");
            }
        }
    }

    SeedCovering sc;
    sc.total = sd;
    sc.orbits = orbits;
    sc.orbit_of = orbit_of;
    Seed& b = sc.base;
    for (size_t ib = 0; ib < orbits.size(); ++ib) {
        const auto& orbit = orbits[ib];
        b.names.push_back(base_names.empty() ? sd.names[orbit[0]] : base_names[ib]);
        b.frozen.push_back(sd.frozen[orbit[0]]);
        b.d.push_back(sd.d[orbit[0]] * Rat(static_cast<long>(orbit.size())));
    }
    b.B = mat_zero(static_cast<int>(orbits.size()), static_cast<int>(orbits.size()));
    for (size_t ib = 0; ib < orbits.size(); ++ib)
        for (size_t jb = 0; jb < orbits.size(); ++jb)
            for (int ip : orbits[ib]) b.B[ib][jb] += sd.B[ip][orbits[jb][0]];
    b.validate(); // includes the skew-symmetrizability identity for (Bbar, dbar)
    return sc;
}

} // namespace qpcover
