#include "qpcover/scattering.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "qpcover/errors.hpp"

namespace qpcover {

SeedPtr make_seed(Seed sd) {
    sd.validate();
    return std::make_shared<const Seed>(std::move(sd));
}

int expo_total(const Expo& n) {
    int s = 0;
    for (int x : n) s += x;
    return s;
}

std::string expo_str(const Expo& n) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < n.size(); ++i) {
        if (i) os << ",";
        os << n[i];
    }
    os << ")";
    return os.str();
}

namespace {

// position of each seed index inside the unfrozen list; -1 when frozen
std::vector<int> position_of_index(const Seed& sd) {
    std::vector<int> pos(sd.size(), -1);
    auto uf = sd.unfrozen();
    for (size_t p = 0; p < uf.size(); ++p) pos[uf[p]] = static_cast<int>(p);
    return pos;
}

DimVec expo_to_dimvec(const Seed& sd, const Expo& n) {
    DimVec v(sd.size(), 0);
    auto uf = sd.unfrozen();
    for (size_t p = 0; p < uf.size(); ++p) v[uf[p]] = n[p];
    return v;
}

// {m, n} for exponents over the unfrozen positions
Rat skew_nn(const Seed& sd, const Expo& m, const Expo& n) {
    auto uf = sd.unfrozen();
    Rat s(0);
    for (size_t a = 0; a < uf.size(); ++a) {
        if (m[a] == 0) continue;
        for (size_t b = 0; b < uf.size(); ++b) {
            if (n[b] == 0) continue;
            // {e_k, e_j} = B_jk / d_j
            s += Rat(m[a]) * Rat(n[b]) * sd.B[uf[b]][uf[a]] / sd.d[uf[b]];
        }
    }
    return s;
}

Expo expo_add(const Expo& a, const Expo& b) {
    Expo r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

} // namespace

TruncatedSeries::TruncatedSeries(SeedPtr seed, int order) : seed_(std::move(seed)), order_(order) {
    if (order_ < 0) throw StructuralError("series: negative order");
}

TruncatedSeries TruncatedSeries::one(SeedPtr seed, int order) {
    TruncatedSeries s(std::move(seed), order);
    s.add(Expo(s.seed_->unfrozen().size(), 0), Rat(1));
    return s;
}

bool TruncatedSeries::is_one() const {
    if (c_.size() != 1) return false;
    const auto& [n, c] = *c_.begin();
    return expo_total(n) == 0 && c == 1;
}

Rat TruncatedSeries::coefficient(const Expo& n) const {
    auto it = c_.find(n);
    return it == c_.end() ? Rat(0) : it->second;
}

int TruncatedSeries::min_degree() const {
    int m = order_ + 1;
    for (const auto& [n, c] : c_) m = std::min(m, expo_total(n));
    return m;
}

void TruncatedSeries::add(const Expo& n, const Rat& c) {
    if (static_cast<int>(n.size()) != static_cast<int>(seed_->unfrozen().size()))
        throw StructuralError("series: exponent has wrong length");
    if (c == 0 || expo_total(n) > order_) return;
    auto [it, fresh] = c_.emplace(n, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) c_.erase(it);
    }
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    TruncatedSeries r = *this;
    for (const auto& [n, c] : o.c_) r.add(n, c);
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const {
    TruncatedSeries r = *this;
    for (const auto& [n, c] : o.c_) r.add(n, -c);
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    TruncatedSeries r(seed_, std::min(order_, o.order_));
    for (const auto& [n, c] : c_)
        for (const auto& [m, d] : o.c_) {
            if (expo_total(n) + expo_total(m) > r.order_) continue;
            r.add(expo_add(n, m), c * d);
        }
    return r;
}

TruncatedSeries TruncatedSeries::scaled(const Rat& c) const {
    TruncatedSeries r(seed_, order_);
    if (c == 0) return r;
    for (const auto& [n, x] : c_) r.c_.emplace(n, x * c);
    return r;
}

TruncatedSeries TruncatedSeries::inverse() const {
    Expo zero(seed_->unfrozen().size(), 0);
    Rat c0 = coefficient(zero);
    if (c0 == 0) throw StructuralError("series inverse: zero constant term");
    // write S = c0 (1 - N); invert the geometric series
    TruncatedSeries n_part = *this;
    n_part.c_.erase(zero);
    n_part = n_part.scaled(Rat(-1) / c0);
    TruncatedSeries acc = one(seed_, order_);
    TruncatedSeries powed = one(seed_, order_);
    for (int k = 1; k <= order_; ++k) {
        powed = powed * n_part;
        if (powed.is_zero()) break;
        acc = acc + powed;
    }
    return acc.scaled(Rat(1) / c0);
}

TruncatedSeries TruncatedSeries::pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    TruncatedSeries acc = one(seed_, order_);
    TruncatedSeries base = *this;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

TruncatedSeries TruncatedSeries::truncated(int order) const {
    TruncatedSeries r(seed_, order);
    for (const auto& [n, c] : c_) r.add(n, c);
    return r;
}

bool TruncatedSeries::operator==(const TruncatedSeries& o) const {
    return c_ == o.c_;
}

std::string TruncatedSeries::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [n, c] : c_) {
        if (!first) os << " + ";
        first = false;
        os << rat_str(c) << "*y^" << expo_str(n);
    }
    return os.str();
}

TruncatedAutomorphism::TruncatedAutomorphism(SeedPtr seed, int order,
                                             std::vector<TruncatedSeries> images)
    : seed_(std::move(seed)), order_(order), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != seed_->size())
        throw StructuralError("automorphism: wrong image count");
    Expo zero(seed_->unfrozen().size(), 0);
    for (const auto& s : images_)
        if (s.coefficient(zero) != 1)
            throw StructuralError("automorphism: image series must have constant term 1");
}

TruncatedAutomorphism TruncatedAutomorphism::identity(SeedPtr seed, int order) {
    std::vector<TruncatedSeries> imgs;
    for (int i = 0; i < seed->size(); ++i) imgs.push_back(TruncatedSeries::one(seed, order));
    return TruncatedAutomorphism(std::move(seed), order, std::move(imgs));
}

TruncatedSeries TruncatedAutomorphism::apply(const TruncatedSeries& s) const {
    const Seed& sd = *seed_;
    auto uf = sd.unfrozen();
    TruncatedSeries out(seed_, std::min(order_, s.order()));
    for (const auto& [n, c] : s.terms()) {
        // theta(x^{p*(n)}) = x^{p*(n)} prod_j S_j^{(Bn)_j}
        TruncatedSeries factor = TruncatedSeries::one(seed_, out.order());
        for (int j = 0; j < sd.size(); ++j) {
            if (images_[j].is_one()) continue;
            Rat e(0);
            for (size_t k = 0; k < uf.size(); ++k)
                if (n[k] != 0) e += sd.B[j][uf[k]] * Rat(n[k]);
            long long ei = rat_ll(e);
            if (ei == 0) continue;
            factor = factor * images_[j].pow(ei);
        }
        for (const auto& [m, cm] : factor.terms()) out.add(expo_add(n, m), c * cm);
    }
    return out;
}

TruncatedAutomorphism TruncatedAutomorphism::compose(const TruncatedAutomorphism& other) const {
    if (seed_->size() != other.seed_->size())
        throw StructuralError("automorphism compose: seed mismatch");
    int ord = std::min(order_, other.order_);
    std::vector<TruncatedSeries> imgs;
    for (int i = 0; i < seed_->size(); ++i)
        imgs.push_back((images_[i] * apply(other.images_[i])).truncated(ord));
    return TruncatedAutomorphism(seed_, ord, std::move(imgs));
}

TruncatedAutomorphism TruncatedAutomorphism::inverse() const {
    std::vector<TruncatedSeries> imgs;
    for (int i = 0; i < seed_->size(); ++i) {
        TruncatedSeries u = images_[i].inverse();
        TruncatedSeries t = u;
        for (int k = 0; k < order_; ++k) t = u - (apply(t) - t);
        imgs.push_back(std::move(t));
    }
    return TruncatedAutomorphism(seed_, order_, std::move(imgs));
}

TruncatedAutomorphism TruncatedAutomorphism::truncated(int order) const {
    std::vector<TruncatedSeries> imgs;
    for (const auto& s : images_) imgs.push_back(s.truncated(order));
    return TruncatedAutomorphism(seed_, order, std::move(imgs));
}

bool TruncatedAutomorphism::is_identity() const {
    for (const auto& s : images_)
        if (!s.is_one()) return false;
    return true;
}

bool TruncatedAutomorphism::operator==(const TruncatedAutomorphism& o) const {
    if (seed_->size() != o.seed_->size() || order_ != o.order_) return false;
    for (int i = 0; i < seed_->size(); ++i)
        if (!(images_[i] == o.images_[i])) return false;
    return true;
}

std::map<RatVec, Rat> TruncatedAutomorphism::exponent_table(int i) const {
    std::map<RatVec, Rat> table;
    for (const auto& [n, c] : images_[i].terms()) {
        MVec m = p_star(*seed_, expo_to_dimvec(*seed_, n));
        auto [it, fresh] = table.emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) table.erase(it);
        }
    }
    return table;
}

TruncatedAutomorphism exp_action(const TruncatedSeries& hamiltonian, int order) {
    SeedPtr seed = hamiltonian.seed();
    const Seed& sd = *seed;
    if (hamiltonian.min_degree() < 1)
        throw StructuralError("exp_action: Hamiltonian must have positive degree");
    TruncatedSeries h = hamiltonian.truncated(order);
    auto pos = position_of_index(sd);

    std::vector<TruncatedSeries> imgs;
    for (int i = 0; i < sd.size(); ++i) {
        // S_i = sum_j D^j(1)/j! with D the Hamiltonian derivation pulled
        // past the fixed factor x_i
        auto derive = [&](const TruncatedSeries& f) {
            TruncatedSeries out(seed, order);
            for (const auto& [m, c] : f.terms())
                for (const auto& [np, hc] : h.terms()) {
                    if (expo_total(m) + expo_total(np) > order) continue;
                    Rat coeff(0);
                    if (pos[i] >= 0 && np[pos[i]] != 0) coeff += Rat(np[pos[i]]) / sd.d[i];
                    coeff += skew_nn(sd, m, np);
                    if (coeff == 0) continue;
                    out.add(expo_add(m, np), c * hc * coeff);
                }
            return out;
        };
        TruncatedSeries total = TruncatedSeries::one(seed, order);
        TruncatedSeries term = TruncatedSeries::one(seed, order);
        Rat factorial(1);
        for (int j = 1; j <= order; ++j) {
            term = derive(term);
            if (term.is_zero()) break;
            factorial *= j;
            total = total + term.scaled(Rat(1) / factorial);
        }
        imgs.push_back(std::move(total));
    }
    return TruncatedAutomorphism(seed, order, std::move(imgs));
}

namespace {

// ---- rank-2 geometry -------------------------------------------------

void check_rank2(const Seed& sd) {
    if (sd.size() != 2 || sd.frozen[0] || sd.frozen[1])
        throw StructuralError("rank-2 operation: seed must have exactly two unfrozen indices");
}

using Dir = std::pair<long long, long long>;

Dir primitive_dir(const Rat& x, const Rat& y) {
    if (x == 0 && y == 0) throw StructuralError("primitive_dir: zero vector");
    mpz_class l = x.get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), y.get_den().get_mpz_t());
    mpz_class a = x.get_num() * (l / x.get_den());
    mpz_class b = y.get_num() * (l / y.get_den());
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    a /= g;
    b /= g;
    if (!a.fits_slong_p() || !b.fits_slong_p()) throw StructuralError("primitive_dir: overflow");
    return {a.get_si(), b.get_si()};
}

__int128 cross(const Dir& a, const Dir& b) {
    return static_cast<__int128>(a.first) * b.second - static_cast<__int128>(a.second) * b.first;
}

__int128 dot(const Dir& a, const Dir& b) {
    return static_cast<__int128>(a.first) * b.first + static_cast<__int128>(a.second) * b.second;
}

bool parallel(const Dir& a, const Dir& b) {
    return cross(a, b) == 0;
}

// counterclockwise sector of v measured from the start direction
int sector(const Dir& start, const Dir& v) {
    __int128 cr = cross(start, v);
    __int128 dt = dot(start, v);
    if (cr == 0) return dt > 0 ? 0 : 2;
    return cr > 0 ? 1 : 3;
}

bool angle_less(const Dir& start, const Dir& a, const Dir& b) {
    int sa = sector(start, a), sb = sector(start, b);
    if (sa != sb) return sa < sb;
    return cross(a, b) > 0;
}

MVec p_star_expo(const Seed& sd, const Expo& n) {
    return p_star(sd, expo_to_dimvec(sd, n));
}

// pairing of a normal with a direction in f-coordinates
Rat normal_pairing(const Seed& sd, const Expo& normal, const Dir& dir) {
    auto uf = sd.unfrozen();
    Rat s(0);
    s += Rat(normal[0]) * Rat(static_cast<long>(dir.first)) / sd.d[uf[0]];
    s += Rat(normal[1]) * Rat(static_cast<long>(dir.second)) / sd.d[uf[1]];
    return s;
}

Dir hyperplane_dir(const Seed& sd, const Expo& normal) {
    auto uf = sd.unfrozen();
    // solve n0/d0 x + n1/d1 y = 0
    Rat a = Rat(normal[0]) / sd.d[uf[0]];
    Rat b = Rat(normal[1]) / sd.d[uf[1]];
    return primitive_dir(b, -a);
}

struct CrossEvent {
    int wall;
    Dir dir;
};

std::vector<CrossEvent> all_events(const RankTwoDiagram& d) {
    std::vector<CrossEvent> ev;
    for (size_t w = 0; w < d.walls.size(); ++w) {
        const Wall& wall = d.walls[w];
        if (wall.kind == Wall::Kind::Hyperplane) {
            Dir dir = hyperplane_dir(*d.seed, wall.normal);
            ev.push_back({static_cast<int>(w), dir});
            ev.push_back({static_cast<int>(w), {-dir.first, -dir.second}});
        } else {
            ev.push_back({static_cast<int>(w), wall.ray_dir});
        }
    }
    return ev;
}

int crossing_sign(const Seed& sd, const Expo& normal, const Dir& ray) {
    // counterclockwise tangent at the crossing
    Dir tangent{-ray.second, ray.first};
    Rat s = normal_pairing(sd, normal, tangent);
    if (s == 0) throw StructuralError("crossing tangent to a wall");
    return s > 0 ? 1 : -1;
}

Expo primitive_expo(const Expo& n, int& multiple) {
    long long g = 0;
    for (int x : n) g = std::gcd(g, static_cast<long long>(x));
    if (g == 0) throw StructuralError("primitive_expo: zero exponent");
    Expo r = n;
    for (int& x : r) x = static_cast<int>(x / g);
    multiple = static_cast<int>(g);
    return r;
}

Dir generic_start(const SeedPtr& seed, int order, const std::vector<Wall>& walls) {
    std::vector<Dir> forbidden;
    for (const auto& w : walls) {
        if (w.kind == Wall::Kind::Hyperplane)
            forbidden.push_back(hyperplane_dir(*seed, w.normal));
        else
            forbidden.push_back(w.ray_dir);
    }
    // every potential outgoing ray direction up to the order
    for (int a = 0; a <= order; ++a)
        for (int b = 0; b <= order - a; ++b) {
            if (a == 0 && b == 0) continue;
            MVec ps = p_star_expo(*seed, {a, b});
            auto uf = seed->unfrozen();
            if (ps[uf[0]] == 0 && ps[uf[1]] == 0) continue;
            forbidden.push_back(primitive_dir(ps[uf[0]], ps[uf[1]]));
        }
    for (long long k = 1; k < 4096; ++k) {
        for (Dir cand : {Dir{2 * k - 1, 2}, Dir{2, 2 * k - 1}}) {
            bool ok = true;
            for (const auto& f : forbidden)
                if (parallel(cand, f)) ok = false;
            if (ok) return cand;
        }
    }
    throw StructuralError("generic_start: no generic direction found");
}

TruncatedAutomorphism crossing_operator(const RankTwoDiagram& d, const CrossEvent& ev, int order) {
    const Wall& w = d.walls[ev.wall];
    int eps = -crossing_sign(*d.seed, w.normal, ev.dir);
    TruncatedSeries h = wall_hamiltonian_series(d.seed, w, order);
    return exp_action(h.scaled(Rat(eps)), order);
}

TruncatedAutomorphism loop_product_from(const RankTwoDiagram& d, const Dir& start, int order) {
    auto ev = all_events(d);
    std::sort(ev.begin(), ev.end(), [&](const CrossEvent& a, const CrossEvent& b) {
        if (parallel(a.dir, b.dir) && dot(a.dir, b.dir) > 0) return a.wall < b.wall;
        return angle_less(start, a.dir, b.dir);
    });
    TruncatedAutomorphism acc = TruncatedAutomorphism::identity(d.seed, order);
    for (const auto& e : ev) acc = crossing_operator(d, e, order).compose(acc);
    return acc;
}

} // namespace

std::vector<Wall> initial_cluster_walls(const SeedPtr& seed, int order) {
    const Seed& sd = *seed;
    auto uf = sd.unfrozen();
    if (uf.size() != 2) check_rank2(sd);
    std::vector<Wall> walls;
    for (size_t p = 0; p < uf.size(); ++p) {
        Wall w;
        w.normal.assign(uf.size(), 0);
        w.normal[p] = 1;
        w.kind = Wall::Kind::Hyperplane;
        w.incoming = true;
        // exp(-d_k Li2(-y_k)): Hamiltonian coefficients d_k (-1)^{m+1} / m^2
        for (int m = 1; m <= order; ++m) {
            Rat c = sd.d[uf[p]] * Rat(m % 2 == 1 ? 1 : -1) / Rat(m) / Rat(m);
            w.ham[m] = c;
        }
        walls.push_back(std::move(w));
    }
    return walls;
}

TruncatedSeries wall_hamiltonian_series(const SeedPtr& seed, const Wall& w, int order) {
    TruncatedSeries h(seed, order);
    int deg = expo_total(w.normal);
    for (const auto& [m, c] : w.ham) {
        if (m * deg > order) continue;
        Expo n = w.normal;
        for (int& x : n) x *= m;
        h.add(n, c);
    }
    return h;
}

TruncatedAutomorphism path_ordered_product(const RankTwoDiagram& d,
                                           const std::vector<std::pair<int, int>>& crossings) {
    TruncatedAutomorphism acc = TruncatedAutomorphism::identity(d.seed, d.order);
    for (const auto& [wi, sign] : crossings) {
        if (wi < 0 || wi >= static_cast<int>(d.walls.size()))
            throw StructuralError("path_ordered_product: wall index out of range");
        if (sign == 0) throw StructuralError("path_ordered_product: crossing tangent to a wall");
        const Wall& w = d.walls[wi];
        TruncatedSeries h = wall_hamiltonian_series(d.seed, w, d.order);
        int eps = sign > 0 ? -1 : 1;
        acc = exp_action(h.scaled(Rat(eps)), d.order).compose(acc);
    }
    return acc;
}

std::vector<std::pair<int, int>> full_loop_crossings(const RankTwoDiagram& d) {
    Dir start = generic_start(d.seed, d.order, d.walls);
    auto ev = all_events(d);
    std::sort(ev.begin(), ev.end(), [&](const CrossEvent& a, const CrossEvent& b) {
        if (parallel(a.dir, b.dir) && dot(a.dir, b.dir) > 0) return a.wall < b.wall;
        return angle_less(start, a.dir, b.dir);
    });
    std::vector<std::pair<int, int>> out;
    for (const auto& e : ev)
        out.emplace_back(e.wall, crossing_sign(*d.seed, d.walls[e.wall].normal, e.dir));
    return out;
}

std::vector<std::pair<int, int>> half_loop_crossings(const RankTwoDiagram& d) {
    // generic start inside the positive chamber
    std::vector<Dir> forbidden;
    for (const auto& e : all_events(d)) forbidden.push_back(e.dir);
    Dir start{0, 0};
    for (long long k = 1; k < 4096 && start == Dir{0, 0}; ++k) {
        for (Dir cand : {Dir{2 * k - 1, 2}, Dir{2, 2 * k - 1}}) {
            bool ok = true;
            for (const auto& f : forbidden)
                if (parallel(cand, f)) ok = false;
            if (ok) {
                start = cand;
                break;
            }
        }
    }
    if (start == Dir{0, 0}) throw StructuralError("half_loop: no generic start");
    auto ev = all_events(d);
    std::vector<CrossEvent> half;
    for (const auto& e : ev)
        if (sector(start, e.dir) == 1) half.push_back(e);
    std::sort(half.begin(), half.end(), [&](const CrossEvent& a, const CrossEvent& b) {
        if (parallel(a.dir, b.dir) && dot(a.dir, b.dir) > 0) return a.wall < b.wall;
        return angle_less(start, a.dir, b.dir);
    });
    std::vector<std::pair<int, int>> out;
    for (const auto& e : half)
        out.emplace_back(e.wall, crossing_sign(*d.seed, d.walls[e.wall].normal, e.dir));
    return out;
}

bool loop_is_identity(const RankTwoDiagram& d) {
    Dir start = generic_start(d.seed, d.order, d.walls);
    return loop_product_from(d, start, d.order).is_identity();
}

RankTwoDiagram rank2_complete(const SeedPtr& seed, const std::vector<Wall>& incoming, int order) {
    check_rank2(*seed);
    for (const auto& w : incoming)
        if (w.kind != Wall::Kind::Hyperplane)
            throw StructuralError("rank2_complete: incoming walls must be hyperplanes");
    RankTwoDiagram d{seed, order, incoming};
    Dir start = generic_start(seed, order, incoming);
    auto uf = seed->unfrozen();

    for (int grade = 2; grade <= order; ++grade) {
        TruncatedAutomorphism loop = loop_product_from(d, start, grade);
        // extract the leading defect as a Hamiltonian
        std::map<Expo, Rat> defect;
        for (size_t p = 0; p < uf.size(); ++p) {
            const TruncatedSeries& s = loop.image(static_cast<int>(uf[p]));
            for (const auto& [n, c] : s.terms()) {
                int t = expo_total(n);
                if (t == 0) continue;
                if (t < grade)
                    throw StructuralError("rank2_complete: leftover defect below grade " +
                                          std::to_string(grade));
                if (t > grade) continue;
                Rat h = c * seed->d[uf[p]] / Rat(n[p]);
                if (n[p] == 0) {
                    if (c != 0)
                        throw StructuralError("rank2_complete: defect is not Hamiltonian");
                    continue;
                }
                auto [it, fresh] = defect.emplace(n, h);
                if (!fresh && it->second != h)
                    throw StructuralError("rank2_complete: defect is not Hamiltonian");
            }
        }
        if (defect.empty()) continue;
        for (const auto& [n, h] : defect) {
            int multiple = 1;
            Expo n0 = primitive_expo(n, multiple);
            MVec ps = p_star_expo(*seed, n0);
            if (ps[uf[0]] == 0 && ps[uf[1]] == 0)
                throw StructuralError("rank2_complete: defect with p*(n) = 0 cannot be outgoing");
            Dir ray = primitive_dir(-ps[uf[0]], -ps[uf[1]]);
            int eps = -crossing_sign(*seed, n0, ray);
            Rat delta = -h / Rat(eps);
            bool merged = false;
            for (auto& w : d.walls)
                if (w.kind == Wall::Kind::Ray && w.ray_dir == ray && w.normal == n0) {
                    w.ham[multiple] += delta;
                    merged = true;
                    break;
                }
            if (!merged) {
                Wall w;
                w.normal = n0;
                w.kind = Wall::Kind::Ray;
                w.ray_dir = ray;
                w.ham[multiple] = delta;
                w.incoming = false;
                d.walls.push_back(std::move(w));
            }
        }
        TruncatedAutomorphism check = loop_product_from(d, start, grade);
        for (size_t p = 0; p < uf.size(); ++p)
            if (!check.image(static_cast<int>(uf[p])).is_one())
                throw StructuralError("rank2_complete: defect at grade " + std::to_string(grade) +
                                      " not killed by outgoing rays");
    }
    if (!loop_product_from(d, start, order).is_identity())
        throw StructuralError("rank2_complete: final consistency check failed");
    return d;
}

ThetaResult theta_stability(const Quiver& q, const Potential& w, int order,
                            const ThetaOptions& opts) {
    for (const auto& v : q.vertices())
        if (v.frozen)
            throw StructuralError("theta_stability: the quiver must have no frozen vertices");
    Seed plain = seed_from_quiver(q);
    SeedPtr plain_ptr = make_seed(plain);
    SeedPtr use = opts.principal ? make_seed(principal_seed(plain)) : plain_ptr;

    QuiverPtr module_quiver;
    const Quiver* mq = &q;
    std::shared_ptr<Potential> mw;
    if (opts.use_opposite) {
        auto [oq, ow] = opposite(q, w);
        module_quiver = oq;
        mq = oq.get();
        mw = std::make_shared<Potential>(std::move(ow));
    } else {
        mw = std::make_shared<Potential>(w);
    }

    int nv = q.vertex_count();
    std::vector<TruncatedSeries> images;
    for (int i = 0; i < use->size(); ++i) images.push_back(TruncatedSeries::one(use, order));

    // group dimension vectors by the truncation order they need
    std::map<int, std::vector<DimVec>> by_order;
    std::function<void(DimVec&, int, int)> gen = [&](DimVec& n, int idx, int rest) {
        if (idx == nv) {
            if (total(n) >= 1)
                by_order[static_cast<int>(std::max<long long>(total(n) - 1, 1))].push_back(n);
            return;
        }
        for (int take = 0; take <= rest; ++take) {
            n[idx] = take;
            gen(n, idx + 1, rest - take);
        }
        n[idx] = 0;
    };
    DimVec scratch(nv, 0);
    gen(scratch, 0, order);

    for (const auto& [l, dimvecs] : by_order) {
        TruncatedJacobianAlgebra alg(*mq, *mw, l);
        for (int i = 0; i < nv; ++i) {
            ProjectiveModulePresentation p = projective_presentation(alg, i);
            for (const DimVec& n : dimvecs) {
                EulerResult r = euler_quot_of_presentation(p, n, opts.euler);
                if (!r.conclusive)
                    throw InconclusiveError("theta_stability: chi inconclusive at vertex " +
                                            q.vertex(i).name + ", n = " + dimvec_str(n) + " (" +
                                            r.note + ")");
                if (r.value == 0) continue;
                Expo e(n.begin(), n.end());
                images[i].add(e, Rat(static_cast<long>(r.value)));
            }
        }
    }
    TruncatedAutomorphism theta(use, order, std::move(images));
    return ThetaResult{use, plain_ptr, module_quiver, mw, std::move(theta)};
}

TruncatedAutomorphism evaluate_principal_at_one(const TruncatedAutomorphism& theta, SeedPtr plain) {
    const Seed& prin = *theta.seed();
    const Seed& sd = *plain;
    if (prin.size() != 2 * sd.size())
        throw StructuralError("evaluate_principal_at_one: seed sizes do not match");
    if (prin.unfrozen().size() != sd.unfrozen().size())
        throw StructuralError("evaluate_principal_at_one: unfrozen parts do not match");
    std::vector<TruncatedSeries> imgs;
    for (int i = 0; i < sd.size(); ++i) {
        TruncatedSeries s(plain, theta.order());
        for (const auto& [n, c] : theta.image(i).terms()) s.add(n, c);
        imgs.push_back(std::move(s));
    }
    return TruncatedAutomorphism(std::move(plain), theta.order(), std::move(imgs));
}

TruncatedAutomorphism project_automorphism(const SeedCovering& sc,
                                           const TruncatedAutomorphism& theta) {
    const Seed& tsd = *theta.seed();
    bool principal = tsd.size() == 2 * sc.total.size();
    if (!principal && tsd.size() != sc.total.size())
        throw StructuralError("project_automorphism: seed does not match the covering");
    SeedPtr target = make_seed(principal ? principal_seed(sc.base) : sc.base);

    // unfrozen position maps (principal seeds share the unfrozen part)
    auto tot_uf = sc.total.unfrozen();
    auto base_uf = sc.base.unfrozen();
    std::vector<int> base_pos(sc.base.size(), -1);
    for (size_t p = 0; p < base_uf.size(); ++p) base_pos[base_uf[p]] = static_cast<int>(p);

    auto project_expo = [&](const Expo& n) {
        Expo nb(base_uf.size(), 0);
        for (size_t p = 0; p < tot_uf.size(); ++p)
            nb[base_pos[sc.orbit_of[tot_uf[p]]]] += n[p];
        return nb;
    };

    std::vector<TruncatedSeries> imgs;
    for (int ib = 0; ib < target->size(); ++ib) imgs.push_back(TruncatedSeries::one(target, theta.order()));

    for (int ib = 0; ib < sc.base.size(); ++ib) {
        if (sc.base.frozen[ib]) continue;
        std::optional<TruncatedSeries> projected;
        for (int i : sc.orbits[ib]) {
            TruncatedSeries s(target, theta.order());
            for (const auto& [n, c] : theta.image(i).terms()) s.add(project_expo(n), c);
            if (!projected) {
                projected = std::move(s);
            } else if (!(*projected == s)) {
                throw StructuralError("project_automorphism: images differ along the orbit of " +
                                      sc.base.names[ib]);
            }
        }
        imgs[ib] = std::move(*projected);
    }
    return TruncatedAutomorphism(target, theta.order(), std::move(imgs));
}

CompareThetaReport compare_theta_covering(const QuiverCovering& c, const Potential& wbar, int order,
                                          const ThetaOptions& opts) {
    Potential w = sigma_potential(c, wbar);
    ThetaResult cover = theta_stability(c.total(), w, order, opts);
    ThetaResult base = theta_stability(c.base(), wbar, order, opts);
    SeedCovering sc = induced_seed_covering(c);
    TruncatedAutomorphism projected = project_automorphism(sc, cover.theta);

    CompareThetaReport rep;
    for (int ib = 0; ib < c.base().vertex_count(); ++ib) {
        const TruncatedSeries& lhs = projected.image(ib);
        const TruncatedSeries& rhs = base.theta.image(ib);
        std::map<Expo, std::pair<Rat, Rat>> merged;
        for (const auto& [n, v] : lhs.terms()) merged[n].first = v;
        for (const auto& [n, v] : rhs.terms()) merged[n].second = v;
        for (const auto& [n, pairv] : merged) {
            ++rep.coefficients_compared;
            if (pairv.first != pairv.second) {
                rep.equal = false;
                rep.rows.push_back({ib, n, pairv.first, pairv.second});
            }
        }
    }
    return rep;
}

std::vector<Wall> restrict_walls(const SeedCovering& sc, const std::vector<Wall>& walls,
                                 int order) {
    if (sc.base.unfrozen().size() != 2)
        throw StructuralError("restrict_walls: supported only over rank-2 bases; "
                              "compare wall-crossing operators instead");
    auto tot_uf = sc.total.unfrozen();
    auto base_uf = sc.base.unfrozen();
    std::vector<int> base_pos(sc.base.size(), -1);
    for (size_t p = 0; p < base_uf.size(); ++p) base_pos[base_uf[p]] = static_cast<int>(p);

    std::vector<Wall> out;
    for (const Wall& w : walls) {
        Expo nbar(base_uf.size(), 0);
        for (size_t p = 0; p < tot_uf.size(); ++p)
            nbar[base_pos[sc.orbit_of[tot_uf[p]]]] += w.normal[p];
        int multiple = 1;
        Expo nb0 = primitive_expo(nbar, multiple);
        Wall r;
        r.normal = nb0;
        if (w.kind == Wall::Kind::Hyperplane) {
            r.kind = Wall::Kind::Hyperplane;
            r.incoming = true;
        } else {
            r.kind = Wall::Kind::Ray;
            if (tot_uf.size() == 2 && sc.total.size() == 2) {
                r.ray_dir = w.ray_dir;
            } else {
                // solve kappa(x f_1 + y f_2) = t * dir; drop the wall when
                // the ray only meets the image of kappa at the origin
                if (static_cast<int>(w.ray_dir_full.size()) != sc.total.size())
                    throw StructuralError("restrict_walls: ray wall misses its direction data");
                MVec k0(sc.base.size(), Rat(0)), k1(sc.base.size(), Rat(0));
                k0[base_uf[0]] = 1;
                k1[base_uf[1]] = 1;
                MVec kf0 = sc.kappa(k0), kf1 = sc.kappa(k1);
                Mat sys(sc.total.size(), RatVec(3, Rat(0)));
                for (int i = 0; i < sc.total.size(); ++i) {
                    sys[i][0] = kf0[i];
                    sys[i][1] = kf1[i];
                    sys[i][2] = -w.ray_dir_full[i];
                }
                auto null_vecs = kernel_basis(sys);
                std::optional<Dir> dir;
                for (const auto& v : null_vecs)
                    if (v[2] != 0) {
                        Rat x = v[0] / v[2], y = v[1] / v[2]; // t > 0 side of the ray
                        if (x == 0 && y == 0) continue;
                        dir = primitive_dir(x, y);
                    }
                if (!dir) continue; // support meets image(kappa) only at the origin
                r.ray_dir = *dir;
            }
            MVec ps = p_star(sc.base, expo_to_dimvec(sc.base, nb0));
            r.incoming = false;
            if (!(ps[base_uf[0]] == 0 && ps[base_uf[1]] == 0)) {
                Dir pd = primitive_dir(ps[base_uf[0]], ps[base_uf[1]]);
                r.incoming = pd == r.ray_dir;
            }
        }
        for (const auto& [m, coeff] : w.ham) {
            int key = m * multiple;
            if (key * expo_total(nb0) > order) continue;
            r.ham[key] += coeff;
        }
        if (r.ham.empty()) continue;
        bool merged = false;
        for (auto& existing : out) {
            if (existing.kind != r.kind || existing.normal != r.normal) continue;
            if (r.kind == Wall::Kind::Ray && existing.ray_dir != r.ray_dir) continue;
            for (const auto& [m, coeff] : r.ham) existing.ham[m] += coeff;
            merged = true;
            break;
        }
        if (!merged) out.push_back(std::move(r));
    }
    for (auto& w : out)
        for (auto it = w.ham.begin(); it != w.ham.end();)
            it = it->second == 0 ? w.ham.erase(it) : std::next(it);
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Wall& w) { return w.ham.empty(); }),
              out.end());
    return out;
}

bool walls_equal(const SeedPtr& seed, const std::vector<Wall>& a, const std::vector<Wall>& b,
                 int order) {
    auto canon = [&](const std::vector<Wall>& ws) {
        std::map<std::tuple<int, Expo, Dir>, std::map<int, Rat>> m;
        for (const Wall& w : ws) {
            Dir dir = w.kind == Wall::Kind::Ray ? w.ray_dir : Dir{0, 0};
            auto& ham = m[{static_cast<int>(w.kind), w.normal, dir}];
            for (const auto& [mult, c] : w.ham) {
                if (mult * expo_total(w.normal) > order || c == 0) continue;
                ham[mult] += c;
            }
        }
        for (auto it = m.begin(); it != m.end();) {
            for (auto h = it->second.begin(); h != it->second.end();)
                h = h->second == 0 ? it->second.erase(h) : std::next(h);
            it = it->second.empty() ? m.erase(it) : std::next(it);
        }
        return m;
    };
    (void)seed;
    return canon(a) == canon(b);
}

} // namespace qpcover
