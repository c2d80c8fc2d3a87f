#include "qpcover/quiver.hpp"

#include <algorithm>
#include <sstream>

#include "qpcover/errors.hpp"

namespace qpcover {

std::optional<int> Quiver::vertex_index(const std::string& name) const {
    auto it = vertex_by_name_.find(name);
    if (it == vertex_by_name_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> Quiver::arrow_index(const std::string& name) const {
    auto it = arrow_by_name_.find(name);
    if (it == arrow_by_name_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> Quiver::loops_and_two_cycles() const {
    std::vector<int> bad;
    for (int a = 0; a < arrow_count(); ++a) {
        const Arrow& ar = arrows_[a];
        if (ar.src == ar.tgt) {
            bad.push_back(a);
            continue;
        }
        for (int b : out_[ar.tgt]) {
            if (arrows_[b].tgt == ar.src) {
                bad.push_back(a);
                break;
            }
        }
    }
    return bad;
}

int QuiverBuilder::add_vertex(const std::string& name, bool frozen) {
    if (q_.vertex_by_name_.count(name))
        throw StructuralError("duplicate vertex id '" + name + "'");
    int idx = q_.vertex_count();
    q_.vertices_.push_back({name, frozen});
    q_.vertex_by_name_[name] = idx;
    q_.out_.emplace_back();
    q_.in_.emplace_back();
    return idx;
}

int QuiverBuilder::add_arrow(const std::string& name, const std::string& src, const std::string& tgt) {
    auto s = q_.vertex_index(src);
    auto t = q_.vertex_index(tgt);
    if (!s) throw StructuralError("arrow '" + name + "': undeclared vertex '" + src + "'");
    if (!t) throw StructuralError("arrow '" + name + "': undeclared vertex '" + tgt + "'");
    return add_arrow(name, *s, *t);
}

int QuiverBuilder::add_arrow(const std::string& name, int src, int tgt) {
    if (q_.arrow_by_name_.count(name))
        throw StructuralError("duplicate arrow id '" + name + "'");
    if (src < 0 || src >= q_.vertex_count() || tgt < 0 || tgt >= q_.vertex_count())
        throw StructuralError("arrow '" + name + "': endpoint out of range");
    int idx = q_.arrow_count();
    q_.arrows_.push_back({name, src, tgt});
    q_.arrow_by_name_[name] = idx;
    q_.out_[src].push_back(idx);
    q_.in_[tgt].push_back(idx);
    return idx;
}

QuiverPtr QuiverBuilder::build() {
    return std::make_shared<const Quiver>(std::move(q_));
}

Path::Path(const Quiver* q, int lazy_vertex, std::vector<int> arrows)
    : q_(q), lazy_vertex_(lazy_vertex), arrows_(std::move(arrows)) {}

Path Path::lazy(const Quiver& q, int v) {
    if (v < 0 || v >= q.vertex_count()) throw StructuralError("lazy path: vertex out of range");
    return Path(&q, v, {});
}

Path Path::of_arrows(const Quiver& q, std::vector<int> arrows) {
    if (arrows.empty()) throw StructuralError("composite path needs at least one arrow");
    for (size_t i = 0; i < arrows.size(); ++i) {
        int a = arrows[i];
        if (a < 0 || a >= q.arrow_count()) throw StructuralError("path: arrow index out of range");
        if (i + 1 < arrows.size() && q.arrow(a).tgt != q.arrow(arrows[i + 1]).src)
            throw StructuralError("path: arrows '" + q.arrow(a).name + "' and '" +
                                  q.arrow(arrows[i + 1]).name + "' do not chain");
    }
    return Path(&q, -1, std::move(arrows));
}

int Path::source() const { return is_lazy() ? lazy_vertex_ : q_->arrow(arrows_.front()).src; }
int Path::target() const { return is_lazy() ? lazy_vertex_ : q_->arrow(arrows_.back()).tgt; }

int Path::compare(const Path& other) const {
    if (q_ != other.q_) throw StructuralError("comparing paths over different quivers");
    if (length() != other.length()) return length() < other.length() ? -1 : 1;
    if (is_lazy()) {
        if (lazy_vertex_ != other.lazy_vertex_) return lazy_vertex_ < other.lazy_vertex_ ? -1 : 1;
        return 0;
    }
    if (arrows_ != other.arrows_) return arrows_ < other.arrows_ ? -1 : 1;
    return 0;
}

Path Path::rotated(int i) const {
    if (is_lazy()) return *this;
    if (!is_cycle()) throw StructuralError("rotating a non-cycle");
    int k = length();
    std::vector<int> rot;
    rot.reserve(k);
    for (int j = 0; j < k; ++j) rot.push_back(arrows_[(i + j) % k]);
    return Path(q_, -1, std::move(rot));
}

Path Path::cyclic_normal_form() const {
    if (is_lazy()) return *this;
    Path best = *this;
    for (int i = 1; i < length(); ++i) {
        Path r = rotated(i);
        if (r.arrows() < best.arrows()) best = r;
    }
    return best;
}

std::string Path::str() const {
    if (is_lazy()) return "e_" + q_->vertex(lazy_vertex_).name;
    std::string s;
    for (size_t i = 0; i < arrows_.size(); ++i) {
        if (i) s += ".";
        s += q_->arrow(arrows_[i]).name;
    }
    return s;
}

std::optional<Path> compose(const Path& p, const Path& q) {
    if (p.quiver() != q.quiver()) throw StructuralError("composing paths over different quivers");
    if (q.target() != p.source()) return std::nullopt;
    if (q.is_lazy()) return p;
    if (p.is_lazy()) return q;
    std::vector<int> arrows = q.arrows();
    arrows.insert(arrows.end(), p.arrows().begin(), p.arrows().end());
    return Path::of_arrows(*p.quiver(), std::move(arrows));
}

AlgebraElement::AlgebraElement(const Quiver& q, int order_bound) : q_(&q), bound_(order_bound) {}

void AlgebraElement::add(const Path& p, const Rat& c) {
    if (p.quiver() != q_) throw StructuralError("adding path over a different quiver");
    if (c == 0) return;
    if (bound_ != kUnbounded && p.length() > bound_) return;
    auto it = terms_.find(p);
    if (it == terms_.end()) {
        terms_.emplace(p, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Rat AlgebraElement::coefficient(const Path& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? Rat(0) : it->second;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
    if (other.q_ != q_) throw StructuralError("adding elements over different quivers");
    for (const auto& [p, c] : other.terms_) add(p, c);
    return *this;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& other) const {
    AlgebraElement r = *this;
    r += other;
    return r;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& other) const {
    return *this + other.scaled(Rat(-1));
}

AlgebraElement AlgebraElement::scaled(const Rat& c) const {
    AlgebraElement r(*q_, bound_);
    if (c == 0) return r;
    for (const auto& [p, x] : terms_) r.terms_.emplace(p, x * c);
    return r;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& other) const {
    if (other.q_ != q_) throw StructuralError("multiplying elements over different quivers");
    int bound = bound_;
    if (bound == kUnbounded) bound = other.bound_;
    else if (other.bound_ != kUnbounded) bound = std::min(bound, other.bound_);
    AlgebraElement r(*q_, bound);
    for (const auto& [p, cp] : terms_)
        for (const auto& [q, cq] : other.terms_)
            if (auto pq = compose(p, q)) r.add(*pq, cp * cq);
    return r;
}

AlgebraElement AlgebraElement::truncated(int order_bound) const {
    AlgebraElement r(*q_, order_bound);
    for (const auto& [p, c] : terms_) r.add(p, c);
    return r;
}

bool AlgebraElement::operator==(const AlgebraElement& other) const {
    if (q_ != other.q_) throw StructuralError("comparing elements over different quivers");
    return terms_ == other.terms_;
}

std::string AlgebraElement::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c != 1) os << rat_str(c) << "*";
        os << p.str();
    }
    return os.str();
}

Potential::Potential(const Quiver& q) : q_(&q) {}

Potential::Potential(const Quiver& q, const std::vector<std::pair<Rat, Path>>& terms) : q_(&q) {
    for (const auto& [c, p] : terms) add_term(c, p);
}

void Potential::add_term(const Rat& c, const Path& cycle) {
    if (cycle.quiver() != q_) throw StructuralError("potential term over a different quiver");
    if (cycle.is_lazy() || !cycle.is_cycle())
        throw StructuralError("potential term '" + cycle.str() + "' is not a closed path");
    if (c == 0) return;
    for (size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].second == cycle) {
            terms_[i].first += c;
            if (terms_[i].first == 0) terms_.erase(terms_.begin() + i);
            return;
        }
    }
    terms_.emplace_back(c, cycle);
}

Potential Potential::operator+(const Potential& other) const {
    if (other.q_ != q_) throw StructuralError("adding potentials over different quivers");
    Potential r = *this;
    for (const auto& [c, p] : other.terms_) r.add_term(c, p);
    return r;
}

AlgebraElement Potential::as_element(int order_bound) const {
    AlgebraElement r(*q_, order_bound);
    for (const auto& [c, p] : terms_) r.add(p, c);
    return r;
}

Potential Potential::cyclically_normalized() const {
    Potential r(*q_);
    for (const auto& [c, p] : terms_) r.add_term(c, p.cyclic_normal_form());
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    return r;
}

bool Potential::cyclically_equal(const Potential& other) const {
    return cyclically_normalized() == other.cyclically_normalized();
}

bool Potential::operator==(const Potential& other) const {
    if (q_ != other.q_) throw StructuralError("comparing potentials over different quivers");
    auto a = terms_;
    auto b = other.terms_;
    auto less = [](const auto& x, const auto& y) { return x.second < y.second; };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    return a == b;
}

int Potential::shortest_cycle() const {
    int m = -1;
    for (const auto& [c, p] : terms_)
        if (m < 0 || p.length() < m) m = p.length();
    return m;
}

std::string Potential::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [c, p] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c != 1) os << rat_str(c) << "*";
        os << p.str();
    }
    return os.str();
}

AlgebraElement cyclic_derivative(int arrow, const Potential& w) {
    const Quiver& q = *w.quiver();
    if (arrow < 0 || arrow >= q.arrow_count())
        throw StructuralError("cyclic derivative: arrow index out of range");
    AlgebraElement r(q);
    for (const auto& [c, cycle] : w.terms()) {
        const auto& arrows = cycle.arrows();
        int k = cycle.length();
        for (int i = 0; i < k; ++i) {
            if (arrows[i] != arrow) continue;
            if (k == 1) {
                r.add(Path::lazy(q, q.arrow(arrow).src), c);
            } else {
                std::vector<int> rest;
                rest.reserve(k - 1);
                for (int j = 1; j < k; ++j) rest.push_back(arrows[(i + j) % k]);
                r.add(Path::of_arrows(q, std::move(rest)), c);
            }
        }
    }
    return r;
}

QuiverPtr opposite(const Quiver& q) {
    QuiverBuilder b;
    for (const auto& v : q.vertices()) b.add_vertex(v.name, v.frozen);
    for (const auto& a : q.arrows()) b.add_arrow(a.name, a.tgt, a.src);
    return b.build();
}

std::pair<QuiverPtr, Potential> opposite(const Quiver& q, const Potential& w) {
    QuiverPtr op = opposite(q);
    Potential wop(*op);
    for (const auto& [c, p] : w.terms()) {
        std::vector<int> rev(p.arrows().rbegin(), p.arrows().rend());
        wop.add_term(c, Path::of_arrows(*op, std::move(rev)));
    }
    return {op, std::move(wop)};
}

std::vector<Path> enumerate_paths(const Quiver& q, const PathFilter& filter, int max_len) {
    if (max_len < 0) throw StructuralError("enumerate_paths: negative length bound");
    std::vector<Path> out;
    for (int v = 0; v < q.vertex_count(); ++v) {
        if (filter.from && *filter.from != v) continue;
        if (filter.to && *filter.to != v) continue;
        out.push_back(Path::lazy(q, v));
    }
    // Grow frontier by length; arrows_from lists are ascending, so appending
    // in frontier order keeps each length block lexicographically sorted.
    std::vector<std::vector<int>> frontier;
    for (int a = 0; a < q.arrow_count(); ++a) {
        if (filter.from && q.arrow(a).src != *filter.from) continue;
        frontier.push_back({a});
    }
    std::sort(frontier.begin(), frontier.end());
    for (int len = 1; len <= max_len && !frontier.empty(); ++len) {
        for (const auto& arrows : frontier) {
            int end = q.arrow(arrows.back()).tgt;
            if (filter.to && end != *filter.to) continue;
            out.push_back(Path::of_arrows(q, arrows));
        }
        if (len == max_len) break;
        std::vector<std::vector<int>> next;
        for (const auto& arrows : frontier) {
            int end = q.arrow(arrows.back()).tgt;
            for (int a : q.arrows_from(end)) {
                auto ext = arrows;
                ext.push_back(a);
                next.push_back(std::move(ext));
            }
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

} // namespace qpcover
