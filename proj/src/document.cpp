#include "qpcover/document.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "qpcover/errors.hpp"

namespace qpcover {

const Quiver& DocumentModel::quiver(const std::string& name) const {
    return *quiver_ptr(name);
}

QuiverPtr DocumentModel::quiver_ptr(const std::string& name) const {
    auto it = quivers.find(name);
    if (it == quivers.end()) throw InputError("unknown quiver '" + name + "'");
    return it->second;
}

const Potential& DocumentModel::potential(const std::string& name) const {
    auto it = potentials.find(name);
    if (it == potentials.end()) throw InputError("unknown potential '" + name + "'");
    return *it->second;
}

const CoverEntry& DocumentModel::cover(const std::string& name) const {
    auto it = covers.find(name);
    if (it == covers.end()) throw InputError("unknown cover '" + name + "'");
    return it->second;
}

const SeedEntry& DocumentModel::seed(const std::string& name) const {
    auto it = seeds.find(name);
    if (it == seeds.end()) throw InputError("unknown seed '" + name + "'");
    return it->second;
}

Potential DocumentModel::potential_for(const std::string& quiver_name,
                                       const std::string& name) const {
    const Quiver& q = quiver(quiver_name);
    if (name.empty()) return Potential(q);
    auto it = potentials.find(name);
    if (it == potentials.end()) throw InputError("unknown potential '" + name + "'");
    if (potential_quiver.at(name) != quiver_name)
        throw InputError("potential '" + name + "' is over quiver '" + potential_quiver.at(name) +
                         "', not '" + quiver_name + "'");
    return *it->second;
}

void DocumentModel::add_quiver(const std::string& name, QuiverPtr q) {
    if (quivers.count(name)) throw InputError("duplicate quiver id '" + name + "'");
    quivers.emplace(name, std::move(q));
    declaration_order.emplace_back("quiver", name);
}

void DocumentModel::add_potential(const std::string& name, const std::string& quiver_name,
                                  Potential w) {
    if (potentials.count(name)) throw InputError("duplicate potential id '" + name + "'");
    potentials.emplace(name, std::make_shared<Potential>(std::move(w)));
    potential_quiver.emplace(name, quiver_name);
    declaration_order.emplace_back("potential", name);
}

void DocumentModel::add_cover(const std::string& name, CoverEntry entry) {
    if (covers.count(name)) throw InputError("duplicate cover id '" + name + "'");
    covers.emplace(name, std::move(entry));
    declaration_order.emplace_back("cover", name);
}

void DocumentModel::add_seed(const std::string& name, SeedEntry entry) {
    if (seeds.count(name)) throw InputError("duplicate seed id '" + name + "'");
    seeds.emplace(name, std::move(entry));
    declaration_order.emplace_back("seed", name);
}

namespace {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::istringstream ls(raw);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
    }
    return lines;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw InputError("line " + std::to_string(line) + ": " + msg);
}

// parses "(x y z)(u v)" cycle notation into a permutation of the given names
std::vector<int> parse_cycles(int line, const std::string& text,
                              const std::function<std::optional<int>(const std::string&)>& index,
                              int size) {
    std::vector<int> perm(size);
    for (int i = 0; i < size; ++i) perm[i] = i;
    size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') ++pos;
        if (pos >= text.size()) break;
        if (text[pos] != '(') fail(line, "expected '(' in cycle notation");
        // ids may contain balanced parentheses (sheet names), so match depth
        size_t close = pos;
        int depth = 0;
        for (size_t i = pos; i < text.size(); ++i) {
            if (text[i] == '(') ++depth;
            if (text[i] == ')') {
                --depth;
                if (depth == 0) {
                    close = i;
                    break;
                }
            }
        }
        if (close == pos) fail(line, "unterminated cycle");
        std::istringstream cs(text.substr(pos + 1, close - pos - 1));
        std::vector<int> cycle;
        std::string tok;
        while (cs >> tok) {
            auto idx = index(tok);
            if (!idx) fail(line, "unknown id '" + tok + "' in cycle");
            cycle.push_back(*idx);
        }
        if (cycle.size() < 2) fail(line, "cycles need at least two entries");
        for (size_t i = 0; i < cycle.size(); ++i) perm[cycle[i]] = cycle[(i + 1) % cycle.size()];
        pos = close + 1;
    }
    return perm;
}

} // namespace

DocumentModel parse_document(const std::string& text) {
    DocumentModel doc;
    auto lines = tokenize(text);

    size_t i = 0;
    while (i < lines.size()) {
        const Line& header = lines[i];
        const auto& t = header.tokens;
        if (t[0] == "[quiver" && t.size() == 2 && t[1].back() == ']') {
            std::string name = t[1].substr(0, t[1].size() - 1);
            QuiverBuilder qb;
            ++i;
            while (i < lines.size() && lines[i].tokens[0][0] != '[') {
                const Line& l = lines[i];
                const auto& w = l.tokens;
                if (w[0] == "vertex" && w.size() == 3) {
                    if (w[2] != "frozen" && w[2] != "unfrozen")
                        fail(l.number, "vertex flag must be frozen or unfrozen");
                    try {
                        qb.add_vertex(w[1], w[2] == "frozen");
                    } catch (const Error& e) {
                        fail(l.number, e.what());
                    }
                } else if (w[0] == "arrow" && w.size() == 5 && w[3] == "->") {
                    try {
                        qb.add_arrow(w[1], w[2], w[4]);
                    } catch (const Error& e) {
                        fail(l.number, e.what());
                    }
                } else {
                    fail(l.number, "expected 'vertex ID (frozen|unfrozen)' or 'arrow ID SRC -> TGT'");
                }
                ++i;
            }
            try {
                doc.add_quiver(name, qb.build());
            } catch (const Error& e) {
                fail(header.number, e.what());
            }
        } else if (t[0] == "[potential" && t.size() == 4 && t[1] != "" && t[2] == "on" &&
                   t[3].back() == ']') {
            std::string name = t[1];
            std::string qname = t[3].substr(0, t[3].size() - 1);
            if (!doc.quivers.count(qname)) fail(header.number, "unknown quiver '" + qname + "'");
            const Quiver& q = doc.quiver(qname);
            Potential w(q);
            ++i;
            while (i < lines.size() && lines[i].tokens[0][0] != '[') {
                const Line& l = lines[i];
                const auto& w2 = l.tokens;
                if (w2[0] != "term" || w2.size() < 4 || w2[2] != ":")
                    fail(l.number, "expected 'term COEFF : A1 A2 ...'");
                Rat coeff;
                try {
                    coeff = rat_parse(w2[1]);
                } catch (const Error& e) {
                    fail(l.number, e.what());
                }
                std::vector<int> arrows;
                for (size_t k = 3; k < w2.size(); ++k) {
                    auto idx = q.arrow_index(w2[k]);
                    if (!idx) fail(l.number, "unknown arrow '" + w2[k] + "'");
                    arrows.push_back(*idx);
                }
                try {
                    w.add_term(coeff, Path::of_arrows(q, std::move(arrows)));
                } catch (const Error& e) {
                    fail(l.number, e.what());
                }
                ++i;
            }
            doc.add_potential(name, qname, std::move(w));
        } else if (t[0] == "[cover" && t.size() == 6 && t[2] == ":" && t[4] == "->" &&
                   t[5].back() == ']') {
            std::string name = t[1];
            std::string total_name = t[3];
            std::string base_name = t[5].substr(0, t[5].size() - 1);
            if (!doc.quivers.count(total_name))
                fail(header.number, "unknown quiver '" + total_name + "'");
            if (!doc.quivers.count(base_name))
                fail(header.number, "unknown quiver '" + base_name + "'");
            QuiverPtr total = doc.quiver_ptr(total_name);
            QuiverPtr base = doc.quiver_ptr(base_name);
            std::vector<int> vmap(total->vertex_count(), -1), amap(total->arrow_count(), -1);
            std::vector<DeckElement> gens;
            int order = 0;
            std::optional<std::vector<int>> sheets;
            ++i;
            while (i < lines.size() && lines[i].tokens[0][0] != '[') {
                const Line& l = lines[i];
                const auto& w2 = l.tokens;
                if (w2[0] == "vmap" && w2.size() == 4 && w2[2] == "->") {
                    auto v = total->vertex_index(w2[1]);
                    auto vb = base->vertex_index(w2[3]);
                    if (!v) fail(l.number, "unknown total vertex '" + w2[1] + "'");
                    if (!vb) fail(l.number, "unknown base vertex '" + w2[3] + "'");
                    vmap[*v] = *vb;
                } else if (w2[0] == "amap" && w2.size() == 4 && w2[2] == "->") {
                    auto a = total->arrow_index(w2[1]);
                    auto ab = base->arrow_index(w2[3]);
                    if (!a) fail(l.number, "unknown total arrow '" + w2[1] + "'");
                    if (!ab) fail(l.number, "unknown base arrow '" + w2[3] + "'");
                    amap[*a] = *ab;
                } else if (w2[0] == "deck" && w2.size() >= 7 && w2[1] == "order") {
                    order = std::stoi(w2[2]);
                    // tokens: deck order D vgen (..)(..) agen (..)(..)
                    std::string joined;
                    for (size_t k = 3; k < w2.size(); ++k) joined += w2[k] + " ";
                    auto vg = joined.find("vgen");
                    auto ag = joined.find("agen");
                    if (vg == std::string::npos || ag == std::string::npos || ag < vg)
                        fail(l.number, "expected 'deck order D vgen (...) agen (...)'");
                    std::string vtext = joined.substr(vg + 4, ag - vg - 4);
                    std::string atext = joined.substr(ag + 4);
                    DeckElement g;
                    g.vperm = parse_cycles(
                        l.number, vtext,
                        [&](const std::string& s) { return total->vertex_index(s); },
                        total->vertex_count());
                    g.aperm = parse_cycles(
                        l.number, atext,
                        [&](const std::string& s) { return total->arrow_index(s); },
                        total->arrow_count());
                    gens.push_back(std::move(g));
                } else if (w2[0] == "sheets") {
                    sheets = std::vector<int>(total->vertex_count(), -1);
                    for (size_t k = 1; k < w2.size(); ++k) {
                        auto colon = w2[k].find(':');
                        if (colon == std::string::npos) fail(l.number, "expected V:S in sheets");
                        auto v = total->vertex_index(w2[k].substr(0, colon));
                        if (!v) fail(l.number, "unknown vertex in sheets");
                        (*sheets)[*v] = std::stoi(w2[k].substr(colon + 1));
                    }
                } else {
                    fail(l.number, "unexpected line in cover block");
                }
                ++i;
            }
            for (int v = 0; v < total->vertex_count(); ++v)
                if (vmap[v] < 0)
                    fail(header.number, "cover '" + name + "': vertex " + total->vertex(v).name +
                                            " has no image");
            for (int a = 0; a < total->arrow_count(); ++a)
                if (amap[a] < 0)
                    fail(header.number, "cover '" + name + "': arrow " + total->arrow(a).name +
                                            " has no image");
            if (gens.empty()) fail(header.number, "cover '" + name + "' has no deck generators");
            CoverEntry entry;
            entry.total_name = total_name;
            entry.base_name = base_name;
            entry.covering = std::make_shared<QuiverCovering>(total, base, std::move(vmap),
                                                              std::move(amap), std::move(gens),
                                                              order);
            if (sheets) {
                for (int v = 0; v < total->vertex_count(); ++v)
                    if ((*sheets)[v] < 0)
                        fail(header.number, "cover '" + name + "': sheets line misses a vertex");
                entry.labeling = sheet_labeling_from_map(*entry.covering, *sheets);
            }
            doc.add_cover(name, std::move(entry));
        } else if (t[0] == "[seed" && t.size() == 4 && t[2] == "on" && t[3].back() == ']') {
            std::string name = t[1];
            std::string qname = t[3].substr(0, t[3].size() - 1);
            if (!doc.quivers.count(qname)) fail(header.number, "unknown quiver '" + qname + "'");
            const Quiver& q = doc.quiver(qname);
            Seed sd = seed_from_quiver(q);
            ++i;
            while (i < lines.size() && lines[i].tokens[0][0] != '[') {
                const Line& l = lines[i];
                const auto& w2 = l.tokens;
                if (w2[0] != "d" || w2.size() != 3) fail(l.number, "expected 'd V RATIONAL'");
                auto v = q.vertex_index(w2[1]);
                if (!v) fail(l.number, "unknown vertex '" + w2[1] + "'");
                sd.d[*v] = rat_parse(w2[2]);
                ++i;
            }
            try {
                sd.validate();
            } catch (const Error& e) {
                fail(header.number, e.what());
            }
            doc.add_seed(name, SeedEntry{std::move(sd), qname});
        } else {
            fail(header.number, "expected a [quiver], [potential], [cover] or [seed] header");
        }
    }
    return doc;
}

namespace {

std::string cycles_str(const std::vector<int>& perm,
                       const std::function<std::string(int)>& name) {
    std::string out;
    std::vector<bool> seen(perm.size(), false);
    for (size_t i = 0; i < perm.size(); ++i) {
        if (seen[i] || perm[i] == static_cast<int>(i)) continue;
        out += "(";
        size_t j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = true;
            if (!first) out += " ";
            first = false;
            out += name(static_cast<int>(j));
            j = perm[j];
        }
        out += ")";
    }
    return out.empty() ? "()" : out;
}

} // namespace

std::string serialize_document(const DocumentModel& doc) {
    std::ostringstream os;
    for (const auto& [kind, name] : doc.declaration_order) {
        if (kind == "quiver") {
            const Quiver& q = doc.quiver(name);
            os << "[quiver " << name << "]\n";
            for (const auto& v : q.vertices())
                os << "vertex " << v.name << " " << (v.frozen ? "frozen" : "unfrozen") << "\n";
            for (const auto& a : q.arrows())
                os << "arrow " << a.name << " " << q.vertex(a.src).name << " -> "
                   << q.vertex(a.tgt).name << "\n";
        } else if (kind == "potential") {
            const Potential& w = doc.potential(name);
            const Quiver& q = *w.quiver();
            os << "[potential " << name << " on " << doc.potential_quiver.at(name) << "]\n";
            for (const auto& [c, cyc] : w.terms()) {
                os << "term " << rat_str(c) << " :";
                for (int a : cyc.arrows()) os << " " << q.arrow(a).name;
                os << "\n";
            }
        } else if (kind == "cover") {
            const CoverEntry& e = doc.cover(name);
            const QuiverCovering& c = *e.covering;
            os << "[cover " << name << " : " << e.total_name << " -> " << e.base_name << "]\n";
            for (int v = 0; v < c.total().vertex_count(); ++v)
                os << "vmap " << c.total().vertex(v).name << " -> "
                   << c.base().vertex(c.vmap(v)).name << "\n";
            for (int a = 0; a < c.total().arrow_count(); ++a)
                os << "amap " << c.total().arrow(a).name << " -> "
                   << c.base().arrow(c.amap(a)).name << "\n";
            for (const auto& g : c.generators()) {
                os << "deck order " << c.degree() << " vgen "
                   << cycles_str(g.vperm, [&](int v) { return c.total().vertex(v).name; })
                   << " agen "
                   << cycles_str(g.aperm, [&](int a) { return c.total().arrow(a).name; }) << "\n";
            }
            if (e.labeling) {
                os << "sheets";
                for (int v = 0; v < c.total().vertex_count(); ++v)
                    os << " " << c.total().vertex(v).name << ":" << e.labeling->sheet[v];
                os << "\n";
            }
        } else if (kind == "seed") {
            const SeedEntry& e = doc.seed(name);
            if (e.quiver_name.empty()) continue; // standalone registry seeds are not serialized
            os << "[seed " << name << " on " << e.quiver_name << "]\n";
            for (int v = 0; v < e.seed.size(); ++v)
                os << "d " << e.seed.names[v] << " " << rat_str(e.seed.d[v]) << "\n";
        }
        os << "\n";
    }
    std::string s = os.str();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    if (!s.empty()) s += "\n";
    return s;
}

void merge_documents(DocumentModel& dst, const DocumentModel& src) {
    for (const auto& [kind, name] : src.declaration_order) {
        if (kind == "quiver") dst.add_quiver(name, src.quivers.at(name));
        else if (kind == "potential") {
            if (dst.potentials.count(name)) throw InputError("duplicate potential id '" + name + "'");
            dst.potentials.emplace(name, src.potentials.at(name));
            dst.potential_quiver.emplace(name, src.potential_quiver.at(name));
            dst.declaration_order.emplace_back(kind, name);
        } else if (kind == "cover") dst.add_cover(name, src.covers.at(name));
        else if (kind == "seed") dst.add_seed(name, src.seeds.at(name));
    }
}

} // namespace qpcover
