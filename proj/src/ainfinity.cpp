#include "polycalc/ainfinity.hpp"

#include <algorithm>
#include <sstream>

#include "polycalc/errors.hpp"

namespace polycalc {

F2Sum F2Sum::parse(std::string_view text) {
    F2Sum out;
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty() || text == "0") return out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t plus = text.find('+', pos);
        std::string_view tok = trim(text.substr(pos, plus == std::string_view::npos ? plus : plus - pos));
        if (tok.empty()) throw ParseError("empty summand in combination");
        out.add(std::string(tok));
        if (plus == std::string_view::npos) break;
        pos = plus + 1;
    }
    return out;
}

}  // namespace polycalc

namespace polycalc::ainf {

using splice::format_seqset;
using splice::format_splicing;

ChordSeq truncate_low(const ChordSeq& s, int k) {
    if (k < 0 || k > static_cast<int>(s.size())) throw ValidationError("truncate_low: out of range");
    return ChordSeq(s.begin(), s.begin() + k);
}

ChordSeq truncate_high(const ChordSeq& s, int k) {
    if (k < 0 || k > static_cast<int>(s.size())) throw ValidationError("truncate_high: out of range");
    if (k == 0) return s;
    return ChordSeq(s.begin() + (k - 1), s.end());
}

std::optional<ChordSeqSet> mu_bar(const ChordSeqSet& rho, int j, int k) {
    if (j < 1 || j > static_cast<int>(rho.size())) throw ValidationError("mu_bar: boundary out of range");
    const ChordSeq& row = rho[static_cast<size_t>(j - 1)];
    if (k < 1 || k >= static_cast<int>(row.size())) throw ValidationError("mu_bar: position out of range");
    auto p = torus::mul_gen(row[static_cast<size_t>(k - 1)], row[static_cast<size_t>(k)]);
    if (!p) return std::nullopt;
    ChordSeqSet out = rho;
    auto& orow = out[static_cast<size_t>(j - 1)];
    orow[static_cast<size_t>(k - 1)] = *p;
    orow.erase(orow.begin() + k);
    return out;
}

F2Sum MultiModule::m(const std::string& x, const ChordSeqSet& rho) const {
    auto it = maps.find({x, format_seqset(rho)});
    return it == maps.end() ? F2Sum{} : it->second;
}

void MultiModule::add_entry(const std::string& x, const ChordSeqSet& rho, const F2Sum& value) {
    auto key = std::make_pair(x, format_seqset(rho));
    auto& slot = maps[key];
    slot.add(value);
    if (slot.is_zero()) maps.erase(key);
}

F2Sum PartialMaps::n(const std::string& x, const ChordSeqSet& rho, const Splicing& sigma) const {
    auto it = maps.find({x, format_seqset(rho), format_splicing(sigma)});
    return it == maps.end() ? F2Sum{} : it->second;
}

void PartialMaps::add_entry(const std::string& x, const ChordSeqSet& rho, const Splicing& sigma,
                            const F2Sum& value) {
    auto key = std::make_tuple(x, format_seqset(rho), format_splicing(sigma));
    auto& slot = maps[key];
    slot.add(value);
    if (slot.is_zero()) maps.erase(key);
}

namespace {
// All row-cut tuples (0..len_j per row), odometer order.
std::vector<std::vector<int>> row_cuts(const ChordSeqSet& rho) {
    std::vector<std::vector<int>> out;
    std::vector<int> cut(rho.size(), 0);
    while (true) {
        out.push_back(cut);
        int j = static_cast<int>(rho.size()) - 1;
        while (j >= 0 && cut[static_cast<size_t>(j)] == static_cast<int>(rho[static_cast<size_t>(j)].size())) {
            cut[static_cast<size_t>(j)] = 0;
            --j;
        }
        if (j < 0) break;
        ++cut[static_cast<size_t>(j)];
    }
    return out;
}

void split_rows(const ChordSeqSet& rho, const std::vector<int>& cut, ChordSeqSet& lambda, ChordSeqSet& delta) {
    lambda.assign(rho.size(), {});
    delta.assign(rho.size(), {});
    for (size_t j = 0; j < rho.size(); ++j) {
        lambda[j].assign(rho[j].begin(), rho[j].begin() + cut[j]);
        delta[j].assign(rho[j].begin() + cut[j], rho[j].end());
    }
}
}  // namespace

F2Sum check_ainfinity(const MultiModule& M, const std::string& x, const ChordSeqSet& rho) {
    F2Sum residual;
    // two-story terms over all clean splits
    ChordSeqSet lambda, delta;
    for (const auto& cut : row_cuts(rho)) {
        split_rows(rho, cut, lambda, delta);
        F2Sum inner = M.m(x, lambda);
        for (const auto& y : inner.terms) residual.add(M.m(y, delta));
    }
    // mu-bar insertions; the differential insertions vanish identically here
    for (int j = 1; j <= static_cast<int>(rho.size()); ++j)
        for (int k = 1; k < static_cast<int>(rho[static_cast<size_t>(j - 1)].size()); ++k)
            if (auto mb = mu_bar(rho, j, k)) residual.add(M.m(x, *mb));
    return residual;
}

F2Sum check_partial(const PartialMaps& N, const std::string& x, const ChordSeqSet& rho,
                    const Splicing& sigma) {
    if (!splice::splices(sigma, rho) || !splice::is_interleaving(sigma))
        throw ValidationError("check_partial: sigma is not an interleaving of rho");
    F2Sum residual;
    for (const auto& sp : splice::enumerate_splits(rho, sigma)) {
        F2Sum inner = N.n(x, sp.lambda, sp.sigma1);
        for (const auto& y : inner.terms) residual.add(N.n(y, sp.delta, sp.sigma2));
    }
    for (int j = 0; j < static_cast<int>(rho.size()); ++j)
        for (int i = 0; i + 1 < static_cast<int>(rho[static_cast<size_t>(j)].size()); ++i) {
            auto cc = splice::compatible(rho, sigma, i, j);
            if (!cc || *cc == splice::CompatCase::ZeroProduct) continue;
            auto [nrho, nsigma] = splice::compose_at(rho, sigma, i, j);
            residual.add(N.n(x, nrho, nsigma));
        }
    for (int k = 0; k + 1 < sigma.cols(); ++k)
        if (splice::collidable(sigma, k)) residual.add(N.n(x, rho, splice::collide(sigma, k)));
    return residual;
}

MultiModule assemble_m_from_n(const PartialMaps& N) {
    MultiModule M;
    M.boundaries = N.boundaries;
    M.generators = N.generators;
    M.idempotent_of = N.idempotent_of;
    for (const auto& [key, value] : N.maps) {
        const auto& [x, rho_text, sigma_text] = key;
        ChordSeqSet rho = splice::parse_seqset(rho_text);
        Splicing sigma = splice::parse_splicing(sigma_text, static_cast<int>(rho.size()));
        if (!splice::is_interleaving(sigma)) continue;
        M.add_entry(x, rho, value);
    }
    return M;
}

std::vector<std::pair<std::string, ChordSeqSet>> table_reach(const MultiModule& M) {
    std::vector<std::pair<std::string, ChordSeqSet>> out;
    for (const auto& [key, value] : M.maps) out.emplace_back(key.first, splice::parse_seqset(key.second));
    return out;
}

std::vector<std::pair<std::string, ChordSeqSet>> table_reach(const PartialMaps& N) {
    std::vector<std::pair<std::string, ChordSeqSet>> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [key, value] : N.maps)
        if (seen.insert({std::get<0>(key), std::get<1>(key)}).second)
            out.emplace_back(std::get<0>(key), splice::parse_seqset(std::get<1>(key)));
    return out;
}

namespace {
std::string compact_seqset(const ChordSeqSet& rho) {
    std::string out;
    for (size_t j = 0; j < rho.size(); ++j) {
        if (j) out += "|";
        out += splice::format_seq(rho[j]);
    }
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
        size_t sep = line.find(';', pos);
        std::string f = line.substr(pos, sep == std::string::npos ? sep : sep - pos);
        size_t a = f.find_first_not_of(" \t");
        size_t b = f.find_last_not_of(" \t");
        fields.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
        if (sep == std::string::npos) break;
        pos = sep + 1;
    }
    return fields;
}
}  // namespace

std::string format_partial_maps(const PartialMaps& N) {
    std::string out;
    for (const auto& [key, value] : N.maps) {
        const auto& [x, rho_text, sigma_text] = key;
        out += x + " ; " + compact_seqset(splice::parse_seqset(rho_text)) + " ; " + sigma_text + " ; " +
               value.str() + "\n";
    }
    return out;
}

PartialMaps parse_partial_maps(std::string_view text) {
    PartialMaps N;
    std::set<std::string> gens;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.size() != 4) throw ParseError(lineno, "expected 4 ';'-separated fields");
        try {
            ChordSeqSet rho = splice::parse_seqset(fields[1]);
            Splicing sigma = splice::parse_splicing(fields[2], static_cast<int>(rho.size()));
            if (!splice::splices(sigma, rho)) throw ParseError(lineno, "splicing does not match sequences");
            if (N.boundaries == 0)
                N.boundaries = static_cast<int>(rho.size());
            else if (N.boundaries != static_cast<int>(rho.size()))
                throw ParseError(lineno, "inconsistent boundary count");
            F2Sum value = F2Sum::parse(fields[3]);
            N.add_entry(fields[0], rho, sigma, value);
            gens.insert(fields[0]);
            for (const auto& y : value.terms) gens.insert(y);
        } catch (const ParseError& e) {
            if (e.line) throw;
            throw ParseError(lineno, e.what());
        }
    }
    N.generators.assign(gens.begin(), gens.end());
    return N;
}

std::string format_multimodule(const MultiModule& M) {
    std::string out;
    for (const auto& [key, value] : M.maps)
        out += key.first + " ; " + compact_seqset(splice::parse_seqset(key.second)) + " ; " + value.str() + "\n";
    return out;
}

MultiModule parse_multimodule(std::string_view text) {
    MultiModule M;
    std::set<std::string> gens;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.size() != 3) throw ParseError(lineno, "expected 3 ';'-separated fields");
        try {
            ChordSeqSet rho = splice::parse_seqset(fields[1]);
            if (M.boundaries == 0)
                M.boundaries = static_cast<int>(rho.size());
            else if (M.boundaries != static_cast<int>(rho.size()))
                throw ParseError(lineno, "inconsistent boundary count");
            F2Sum value = F2Sum::parse(fields[2]);
            M.add_entry(fields[0], rho, value);
            gens.insert(fields[0]);
            for (const auto& y : value.terms) gens.insert(y);
        } catch (const ParseError& e) {
            if (e.line) throw;
            throw ParseError(lineno, e.what());
        }
    }
    M.generators.assign(gens.begin(), gens.end());
    return M;
}

namespace symbolic {

namespace {
std::string leaf(const ChordSeqSet& rho, const Splicing& sigma) {
    return "n(x ; " + format_seqset(rho) + " ; " + format_splicing(sigma) + ")";
}
std::string two_story_key(const splice::Split& sp) {
    return "n(n(x ; " + format_seqset(sp.lambda) + " ; " + format_splicing(sp.sigma1) + ") ; " +
           format_seqset(sp.delta) + " ; " + format_splicing(sp.sigma2) + ")";
}
}  // namespace

Expansion expand(const ChordSeqSet& rho) {
    Expansion e;
    // left side: the partial relation summed over all interleavings
    for (const auto& sigma : splice::enumerate_interleavings(rho)) {
        for (const auto& sp : splice::enumerate_splits(rho, sigma)) ++e.lhs_two_story[two_story_key(sp)];
        for (int j = 0; j < static_cast<int>(rho.size()); ++j)
            for (int i = 0; i + 1 < static_cast<int>(rho[static_cast<size_t>(j)].size()); ++i) {
                auto cc = splice::compatible(rho, sigma, i, j);
                if (!cc || *cc == splice::CompatCase::ZeroProduct) continue;
                auto [nrho, nsigma] = splice::compose_at(rho, sigma, i, j);
                if (*cc == splice::CompatCase::OneJumping)
                    ++e.lhs_case2[leaf(nrho, nsigma)];
                else
                    ++e.lhs_case3[leaf(nrho, nsigma)];
            }
        for (int k = 0; k + 1 < sigma.cols(); ++k)
            if (splice::collidable(sigma, k)) ++e.lhs_collision[leaf(rho, splice::collide(sigma, k))];
    }
    // right side: the relation for m expanded through m = sum of n over interleavings
    ChordSeqSet lambda, delta;
    std::vector<int> cut(rho.size(), 0);
    while (true) {
        lambda.assign(rho.size(), {});
        delta.assign(rho.size(), {});
        for (size_t j = 0; j < rho.size(); ++j) {
            lambda[j].assign(rho[j].begin(), rho[j].begin() + cut[j]);
            delta[j].assign(rho[j].begin() + cut[j], rho[j].end());
        }
        for (const auto& s1 : splice::enumerate_interleavings(lambda))
            for (const auto& s2 : splice::enumerate_interleavings(delta)) {
                splice::Split sp;
                sp.lambda = lambda;
                sp.delta = delta;
                sp.sigma1 = s1;
                sp.sigma2 = s2;
                ++e.rhs_two_story[two_story_key(sp)];
            }
        int j = static_cast<int>(rho.size()) - 1;
        while (j >= 0 && cut[static_cast<size_t>(j)] == static_cast<int>(rho[static_cast<size_t>(j)].size())) {
            cut[static_cast<size_t>(j)] = 0;
            --j;
        }
        if (j < 0) break;
        ++cut[static_cast<size_t>(j)];
    }
    for (int j = 1; j <= static_cast<int>(rho.size()); ++j)
        for (int k = 1; k < static_cast<int>(rho[static_cast<size_t>(j - 1)].size()); ++k) {
            auto mb = mu_bar(rho, j, k);
            if (!mb) continue;
            const ChordSeq& row = rho[static_cast<size_t>(j - 1)];
            bool both = torus::is_jumping(row[static_cast<size_t>(k - 1)]) &&
                        torus::is_jumping(row[static_cast<size_t>(k)]);
            auto& family = both ? e.rhs_mu_two_jumping : e.rhs_mu_one_jumping;
            for (const auto& tau : splice::enumerate_interleavings(*mb)) ++family[leaf(*mb, tau)];
        }
    return e;
}

bool all_even(const TermMultiset& t) {
    for (const auto& [key, count] : t)
        if (count % 2) return false;
    return true;
}

TermMultiset mod2(const TermMultiset& t) {
    TermMultiset out;
    for (const auto& [key, count] : t)
        if (count % 2) out[key] = 1;
    return out;
}

TermMultiset merge(const TermMultiset& a, const TermMultiset& b) {
    TermMultiset out = a;
    for (const auto& [key, count] : b) out[key] += count;
    return out;
}

}  // namespace symbolic

}  // namespace polycalc::ainf
