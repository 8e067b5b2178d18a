#include "polycalc/chord_splicing.hpp"

#include <algorithm>

#include "polycalc/errors.hpp"

namespace polycalc::splice {

using torus::is_jumping;

std::vector<int> jump_positions(const ChordSeq& s) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (is_jumping(s[i])) out.push_back(i);
    return out;
}

int jump_count(const ChordSeq& s) { return static_cast<int>(jump_positions(s).size()); }

int total_jumps(const ChordSeqSet& rho) {
    int t = 0;
    for (const auto& r : rho) t += jump_count(r);
    return t;
}

namespace {
ChordSeq reduce_with(ChordSeq s, bool only_123) {
    bool again = true;
    while (again) {
        again = false;
        for (size_t i = 0; i + 1 < s.size(); ++i) {
            auto p = torus::mul_gen(s[i], s[i + 1]);
            if (!p) continue;
            if (only_123 && *p != Gen::R123) continue;
            s[i] = *p;
            s.erase(s.begin() + static_cast<long>(i) + 1);
            again = true;
            break;
        }
    }
    return s;
}
}  // namespace

ChordSeq reduce(ChordSeq s) { return reduce_with(std::move(s), false); }
ChordSeq reduce_123(ChordSeq s) { return reduce_with(std::move(s), true); }

bool composable_equivalent(const ChordSeq& a, const ChordSeq& b) { return reduce(a) == reduce(b); }
bool equivalent_123(const ChordSeq& a, const ChordSeq& b) { return reduce_123(a) == reduce_123(b); }

int Splicing::row_jumps(int j) const {
    return static_cast<int>(std::count(occ[j].begin(), occ[j].end(), char(1)));
}

Splicing empty_splicing(int rows) {
    Splicing s;
    s.occ.assign(static_cast<size_t>(rows), {});
    return s;
}

bool splices(const Splicing& s, const ChordSeqSet& rho) {
    if (s.rows() != static_cast<int>(rho.size())) return false;
    int m = s.cols();
    for (int j = 0; j < s.rows(); ++j) {
        if (static_cast<int>(s.occ[j].size()) != m) return false;
        if (s.row_jumps(j) != jump_count(rho[j])) return false;
    }
    for (int i = 0; i < m; ++i) {
        bool hit = false;
        for (int j = 0; j < s.rows(); ++j) hit = hit || s.cell(j, i);
        if (!hit) return false;
    }
    return true;
}

int col(const Splicing& s) {
    int out = 0;
    for (int i = 0; i < s.cols(); ++i) {
        int occupants = 0;
        for (int j = 0; j < s.rows(); ++j) occupants += s.cell(j, i) ? 1 : 0;
        if (occupants > 1) ++out;
    }
    return out;
}

bool is_interleaving(const Splicing& s) { return col(s) == 0; }

ChordSeqSet star(const ChordSeqSet& a, const ChordSeqSet& b) {
    if (a.size() != b.size()) throw ValidationError("star: mismatched boundary count");
    ChordSeqSet out = a;
    for (size_t j = 0; j < a.size(); ++j) out[j].insert(out[j].end(), b[j].begin(), b[j].end());
    return out;
}

Splicing star(const Splicing& a, const Splicing& b) {
    if (a.rows() != b.rows()) throw ValidationError("star: mismatched boundary count");
    Splicing out = a;
    for (int j = 0; j < a.rows(); ++j)
        out.occ[j].insert(out.occ[j].end(), b.occ[j].begin(), b.occ[j].end());
    return out;
}

namespace {
// Sorted c-subsets of {0..m-1} in lexicographic order.
void subsets(int m, int c, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    auto rec = [&](auto&& self, int from) -> void {
        if (static_cast<int>(cur.size()) == c) {
            out.push_back(cur);
            return;
        }
        for (int v = from; v <= m - (c - static_cast<int>(cur.size())); ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}
}  // namespace

std::vector<Splicing> enumerate_splicings(const ChordSeqSet& rho, int m) {
    int h = static_cast<int>(rho.size());
    if (m < 0) return {};
    std::vector<std::vector<std::vector<int>>> choices(static_cast<size_t>(h));
    for (int j = 0; j < h; ++j) {
        subsets(m, jump_count(rho[j]), choices[j]);
        if (choices[j].empty()) return {};  // more jumps than columns
    }

    std::vector<Splicing> out;
    std::vector<int> pick(static_cast<size_t>(h), 0);
    while (true) {
        Splicing s;
        s.occ.assign(static_cast<size_t>(h), std::vector<char>(static_cast<size_t>(m), 0));
        for (int j = 0; j < h; ++j)
            for (int c : choices[j][static_cast<size_t>(pick[j])]) s.occ[j][static_cast<size_t>(c)] = 1;
        bool covered = true;
        for (int i = 0; i < m && covered; ++i) {
            bool hit = false;
            for (int j = 0; j < h; ++j) hit = hit || s.cell(j, i);
            covered = hit;
        }
        if (covered) out.push_back(std::move(s));

        int j = h - 1;
        while (j >= 0 && pick[j] + 1 == static_cast<int>(choices[j].size())) pick[j--] = 0;
        if (j < 0) break;
        ++pick[j];
    }
    return out;
}

std::vector<Splicing> enumerate_interleavings(const ChordSeqSet& rho) {
    std::vector<Splicing> out;
    for (auto& s : enumerate_splicings(rho, total_jumps(rho)))
        if (is_interleaving(s)) out.push_back(std::move(s));
    return out;
}

Gen occupant(const Splicing& s, const ChordSeqSet& rho, int j, int i) {
    if (!s.cell(j, i)) throw ValidationError("occupant: empty cell");
    int ordinal = 0;
    for (int c = 0; c < i; ++c) ordinal += s.cell(j, c) ? 1 : 0;
    auto jp = jump_positions(rho[static_cast<size_t>(j)]);
    return rho[static_cast<size_t>(j)][static_cast<size_t>(jp[static_cast<size_t>(ordinal)])];
}

std::vector<IdemTuple> idempotents_of(const Splicing& s, const ChordSeqSet& rho) {
    if (!splices(s, rho)) throw ValidationError("idempotents_of: splicing does not match sequences");
    int h = s.rows(), m = s.cols();
    std::vector<IdemTuple> iota(static_cast<size_t>(m) + 1, IdemTuple(static_cast<size_t>(h), Idem::M));
    for (int j = 0; j < h; ++j) {
        const ChordSeq& row = rho[static_cast<size_t>(j)];
        auto jp = jump_positions(row);
        Idem head = Idem::M;
        if (!jp.empty())
            head = torus::start_idem(row[static_cast<size_t>(jp[0])]);
        else if (!row.empty())
            head = torus::start_idem(row[0]);
        int seen = 0;
        Idem cur = head;
        for (int i = 0; i <= m; ++i) {
            if (i > 0 && s.cell(j, i - 1)) {
                cur = torus::end_idem(row[static_cast<size_t>(jp[static_cast<size_t>(seen)])]);
                ++seen;
            }
            iota[static_cast<size_t>(i)][static_cast<size_t>(j)] = cur;
        }
    }
    return iota;
}

Splicing splicing_from(const ChordSeqSet& rho, const std::vector<IdemTuple>& iota) {
    int h = static_cast<int>(rho.size());
    if (iota.empty()) throw ValidationError("splicing_from: empty idempotent sequence");
    int m = static_cast<int>(iota.size()) - 1;
    Splicing s;
    s.occ.assign(static_cast<size_t>(h), std::vector<char>(static_cast<size_t>(m), 0));
    for (int j = 0; j < h; ++j) {
        int changes = 0;
        for (int i = 1; i <= m; ++i) {
            if (static_cast<int>(iota[static_cast<size_t>(i)].size()) != h ||
                static_cast<int>(iota[static_cast<size_t>(i - 1)].size()) != h)
                throw ValidationError("splicing_from: tuple width mismatch");
            if (iota[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                iota[static_cast<size_t>(i - 1)][static_cast<size_t>(j)]) {
                s.occ[static_cast<size_t>(j)][static_cast<size_t>(i - 1)] = 1;
                ++changes;
            }
        }
        if (changes != jump_count(rho[static_cast<size_t>(j)]))
            throw ValidationError("splicing_from: boundary " + std::to_string(j + 1) + " has " +
                                  std::to_string(changes) + " idempotent changes for " +
                                  std::to_string(jump_count(rho[static_cast<size_t>(j)])) + " jumping chords");
    }
    for (int i = 0; i < m; ++i) {
        bool hit = false;
        for (int j = 0; j < h; ++j) hit = hit || s.cell(j, i);
        if (!hit) throw ValidationError("splicing_from: column " + std::to_string(i + 1) + " is empty");
    }
    return s;
}

namespace {
// Column (0-based) of the ordinal-th jump of row j, or -1.
int column_of_jump(const Splicing& s, int j, int ordinal) {
    int seen = 0;
    for (int i = 0; i < s.cols(); ++i)
        if (s.cell(j, i)) {
            if (seen == ordinal) return i;
            ++seen;
        }
    return -1;
}
}  // namespace

std::optional<CompatCase> compatible(const ChordSeqSet& rho, const Splicing& s, int i, int j) {
    if (!is_interleaving(s)) throw ValidationError("compatible: splicing is not interleaved");
    const ChordSeq& row = rho[static_cast<size_t>(j)];
    if (i < 0 || i + 1 >= static_cast<int>(row.size())) throw ValidationError("compatible: index out of range");
    Gen a = row[static_cast<size_t>(i)], b = row[static_cast<size_t>(i + 1)];
    auto p = torus::mul_gen(a, b);
    if (!p) return CompatCase::ZeroProduct;
    bool ja = is_jumping(a), jb = is_jumping(b);
    if (ja != jb) return CompatCase::OneJumping;
    if (!ja) return std::nullopt;  // nonzero product of two non-jumping chords: no case applies
    auto jp = jump_positions(row);
    int orda = static_cast<int>(std::lower_bound(jp.begin(), jp.end(), i) - jp.begin());
    int ca = column_of_jump(s, j, orda);
    int cb = column_of_jump(s, j, orda + 1);
    if (cb == ca + 1) return CompatCase::TwoJumpingConsecutive;
    return std::nullopt;
}

std::pair<ChordSeqSet, Splicing> compose_at(const ChordSeqSet& rho, const Splicing& s, int i, int j) {
    auto cc = compatible(rho, s, i, j);
    if (!cc || *cc == CompatCase::ZeroProduct)
        throw ValidationError("compose_at: pair is not composable under the splicing");
    const ChordSeq& row = rho[static_cast<size_t>(j)];
    Gen a = row[static_cast<size_t>(i)], b = row[static_cast<size_t>(i + 1)];
    Gen prod = *torus::mul_gen(a, b);

    ChordSeqSet nrho = rho;
    nrho[static_cast<size_t>(j)].erase(nrho[static_cast<size_t>(j)].begin() + i + 1);
    nrho[static_cast<size_t>(j)][static_cast<size_t>(i)] = prod;

    auto jp = jump_positions(row);
    Splicing ns = s;
    if (*cc == CompatCase::OneJumping) {
        if (is_jumping(prod)) return {nrho, ns};  // occupant changes, occupancy does not
        int jumper = is_jumping(a) ? i : i + 1;
        int ord = static_cast<int>(std::lower_bound(jp.begin(), jp.end(), jumper) - jp.begin());
        int c = column_of_jump(s, j, ord);
        ns.occ[static_cast<size_t>(j)][static_cast<size_t>(c)] = 0;
        bool hit = false;
        for (int r = 0; r < ns.rows(); ++r) hit = hit || ns.cell(r, c);
        if (!hit) throw ValidationError("compose_at: composition empties a column");
        return {nrho, ns};
    }
    int orda = static_cast<int>(std::lower_bound(jp.begin(), jp.end(), i) - jp.begin());
    int ca = column_of_jump(s, j, orda);
    for (int r = 0; r < ns.rows(); ++r)
        ns.occ[static_cast<size_t>(r)].erase(ns.occ[static_cast<size_t>(r)].begin() + ca,
                                             ns.occ[static_cast<size_t>(r)].begin() + ca + 2);
    return {nrho, ns};
}

bool collidable(const Splicing& s, int k) {
    if (!is_interleaving(s)) throw ValidationError("collidable: splicing is not interleaved");
    if (k < 0 || k + 1 >= s.cols()) return false;
    for (int j = 0; j < s.rows(); ++j)
        if (s.cell(j, k) && s.cell(j, k + 1)) return false;
    return true;
}

Splicing collide(const Splicing& s, int k) {
    if (!collidable(s, k)) throw ValidationError("collide: index is not collidable");
    Splicing out = s;
    for (int j = 0; j < s.rows(); ++j) {
        out.occ[static_cast<size_t>(j)][static_cast<size_t>(k)] =
            s.cell(j, k) || s.cell(j, k + 1) ? 1 : 0;
        out.occ[static_cast<size_t>(j)].erase(out.occ[static_cast<size_t>(j)].begin() + k + 1);
    }
    return out;
}

namespace {
// Admissible row cut positions given that the prefix holds t_j jumps.
std::pair<int, int> cut_range(const ChordSeq& row, const std::vector<int>& jp, int t) {
    int lo = (t == 0) ? 0 : jp[static_cast<size_t>(t - 1)] + 1;
    int hi = (t == static_cast<int>(jp.size())) ? static_cast<int>(row.size()) : jp[static_cast<size_t>(t)];
    return {lo, hi};
}

Splicing take_cols(const Splicing& s, int from, int to) {
    Splicing out;
    out.occ.reserve(static_cast<size_t>(s.rows()));
    for (int j = 0; j < s.rows(); ++j)
        out.occ.emplace_back(s.occ[static_cast<size_t>(j)].begin() + from,
                             s.occ[static_cast<size_t>(j)].begin() + to);
    return out;
}
}  // namespace

std::vector<Split> enumerate_splits(const ChordSeqSet& rho, const Splicing& s) {
    int h = static_cast<int>(rho.size()), m = s.cols();
    std::vector<Split> out;
    std::vector<std::vector<int>> jp(static_cast<size_t>(h));
    for (int j = 0; j < h; ++j) jp[static_cast<size_t>(j)] = jump_positions(rho[static_cast<size_t>(j)]);

    for (int c = 0; c <= m; ++c) {
        std::vector<std::pair<int, int>> range(static_cast<size_t>(h));
        for (int j = 0; j < h; ++j) {
            int t = 0;
            for (int i = 0; i < c; ++i) t += s.cell(j, i) ? 1 : 0;
            range[static_cast<size_t>(j)] = cut_range(rho[static_cast<size_t>(j)], jp[static_cast<size_t>(j)], t);
        }
        std::vector<int> cut(static_cast<size_t>(h));
        for (int j = 0; j < h; ++j) cut[static_cast<size_t>(j)] = range[static_cast<size_t>(j)].first;
        while (true) {
            Split sp;
            sp.col_cut = c;
            sp.cut = cut;
            sp.lambda.resize(static_cast<size_t>(h));
            sp.delta.resize(static_cast<size_t>(h));
            for (int j = 0; j < h; ++j) {
                const auto& row = rho[static_cast<size_t>(j)];
                sp.lambda[static_cast<size_t>(j)].assign(row.begin(), row.begin() + cut[static_cast<size_t>(j)]);
                sp.delta[static_cast<size_t>(j)].assign(row.begin() + cut[static_cast<size_t>(j)], row.end());
            }
            sp.sigma1 = take_cols(s, 0, c);
            sp.sigma2 = take_cols(s, c, m);
            out.push_back(std::move(sp));

            int j = h - 1;
            while (j >= 0 && cut[static_cast<size_t>(j)] == range[static_cast<size_t>(j)].second) {
                cut[static_cast<size_t>(j)] = range[static_cast<size_t>(j)].first;
                --j;
            }
            if (j < 0) break;
            ++cut[static_cast<size_t>(j)];
        }
    }
    return out;
}

std::vector<Shipping> enumerate_shippings(const ChordSeqSet& rho, const Splicing& s, int k) {
    if (!is_interleaving(s)) throw ValidationError("enumerate_shippings: splicing is not interleaved");
    int h = static_cast<int>(rho.size()), m = s.cols();
    std::vector<Shipping> out;
    if (k == 0) {
        Shipping sh;
        sh.boat_rho = rho;
        sh.anchor_rho.assign(static_cast<size_t>(h), {});
        sh.boat_sigma = s;
        sh.anchor_sigma = empty_splicing(h);
        sh.k = 0;
        sh.cut.resize(static_cast<size_t>(h));
        for (int j = 0; j < h; ++j) sh.cut[static_cast<size_t>(j)] = static_cast<int>(rho[static_cast<size_t>(j)].size());
        out.push_back(std::move(sh));
        return out;
    }
    if (k > m) return out;
    int c = m - k;
    std::vector<std::vector<int>> jp(static_cast<size_t>(h));
    std::vector<std::pair<int, int>> range(static_cast<size_t>(h));
    std::vector<int> t(static_cast<size_t>(h));
    for (int j = 0; j < h; ++j) {
        jp[static_cast<size_t>(j)] = jump_positions(rho[static_cast<size_t>(j)]);
        int tj = 0;
        for (int i = 0; i < c; ++i) tj += s.cell(j, i) ? 1 : 0;
        t[static_cast<size_t>(j)] = tj;
        range[static_cast<size_t>(j)] = cut_range(rho[static_cast<size_t>(j)], jp[static_cast<size_t>(j)], tj);
    }
    std::vector<int> cut(static_cast<size_t>(h));
    for (int j = 0; j < h; ++j) cut[static_cast<size_t>(j)] = range[static_cast<size_t>(j)].first;
    while (true) {
        bool anchored = false;
        for (int j = 0; j < h && !anchored; ++j) {
            const auto& row = rho[static_cast<size_t>(j)];
            int sj = cut[static_cast<size_t>(j)];
            anchored = sj < static_cast<int>(row.size()) && is_jumping(row[static_cast<size_t>(sj)]);
        }
        if (anchored) {
            Shipping sh;
            sh.k = k;
            sh.cut = cut;
            sh.boat_rho.resize(static_cast<size_t>(h));
            sh.anchor_rho.resize(static_cast<size_t>(h));
            for (int j = 0; j < h; ++j) {
                const auto& row = rho[static_cast<size_t>(j)];
                sh.boat_rho[static_cast<size_t>(j)].assign(row.begin(), row.begin() + cut[static_cast<size_t>(j)]);
                sh.anchor_rho[static_cast<size_t>(j)].assign(row.begin() + cut[static_cast<size_t>(j)], row.end());
            }
            sh.boat_sigma = take_cols(s, 0, c);
            sh.anchor_sigma = take_cols(s, c, m);
            out.push_back(std::move(sh));
        }
        int j = h - 1;
        while (j >= 0 && cut[static_cast<size_t>(j)] == range[static_cast<size_t>(j)].second) {
            cut[static_cast<size_t>(j)] = range[static_cast<size_t>(j)].first;
            --j;
        }
        if (j < 0) break;
        ++cut[static_cast<size_t>(j)];
    }
    return out;
}

bool splays(const Shipping& lower, const Shipping& higher) {
    if (higher.k != lower.k + 1) return false;
    return star(lower.boat_rho, lower.anchor_rho) == star(higher.boat_rho, higher.anchor_rho) &&
           star(lower.boat_sigma, lower.anchor_sigma) == star(higher.boat_sigma, higher.anchor_sigma);
}

namespace {
std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}
}  // namespace

std::string format_seq(const ChordSeq& s) {
    if (s.empty()) return "-";
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ".";
        out += torus::name(s[i]);
    }
    return out;
}

std::string format_seqset(const ChordSeqSet& rho) {
    std::string out;
    for (size_t j = 0; j < rho.size(); ++j) {
        if (j) out += " | ";
        out += format_seq(rho[j]);
    }
    return out;
}

ChordSeq parse_seq(std::string_view text) {
    text = trim(text);
    ChordSeq out;
    if (text.empty() || text == "-") return out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t dot = text.find('.', pos);
        std::string_view tok = trim(text.substr(pos, dot == std::string_view::npos ? dot : dot - pos));
        auto g = torus::parse_gen(tok);
        if (!g || !torus::is_chord(*g)) throw ParseError("unknown chord '" + std::string(tok) + "'");
        out.push_back(*g);
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return out;
}

ChordSeqSet parse_seqset(std::string_view text) {
    ChordSeqSet out;
    size_t pos = 0;
    while (true) {
        size_t bar = text.find('|', pos);
        out.push_back(parse_seq(text.substr(pos, bar == std::string_view::npos ? bar : bar - pos)));
        if (bar == std::string_view::npos) break;
        pos = bar + 1;
    }
    return out;
}

std::string format_splicing(const Splicing& s) {
    if (s.cols() == 0) return "-";
    std::string out;
    for (int i = 0; i < s.cols(); ++i) {
        out += "[";
        bool first = true;
        for (int j = 0; j < s.rows(); ++j) {
            if (!s.cell(j, i)) continue;
            if (!first) out += ".";
            out += std::to_string(j + 1);
            first = false;
        }
        out += "]";
    }
    return out;
}

Splicing parse_splicing(std::string_view text, int rows) {
    text = trim(text);
    Splicing s = empty_splicing(rows);
    if (text.empty() || text == "-") return s;
    size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] != '[') throw ParseError("splicing: expected '['");
        size_t close = text.find(']', pos);
        if (close == std::string_view::npos) throw ParseError("splicing: unterminated column");
        std::string_view body = text.substr(pos + 1, close - pos - 1);
        std::vector<int> occupants;
        size_t b = 0;
        while (b <= body.size() && !body.empty()) {
            size_t dot = body.find('.', b);
            std::string_view tok = trim(body.substr(b, dot == std::string_view::npos ? dot : dot - b));
            int j = 0;
            for (char ch : tok) {
                if (ch < '0' || ch > '9') throw ParseError("splicing: bad row index '" + std::string(tok) + "'");
                j = j * 10 + (ch - '0');
            }
            if (tok.empty() || j < 1 || j > rows) throw ParseError("splicing: row index out of range");
            occupants.push_back(j - 1);
            if (dot == std::string_view::npos) break;
            b = dot + 1;
        }
        if (occupants.empty()) throw ParseError("splicing: empty column");
        for (int j = 0; j < rows; ++j) s.occ[static_cast<size_t>(j)].push_back(0);
        for (int j : occupants) s.occ[static_cast<size_t>(j)].back() = 1;
        pos = close + 1;
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }
    return s;
}

std::string format_idem_tuples(const std::vector<IdemTuple>& iota) {
    std::string out;
    for (size_t i = 0; i < iota.size(); ++i) {
        if (i) out += " ";
        out += "(";
        for (size_t j = 0; j < iota[i].size(); ++j) {
            if (j) out += ",";
            out += torus::str(iota[i][j]);
        }
        out += ")";
    }
    return out;
}

}  // namespace polycalc::splice
