#include "polycalc/splaying.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/rational.hpp>

#include "polycalc/errors.hpp"

namespace polycalc::splaying {

using diag::Curve;
using diag::CurveKind;
using diag::Diagram;
using diag::Domain;
using diag::Generator;
using diag::Point;
using diag::Region;

namespace {

using Rat = boost::rational<long long>;

// The tube chart reads the surface orientation the way the basic quadrants
// do; the corridor chart is reached from the other side of the handle circles
// and is mirrored.
constexpr bool kTubeMirror = false;
constexpr bool kCorridorMirror = true;

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

long long parse_ll(const std::string& s, int line) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected integer, got '" + s + "'");
    }
}

std::string tiered(const std::string& base, int tier) {
    return tier == 0 ? base : base + '~' + std::to_string(tier);
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// copy names are "<base>~<tier>"; anything else counts as tier 0
std::pair<std::string, int> split_tier(const std::string& id) {
    auto pos = id.rfind('~');
    if (pos == std::string::npos) return {id, 0};
    std::string tail = id.substr(pos + 1);
    if (!all_digits(tail)) return {id, 0};
    return {id.substr(0, pos), (int)std::stoll(tail)};
}

struct EName {
    int j, a, b;
};

std::optional<EName> parse_epoint(const std::string& id) {
    if (id.size() < 2 || id[0] != 'e') return std::nullopt;
    auto colon = id.find(':');
    auto dot = id.find('.', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || dot == std::string::npos) return std::nullopt;
    std::string j = id.substr(1, colon - 1);
    std::string a = id.substr(colon + 1, dot - colon - 1);
    std::string b = id.substr(dot + 1);
    if (!all_digits(j) || !all_digits(a) || !all_digits(b)) return std::nullopt;
    return EName{(int)std::stoll(j), (int)std::stoll(a), (int)std::stoll(b)};
}

struct ThName {
    bool plus;
    std::string fam;
    int a, b;
};

std::optional<ThName> parse_theta(const std::string& id) {
    if (id.size() < 4 || id.compare(0, 2, "th") != 0) return std::nullopt;
    if (id[2] != '+' && id[2] != '-') return std::nullopt;
    auto colon = id.rfind(':');
    auto dot = id.rfind('.');
    if (colon == std::string::npos || dot == std::string::npos || dot < colon)
        return std::nullopt;
    std::string a = id.substr(colon + 1, dot - colon - 1);
    std::string b = id.substr(dot + 1);
    if (!all_digits(a) || !all_digits(b)) return std::nullopt;
    return ThName{id[2] == '+', id.substr(3, colon - 3), (int)std::stoll(a),
                  (int)std::stoll(b)};
}

struct RingName {
    int j;
    char type;
    int tier;
};

std::optional<RingName> parse_ring(const std::string& id) {
    if (id.size() < 4 || id[0] != 'H') return std::nullopt;
    size_t i = 1;
    while (i < id.size() && std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
    if (i == 1 || i + 1 >= id.size()) return std::nullopt;
    char type = id[i];
    if ((type != 'm' && type != 'l') || id[i + 1] != '~') return std::nullopt;
    std::string tail = id.substr(i + 2);
    if (!all_digits(tail)) return std::nullopt;
    return RingName{(int)std::stoll(id.substr(1, i - 1)), type, (int)std::stoll(tail)};
}

std::optional<int> parse_xh(const std::string& base) {
    if (base.size() < 3 || base.compare(0, 2, "xH") != 0) return std::nullopt;
    std::string tail = base.substr(2);
    if (!all_digits(tail)) return std::nullopt;
    return (int)std::stoll(tail);
}

// ---------------------------------------------------------------------------
// stabilisation model

struct StepCtx {
    const Point* p = nullptr;
    bool mirror = false;  // exit slot 1
    std::string outer_w, outer_e, far_w, far_e;
};

struct BandCtx {
    std::string curve;
    std::vector<StepCtx> steps;
};

struct PairCtx {
    const StabPair* sp = nullptr;
    std::string region;
};

struct Model {
    const Diagram* basic = nullptr;
    std::vector<std::string> rows;
    std::vector<PairCtx> pairs;
    std::vector<BandCtx> bands;
    std::vector<std::string> betas;
};

bool reserved_id(const std::string& id) {
    return id.find('~') != std::string::npos || id.find(':') != std::string::npos;
}

Model analyze(const Diagram& basic, const StabData& st,
              const std::vector<std::string>& rows, bool allow_twist) {
    if (basic.is_bordered()) throw ValidationError("basic diagram must be closed");
    if (basic.system_count() != 2)
        throw ValidationError("basic diagram needs exactly two curve systems");
    for (const auto& c : basic.curves)
        if (reserved_id(c.id))
            throw ValidationError("id '" + c.id + "' uses a reserved character");
    for (const auto& p : basic.points)
        if (reserved_id(p.id))
            throw ValidationError("id '" + p.id + "' uses a reserved character");
    for (const auto& r : basic.regions)
        if (reserved_id(r.id))
            throw ValidationError("id '" + r.id + "' uses a reserved character");
    for (const auto& z : basic.basepoints)
        if (reserved_id(z.id))
            throw ValidationError("id '" + z.id + "' uses a reserved character");

    Model M;
    M.basic = &basic;
    M.rows = rows;

    int h = (int)st.pairs.size();
    if (h == 0) throw ValidationError("stabilisation needs at least one pair");
    if (basic.boundaries != h)
        throw ValidationError("basic diagram marks " + std::to_string(basic.boundaries) +
                              " components but stabilisation provides " +
                              std::to_string(h) + " pairs");

    std::set<std::string> bp_ids;
    for (const auto& z : basic.basepoints) bp_ids.insert(z.id);

    std::set<std::string> pair_ids, used;
    std::set<std::string> hosts;
    for (const auto& sp : st.pairs) {
        if (!pair_ids.insert(sp.id).second)
            throw ValidationError("duplicate pair id '" + sp.id + "'");
        for (const std::string* q : {&sp.w, &sp.z}) {
            if (!bp_ids.count(*q))
                throw ValidationError("pair '" + sp.id + "' references unknown basepoint '" +
                                      *q + "'");
            if (!used.insert(*q).second)
                throw ValidationError("basepoint '" + *q + "' belongs to two pairs");
        }
        if (sp.twist != 0 && !allow_twist)
            throw ValidationError("twisted splaying not supported");
        const Region* host = nullptr;
        for (const auto& r : basic.regions) {
            bool has_w = std::count(r.basepoints.begin(), r.basepoints.end(), sp.w) > 0;
            bool has_z = std::count(r.basepoints.begin(), r.basepoints.end(), sp.z) > 0;
            if (has_w && has_z) host = &r;
        }
        if (!host)
            throw ValidationError("pair '" + sp.id + "' needs both basepoints in one region");
        if (!hosts.insert(host->id).second)
            throw ValidationError("region '" + host->id + "' hosts two pairs");
        M.pairs.push_back({&sp, host->id});
    }
    if (used.size() != bp_ids.size())
        throw ValidationError("every basepoint must belong to a pair");

    for (const auto& w : rows) {
        if ((int)w.size() != h)
            throw ValidationError("iota row '" + w + "' wants one letter per pair");
        for (char c : w)
            if (c != 'm' && c != 'l')
                throw ValidationError("iota row '" + w + "' uses letters m,l only");
    }

    for (int ci : basic.system_curves(1)) M.betas.push_back(basic.curves[ci].id);

    std::map<std::string, const CurveOrder*> orders;
    for (const auto& o : st.orders)
        if (!orders.emplace(o.curve, &o).second)
            throw ValidationError("duplicate traversal for curve '" + o.curve + "'");
    for (const auto& o : st.orders) {
        const Curve& c = basic.curve(o.curve);
        if (c.system != 0)
            throw ValidationError("traversal curve '" + o.curve + "' is not in system 0");
    }

    for (int ci : basic.system_curves(0)) {
        const Curve& c = basic.curves[ci];
        auto it = orders.find(c.id);
        if (it == orders.end())
            throw ValidationError("missing traversal for curve '" + c.id + "'");
        const CurveOrder& o = *it->second;
        if (o.steps.empty())
            throw ValidationError("curve '" + c.id +
                                  "' needs at least one crossing in traversal data");
        std::set<std::string> on_curve;
        for (const auto& p : basic.points)
            if (p.curve_a == c.id) on_curve.insert(p.id);
        BandCtx band{c.id, {}};
        std::set<std::string> seen;
        for (const auto& [pid, slot] : o.steps) {
            if (!on_curve.count(pid))
                throw ValidationError("traversal of curve '" + c.id +
                                      "' lists foreign crossing '" + pid + "'");
            if (!seen.insert(pid).second)
                throw ValidationError("traversal of curve '" + c.id +
                                      "' repeats crossing '" + pid + "'");
            if (slot != 1 && slot != 3) throw ValidationError("exit slot must be 1 or 3");
            StepCtx sc;
            sc.p = &basic.point(pid);
            sc.mirror = slot == 1;
            const auto& q = sc.p->quad;
            if (!sc.mirror) {
                sc.outer_w = q[1];
                sc.outer_e = q[0];
                sc.far_w = q[2];
                sc.far_e = q[3];
            } else {
                sc.outer_w = q[0];
                sc.outer_e = q[1];
                sc.far_w = q[3];
                sc.far_e = q[2];
            }
            band.steps.push_back(sc);
        }
        if (seen.size() != on_curve.size())
            throw ValidationError("traversal of curve '" + c.id +
                                  "' must list each crossing exactly once");
        for (size_t t = 0; t < band.steps.size(); ++t) {
            const StepCtx& a = band.steps[t];
            const StepCtx& b = band.steps[(t + 1) % band.steps.size()];
            if (a.outer_e != b.outer_w || a.far_e != b.far_w)
                throw ValidationError("curve '" + c.id + "': copy side breaks between '" +
                                      a.p->id + "' and '" + b.p->id + "'");
        }
        M.bands.push_back(std::move(band));
    }
    return M;
}

// ---------------------------------------------------------------------------
// face builder

struct Builder {
    std::vector<std::string> key;
    std::vector<long long> chi;
    std::map<std::string, int> index;
    std::vector<int> uf;
    std::vector<std::pair<int, int>> edges;
    struct Pt {
        std::string id, ca, cb;
        std::array<int, 4> q;
    };
    std::vector<Pt> pts;
    std::vector<std::pair<int, std::string>> bps;
    std::vector<std::tuple<int, int, int>> arcs;  // face, boundary, interval
    std::map<std::string, int> fragn;

    int face(const std::string& k, long long c = 1) {
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        int f = (int)key.size();
        key.push_back(k);
        chi.push_back(c);
        uf.push_back(f);
        index.emplace(k, f);
        return f;
    }
    std::string next_key(const std::string& zone) {
        return zone + ':' + std::to_string(fragn[zone]++);
    }
    int fresh(const std::string& zone) { return face(next_key(zone)); }
    int find(int a) {
        while (uf[a] != a) a = uf[a] = uf[uf[a]];
        return a;
    }
    void weld(int a, int b) {
        edges.push_back({a, b});
        uf[find(a)] = find(b);
    }
    // renames a face; a key collision closes the zone by welding instead
    void rekey(int f, const std::string& nk) {
        auto it = index.find(nk);
        if (it != index.end()) {
            if (it->second != f) weld(f, it->second);
            return;
        }
        index.erase(key[f]);
        key[f] = nk;
        index.emplace(nk, f);
    }
    void point(const std::string& id, const std::string& ca, const std::string& cb,
               std::array<int, 4> q) {
        pts.push_back({id, ca, cb, q});
    }
    void basepoint(int f, const std::string& id) { bps.push_back({f, id}); }
    void interval(int f, int j, int t) { arcs.push_back({f, j, t}); }
};

// faces around a crossing of a horizontal strand by a vertical feature;
// a/b flank the strand, W/E run along it
std::array<int, 4> transversal_quads(int aw, int ae, int bw, int be, bool mirror,
                                     bool horizontal_lower) {
    if (!horizontal_lower)
        return mirror ? std::array<int, 4>{ae, be, bw, aw}
                      : std::array<int, 4>{aw, bw, be, ae};
    return mirror ? std::array<int, 4>{aw, ae, be, bw}
                  : std::array<int, 4>{ae, aw, bw, be};
}

// faces around one swap inside a window; the dipper is the strand diving
// from the upper position
std::array<int, 4> swap_quads(int n, int w, int s, int e, bool mirror,
                              bool dipper_lower) {
    if (!mirror)
        return dipper_lower ? std::array<int, 4>{w, s, e, n}
                            : std::array<int, 4>{s, e, n, w};
    return dipper_lower ? std::array<int, 4>{n, e, s, w}
                        : std::array<int, 4>{e, s, w, n};
}

struct Strand {
    int tier;
    std::string curve;
};

// Full crossing pattern of parallel strands: every pair crosses twice, once
// on the way up and once back down.  theta_plus is the crossing whose
// between-faces sit at even slots, which the mirror flips.
void run_window(Builder& b, std::vector<int>& cur, const std::vector<Strand>& s,
                int below, int above, bool mirror, const std::string& fam,
                const std::string& wzone, const std::vector<std::string>& post) {
    int n = (int)s.size();
    std::vector<std::pair<int, int>> asc;
    for (int r = 0; r + 1 < n; ++r)
        for (int t = n - 2; t >= r; --t) asc.push_back({t, t + 1});
    std::vector<std::pair<int, int>> word = asc;
    word.insert(word.end(), asc.rbegin(), asc.rend());

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::map<std::pair<int, int>, int> seen;
    int k = 0;
    bool plus_second = !mirror;
    for (auto [t, u] : word) {
        int dip = perm[u], oth = perm[t];
        bool dl = s[dip].tier < s[oth].tier;
        int nf = u == n - 1 ? above : cur[u];
        int sf = t == 0 ? below : cur[t - 1];
        int wf = cur[t];
        int ef = b.face(wzone + ':' + std::to_string(k++));
        const Strand& lo = s[dip].tier < s[oth].tier ? s[dip] : s[oth];
        const Strand& hi = s[dip].tier < s[oth].tier ? s[oth] : s[dip];
        int cnt = ++seen[{lo.tier, hi.tier}];
        bool plus = (cnt == 2) == plus_second;
        std::string id = std::string(plus ? "th+" : "th-") + fam + ':' +
                         std::to_string(lo.tier) + '.' + std::to_string(hi.tier);
        b.point(id, lo.curve, hi.curve, swap_quads(nf, wf, sf, ef, mirror, dl));
        std::swap(perm[t], perm[u]);
        cur[t] = ef;
    }
    for (int g = 0; g + 1 < n; ++g) b.rekey(cur[g], post[g]);
}

void run_band(Builder& b, const BandCtx& band, int tiers, bool bordered) {
    std::vector<Strand> s;
    for (int r = bordered ? 0 : 1; r <= tiers; ++r) s.push_back({r, tiered(band.curve, r)});
    int ns = (int)s.size();
    auto zone = [&](int g) {
        return "~aS:" + band.curve + ':' + std::to_string(s[g].tier) + '.' +
               std::to_string(s[g + 1].tier);
    };
    int T = (int)band.steps.size();
    bool windowed = ns >= 2;
    std::string init_tag = windowed && T == 1 ? "@W" : '@' + band.steps[T - 1].p->id;
    std::vector<int> cur(std::max(0, ns - 1));
    for (int g = 0; g + 1 < ns; ++g) cur[g] = b.face(zone(g) + ':' + init_tag);
    for (int t = 0; t < T; ++t) {
        const StepCtx& st = band.steps[t];
        std::vector<int> east(cur.size());
        for (int g = 0; g + 1 < ns; ++g) east[g] = b.face(zone(g) + ":@" + st.p->id);
        for (int i = 0; i < ns; ++i) {
            int aw = i + 1 < ns ? cur[i] : b.face(st.outer_w);
            int ae = i + 1 < ns ? east[i] : b.face(st.outer_e);
            int bw = i > 0 ? cur[i - 1] : b.face(st.far_w);
            int be = i > 0 ? east[i - 1] : b.face(st.far_e);
            b.point(tiered(st.p->id, s[i].tier), st.p->curve_b, s[i].curve,
                    transversal_quads(aw, ae, bw, be, st.mirror, false));
        }
        cur = east;
        if (t == 0 && windowed) {
            std::vector<std::string> post(cur.size());
            for (int g = 0; g + 1 < ns; ++g) post[g] = zone(g) + ":@W";
            run_window(b, cur, s, b.face(st.far_e), b.face(st.outer_e), st.mirror,
                       band.curve, "~aW:" + band.curve, post);
        }
    }
}

// Boundary bite with a twisted handle: the longitude arc spirals |n| times
// over the beta curve before leaving, alternating over the north and south
// sides of the meridian arc.
void run_spiral(Builder& b, int j, long long n, int core, int P) {
    std::string J = std::to_string(j);
    long long a = n < 0 ? -n : n;
    long long kt = (a + 1) / 2, kb = a / 2;
    auto north = [&](long long i) {
        if (i == 0) return b.face("~MT" + J + ":n:0");
        if (i == kt + 1) return b.face("~MT" + J + ":n:e");
        return b.face("~MB" + J + ":n:" + std::to_string(i));
    };
    auto south = [&](long long i) {
        if (i == 0) return b.face("~MT" + J + ":s:0");
        if (i == kb + 1) return b.face("~MT" + J + ":s:e");
        return b.face("~MB" + J + ":s:" + std::to_string(i));
    };
    bool pos = n > 0;
    for (long long i = 1; i <= kt; ++i) {
        auto q = pos ? std::array<int, 4>{north(i), north(i - 1), north(i), north(i + 1)}
                     : std::array<int, 4>{north(i), north(i + 1), north(i), north(i - 1)};
        b.point("yH" + J + '~' + std::to_string(i), "bH" + J, "al" + J, q);
    }
    for (long long i = 1; i <= kb; ++i) {
        auto q = pos ? std::array<int, 4>{south(i), south(i + 1), south(i), south(i - 1)}
                     : std::array<int, 4>{south(i), south(i - 1), south(i), south(i + 1)};
        b.point("yH" + J + '~' + std::to_string(kt + i), "bH" + J, "al" + J, q);
    }
    auto q = pos ? std::array<int, 4>{north(0), south(0), south(1), north(1)}
                 : std::array<int, 4>{north(0), north(1), south(1), south(0)};
    b.point("xH" + J, "bH" + J, "am" + J, q);
    if (pos) {
        b.interval(north(1), j, 1);
        b.interval(north(0), j, 2);
        b.interval(south(1), j, 0);
        b.interval(south(0), j, 3);
        b.basepoint(south(1), "b" + J);
        b.weld(north(kt + 1), P);
        b.weld(north(kt), core);
        b.weld(south(kb + 1), P);
        b.weld(south(kb), core);
    } else {
        b.interval(north(0), j, 1);
        b.interval(north(1), j, 2);
        b.interval(south(0), j, 0);
        b.interval(south(1), j, 3);
        b.basepoint(south(0), "b" + J);
        b.weld(north(kt), P);
        b.weld(north(kt + 1), core);
        b.weld(south(kb), P);
        b.weld(south(kb + 1), core);
    }
}

void run_pair(Builder& b, const Model& M, int j, bool bordered) {
    const PairCtx& pc = M.pairs[j - 1];
    std::string J = std::to_string(j);
    int core = b.face(pc.region);
    int P = b.face("~MP" + J);
    int m = (int)M.rows.size();

    std::vector<int> mt, lt;
    for (int r = 1; r <= m; ++r)
        (M.rows[r - 1][j - 1] == 'm' ? mt : lt).push_back(r);

    std::vector<Strand> tracks;
    if (bordered) tracks.push_back({0, "am" + J});
    for (int r : mt) tracks.push_back({r, "H" + J + "m~" + std::to_string(r)});
    int nt = (int)tracks.size();
    bool split = nt > 0;

    if (pc.sp->twist != 0) {
        run_spiral(b, j, pc.sp->twist, core, P);
    } else {
        // tube sweep: parallel tracks crossed by the longitude rings, the
        // bite, the track window and finally the beta curve
        struct Ev {
            char kind;  // 'r' ring, 'b' bite, 'w' window, 'x' beta
            int tier;
        };
        std::vector<Ev> evs;
        for (auto it = lt.rbegin(); it != lt.rend(); ++it) evs.push_back({'r', *it});
        if (bordered) evs.push_back({'b', 0});
        if (nt >= 2) evs.push_back({'w', 0});
        evs.push_back({'x', 0});

        std::vector<std::string> collbl;
        for (const Ev& ev : evs) {
            if (ev.kind == 'r') collbl.push_back(std::to_string(ev.tier));
            else if (ev.kind == 'b') collbl.push_back("0");
            else if (ev.kind == 'x') collbl.push_back("e");
        }
        int C = (int)collbl.size();
        auto zoneN = [&](int g, const std::string& cl) {
            return "~aN" + J + ':' + std::to_string(tracks[g].tier) + '.' + cl;
        };

        int under = b.face("~MT" + J + ":n:" + collbl[0]);
        int over = split ? b.face("~MT" + J + ":s:" + collbl[0]) : under;
        std::vector<int> gaps(std::max(0, nt - 1));
        for (int g = 0; g + 1 < nt; ++g) gaps[g] = b.fresh(zoneN(g, collbl[0]));
        int under0 = under, over0 = over;
        std::vector<int> gaps0 = gaps;
        std::vector<int> col_under{under}, col_over{over};

        int ci = 0;
        for (const Ev& ev : evs) {
            if (ev.kind == 'w') {
                std::vector<std::string> post(gaps.size());
                for (size_t g = 0; g < gaps.size(); ++g)
                    post[g] = b.next_key(zoneN((int)g, collbl[ci]));
                run_window(b, gaps, tracks, under, over, kTubeMirror, "H" + J + "m",
                           "~aWm" + J, post);
                continue;
            }
            bool wrap = ci + 1 == C;
            std::string nl = collbl[(ci + 1) % C];
            int nunder, nover;
            std::vector<int> ngaps(gaps.size());
            if (wrap) {
                nunder = under0;
                nover = over0;
                ngaps = gaps0;
            } else {
                nunder = b.face("~MT" + J + ":n:" + nl);
                nover = split ? b.face("~MT" + J + ":s:" + nl) : nunder;
                for (int g = 0; g + 1 < nt; ++g) ngaps[g] = b.fresh(zoneN(g, nl));
                col_under.push_back(nunder);
                col_over.push_back(nover);
            }
            int first = ev.kind == 'b' ? 1 : 0;
            for (int i = first; i < nt; ++i) {
                int aw = i + 1 < nt ? gaps[i] : over;
                int ae = i + 1 < nt ? ngaps[i] : nover;
                int bw = i > 0 ? gaps[i - 1] : under;
                int be = i > 0 ? ngaps[i - 1] : nunder;
                std::string id, ca, cb;
                bool horizontal_lower = false;
                if (ev.kind == 'r') {
                    Strand v{ev.tier, "H" + J + "l~" + std::to_string(ev.tier)};
                    horizontal_lower = tracks[i].tier < v.tier;
                    id = "e" + J + ':' + std::to_string(tracks[i].tier) + '.' +
                         std::to_string(v.tier);
                    ca = horizontal_lower ? tracks[i].curve : v.curve;
                    cb = horizontal_lower ? v.curve : tracks[i].curve;
                } else if (ev.kind == 'b') {
                    id = "e" + J + ':' + std::to_string(tracks[i].tier) + ".0";
                    ca = "al" + J;
                    cb = tracks[i].curve;
                } else {
                    id = tiered("xH" + J, tracks[i].tier);
                    ca = "bH" + J;
                    cb = tracks[i].curve;
                }
                b.point(id, ca, cb,
                        transversal_quads(aw, ae, bw, be, kTubeMirror, horizontal_lower));
            }
            if (ev.kind == 'b') {
                b.interval(under, j, 2);
                b.interval(nunder, j, 1);
                int so = nt >= 2 ? gaps[0] : over;
                int sn = nt >= 2 ? ngaps[0] : nover;
                b.interval(so, j, 3);
                b.interval(sn, j, 0);
                b.basepoint(sn, "b" + J);
            }
            under = nunder;
            over = nover;
            gaps = ngaps;
            ++ci;
        }

        if (!bordered) {
            b.basepoint(under0, "wH" + J);
            b.basepoint(over0, "zH" + J);
        }

        // corridor: the longitude strands run between the two handle circles
        std::vector<Strand> cstr;
        if (bordered) cstr.push_back({0, "al" + J});
        for (int r : lt) cstr.push_back({r, "H" + J + "l~" + std::to_string(r)});
        int nc = (int)cstr.size();
        std::vector<int> chr, chl;
        if (nc == 0) {
            b.weld(P, core);
        } else if (nc >= 2) {
            std::vector<int> cg(nc - 1);
            std::vector<std::string> post(nc - 1);
            for (int g = 0; g + 1 < nc; ++g) {
                std::string zone = "~aL" + J + ':' + std::to_string(cstr[g].tier) + '.' +
                                   std::to_string(cstr[g + 1].tier);
                cg[g] = b.face(zone + ":0");
                post[g] = zone + ":1";
            }
            chr = cg;
            run_window(b, cg, cstr, P, core, kCorridorMirror, "H" + J + "l", "~aWl" + J,
                       post);
            chl = cg;
        }

        // circle identifications: tube columns west to east against the
        // corridor zones from the core side down to P
        if (C == 1) {
            b.weld(under0, P);
            b.weld(over0, P);
        } else {
            std::vector<int> hr{core}, hl{core};
            for (auto it = chr.rbegin(); it != chr.rend(); ++it) hr.push_back(*it);
            for (auto it = chl.rbegin(); it != chl.rend(); ++it) hl.push_back(*it);
            hr.push_back(P);
            hl.push_back(P);
            for (int i = 0; i < C; ++i) {
                b.weld(col_under[i], hr[i]);
                b.weld(col_over[i], hl[i]);
            }
        }
    }
}

struct Built {
    Diagram d;
    std::map<std::string, std::string> face_region;
};

Built construct(const Diagram& basic, const StabData& st,
                const std::vector<std::string>& rows, bool bordered, bool allow_twist) {
    Model M = analyze(basic, st, rows, allow_twist);
    int m = (int)rows.size();
    int h = (int)M.pairs.size();
    if (!bordered && m == 0)
        throw ValidationError("splaying needs at least one idempotent row");

    Builder b;
    std::set<std::string> host_ids;
    for (const auto& pc : M.pairs) host_ids.insert(pc.region);
    for (const auto& r : basic.regions)
        b.face(r.id, host_ids.count(r.id) ? r.chi - 1 : r.chi);

    for (const auto& band : M.bands) run_band(b, band, m, bordered);
    for (int j = 1; j <= h; ++j) run_pair(b, M, j, bordered);

    // assemble regions from the welded faces
    std::map<int, std::vector<int>> cls;
    for (int f = 0; f < (int)b.key.size(); ++f) cls[b.find(f)].push_back(f);
    std::map<int, std::string> cid;
    std::map<int, long long> cchi;
    for (auto& [root, mem] : cls) {
        std::string best = b.key[mem[0]];
        long long c = 0;
        for (int f : mem) {
            best = std::min(best, b.key[f]);
            c += b.chi[f];
        }
        cid[root] = best;
        cchi[root] = c;
    }
    for (auto& [x, y] : b.edges) --cchi[b.find(x)];

    std::map<int, long long> slots;
    for (const auto& p : b.pts)
        for (int q : p.q) ++slots[b.find(q)];

    std::map<int, std::vector<std::string>> rbps;
    for (auto& [f, id] : b.bps) rbps[b.find(f)].push_back(id);
    std::map<int, std::vector<std::pair<int, int>>> rarcs;
    for (auto& [f, j, t] : b.arcs) rarcs[b.find(f)].push_back({j, t});

    Built out;
    Diagram& d = out.d;
    d.genus = basic.genus + h;
    d.boundaries = h;

    for (const std::string& bid : M.betas) d.curves.push_back({bid, 0, CurveKind::Closed, 0});
    for (int j = 1; j <= h; ++j)
        d.curves.push_back({"bH" + std::to_string(j), 0, CurveKind::Closed, 0});
    int base = 1;
    if (bordered) {
        for (const auto& band : M.bands)
            d.curves.push_back({band.curve, 1, CurveKind::Closed, 0});
        for (int j = 1; j <= h; ++j) {
            d.curves.push_back({"am" + std::to_string(j), 1, CurveKind::ArcM, j});
            d.curves.push_back({"al" + std::to_string(j), 1, CurveKind::ArcL, j});
        }
        base = 2;
    }
    for (int r = 1; r <= m; ++r) {
        int sys = base + r - 1;
        for (const auto& band : M.bands)
            d.curves.push_back({tiered(band.curve, r), sys, CurveKind::Closed, 0});
        for (int j = 1; j <= h; ++j)
            d.curves.push_back({"H" + std::to_string(j) + rows[r - 1][j - 1] + '~' +
                                    std::to_string(r),
                                sys, CurveKind::Closed, 0});
    }

    for (const auto& p : b.pts) {
        Point np;
        np.id = p.id;
        np.curve_a = p.ca;
        np.curve_b = p.cb;
        for (int i = 0; i < 4; ++i) np.quad[i] = cid[b.find(p.q[i])];
        d.points.push_back(np);
    }

    std::vector<std::pair<std::string, int>> order;
    for (auto& [root, id] : cid) order.push_back({id, root});
    std::sort(order.begin(), order.end());
    for (auto& [id, root] : order) {
        Region r;
        r.id = id;
        r.chi = cchi[root];
        r.basepoints = rbps[root];
        std::sort(r.basepoints.begin(), r.basepoints.end());
        r.arcs = rarcs[root];
        std::sort(r.arcs.begin(), r.arcs.end());
        r.corners = slots[root] + 2 * (long long)r.arcs.size();
        d.regions.push_back(std::move(r));
    }

    if (bordered) {
        for (int j = 1; j <= h; ++j)
            d.basepoints.push_back({"b" + std::to_string(j), true, j});
    } else {
        for (int j = 1; j <= h; ++j) {
            d.basepoints.push_back({"wH" + std::to_string(j), false, 0});
            d.basepoints.push_back({"zH" + std::to_string(j), false, 0});
        }
    }

    d.finalize();
    for (auto& [k, f] : b.index) out.face_region[k] = cid[b.find(f)];
    return out;
}

// crossing balance required of a domain by a polygon sequence; mirrors the
// membership test for pi_2
std::vector<int> system_chain(const Diagram& d, const std::vector<Generator>& xs) {
    size_t n = xs.size();
    std::vector<std::pair<int, int>> pairs(n);
    for (size_t t = 0; t < n; ++t) {
        if (xs[t].points.empty()) throw ValidationError("empty generator in sequence");
        std::set<int> sys;
        for (const auto& pid : xs[t].points) {
            const Point& p = d.point(pid);
            sys.insert(d.curve(p.curve_a).system);
            sys.insert(d.curve(p.curve_b).system);
        }
        if (sys.size() != 2)
            throw ValidationError("generator '" + xs[t].name() + "' does not join two systems");
        pairs[t] = {*sys.begin(), *sys.rbegin()};
    }
    std::vector<std::vector<int>> valid;
    for (int start : {pairs[0].first, pairs[0].second}) {
        std::vector<int> s(n);
        s[0] = start;
        bool ok = true;
        for (size_t t = 0; t < n && ok; ++t) {
            int nxt = s[t] == pairs[t].first    ? pairs[t].second
                      : s[t] == pairs[t].second ? pairs[t].first
                                                : -1;
            if (nxt < 0) {
                ok = false;
                break;
            }
            if (t + 1 < n) {
                if (nxt != pairs[t + 1].first && nxt != pairs[t + 1].second) ok = false;
                s[t + 1] = nxt;
            } else if (nxt != s[0]) {
                ok = false;
            }
        }
        if (ok && (valid.empty() || valid.back() != s)) valid.push_back(s);
    }
    if (valid.empty()) throw ValidationError("generator sequence does not close up");
    if (valid.size() == 1) return valid[0];
    return valid[0][0] > valid[1][0] ? valid[0] : valid[1];
}

std::map<std::string, long long> required_of(const Diagram& d,
                                             const std::vector<Generator>& xs) {
    if (xs.size() < 2) throw ValidationError("sequence needs at least two generators");
    auto s = system_chain(d, xs);
    size_t n = xs.size();
    std::map<std::string, long long> required;
    for (size_t t = 0; t < n; ++t) {
        int sense = s[t] > s[(t + 1) % n] ? 1 : -1;
        for (const auto& pid : xs[t].points) required[pid] += sense;
    }
    return required;
}

// face key one tier down; nullopt marks zones that collapse with tier one
std::optional<std::string> transfer_key(const std::string& k, const std::string& row0) {
    if (k.empty() || k[0] != '~') return k;
    auto skip0 = [&](size_t j, char type) { return row0[j - 1] == type; };
    auto dec_label = [](const std::string& s,
                        bool drop0) -> std::optional<std::string> {
        if (s == "e") return s;
        long long v = std::stoll(s);
        if (v == 0) return drop0 ? std::nullopt : std::optional<std::string>(s);
        return std::to_string(v - 1);
    };
    auto dec_pair = [](int a, int b) -> std::optional<std::pair<int, int>> {
        if (a == 0 && b == 1) return std::nullopt;
        return std::pair<int, int>{a == 0 ? 0 : a - 1, b - 1};
    };
    std::vector<std::string> parts;
    {
        std::string cur;
        for (char c : k) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
    }
    const std::string& head = parts[0];
    if (head.rfind("~aW", 0) == 0 || head.rfind("~MB", 0) == 0) return std::nullopt;
    if (head.rfind("~MP", 0) == 0) return k;
    if (head.rfind("~MT", 0) == 0 && parts.size() == 3) {
        size_t j = std::stoull(head.substr(3));
        auto c = dec_label(parts[2], skip0(j, 'l'));
        if (!c) return std::nullopt;
        return head + ':' + parts[1] + ':' + *c;
    }
    if (head.rfind("~aN", 0) == 0 && parts.size() == 3) {
        size_t j = std::stoull(head.substr(3));
        auto dot = parts[1].find('.');
        auto r = dec_label(parts[1].substr(0, dot), skip0(j, 'm'));
        auto c = dec_label(parts[1].substr(dot + 1), skip0(j, 'l'));
        if (!r || !c) return std::nullopt;
        return head + ':' + *r + '.' + *c + ':' + parts[2];
    }
    if (head.rfind("~aL", 0) == 0 && parts.size() == 3) {
        auto dot = parts[1].find('.');
        auto p = dec_pair(std::stoi(parts[1].substr(0, dot)),
                          std::stoi(parts[1].substr(dot + 1)));
        if (!p) return std::nullopt;
        return head + ':' + std::to_string(p->first) + '.' + std::to_string(p->second) +
               ':' + parts[2];
    }
    if (head == "~aS" && parts.size() == 4) {
        auto dot = parts[2].find('.');
        auto p = dec_pair(std::stoi(parts[2].substr(0, dot)),
                          std::stoi(parts[2].substr(dot + 1)));
        if (!p) return std::nullopt;
        return head + ':' + parts[1] + ':' + std::to_string(p->first) + '.' +
               std::to_string(p->second) + ':' + parts[3];
    }
    return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// STAB text form

StabData parse_stab(const std::string& text) {
    StabData d;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto toks = tokens_of(raw);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "STAB") {
            if (toks.size() != 1) throw ParseError(lineno, "STAB header takes no arguments");
        } else if (head == "pair") {
            if (toks.size() != 5)
                throw ParseError(lineno, "pair line wants: pair id w z twist");
            d.pairs.push_back({toks[1], toks[2], toks[3], parse_ll(toks[4], lineno)});
        } else if (head == "iota") {
            if (toks.size() != 2) throw ParseError(lineno, "iota line wants: iota word");
            for (char c : toks[1])
                if (c != 'm' && c != 'l')
                    throw ParseError(lineno, "iota word uses letters m,l only");
            d.iota.push_back(toks[1]);
        } else if (head == "order") {
            if (toks.size() < 3)
                throw ParseError(lineno, "order line wants: order curve point:slot ...");
            CurveOrder o;
            o.curve = toks[1];
            for (size_t i = 2; i < toks.size(); ++i) {
                auto colon = toks[i].rfind(':');
                if (colon == std::string::npos)
                    throw ParseError(lineno, "traversal step wants point:slot");
                long long slot = parse_ll(toks[i].substr(colon + 1), lineno);
                if (slot != 1 && slot != 3)
                    throw ParseError(lineno, "exit slot must be 1 or 3");
                o.steps.push_back({toks[i].substr(0, colon), (int)slot});
            }
            d.orders.push_back(std::move(o));
        } else {
            throw ParseError(lineno, "unknown STAB row '" + head + "'");
        }
    }
    return d;
}

std::string format_stab(const StabData& d) {
    std::ostringstream out;
    out << "STAB\n";
    for (const auto& p : d.pairs)
        out << "pair " << p.id << ' ' << p.w << ' ' << p.z << ' ' << p.twist << '\n';
    for (const auto& w : d.iota) out << "iota " << w << '\n';
    for (const auto& o : d.orders) {
        out << "order " << o.curve;
        for (const auto& [pid, slot] : o.steps) out << ' ' << pid << ':' << slot;
        out << '\n';
    }
    return out.str();
}

StabbedDiagram parse_stabbed(const std::string& text) {
    std::istringstream in(text);
    std::string raw, dia, stab;
    bool in_stab = false;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!in_stab) {
            std::string s = raw;
            auto hash = s.find('#');
            if (hash != std::string::npos) s.erase(hash);
            auto toks = tokens_of(s);
            if (!toks.empty() && toks[0] == "STAB") {
                in_stab = true;
                stab.assign(lineno - 1, '\n');
            }
        }
        (in_stab ? stab : dia) += raw + '\n';
    }
    if (!in_stab) throw ParseError(0, "missing STAB section");
    return {diag::parse_diagram(dia), parse_stab(stab)};
}

StabbedDiagram load_stabbed_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_stabbed(ss.str());
}

std::string format_stabbed(const StabbedDiagram& sd) {
    return diag::format_diagram(sd.diagram) + format_stab(sd.stab);
}

// ---------------------------------------------------------------------------
// constructions

Diagram border(const Diagram& basic, const StabData& d) {
    return construct(basic, d, {}, true, true).d;
}

Diagram splay(const Diagram& basic, const StabData& d) { return splay(basic, d, d.iota); }

Diagram splay(const Diagram& basic, const StabData& d,
              const std::vector<std::string>& rows) {
    return construct(basic, d, rows, false, false).d;
}

Diagram partial_splay(const Diagram& basic, const StabData& d) {
    return partial_splay(basic, d, d.iota);
}

Diagram partial_splay(const Diagram& basic, const StabData& d,
                      const std::vector<std::string>& rows) {
    return construct(basic, d, rows, true, false).d;
}

std::vector<std::string> iota_of(const Diagram& splayed) {
    int h = splayed.boundaries;
    std::map<int, std::map<int, char>> tiers;
    int mx = 0;
    for (const auto& c : splayed.curves) {
        auto rn = parse_ring(c.id);
        if (!rn) continue;
        if (rn->j < 1 || rn->j > h || rn->tier < 1)
            throw ValidationError("ring '" + c.id + "' does not match the boundary data");
        if (!tiers[rn->tier].emplace(rn->j, rn->type).second)
            throw ValidationError("two rings for pair " + std::to_string(rn->j) +
                                  " at tier " + std::to_string(rn->tier));
        mx = std::max(mx, rn->tier);
    }
    std::vector<std::string> rows;
    for (int r = 1; r <= mx; ++r) {
        std::string row;
        for (int j = 1; j <= h; ++j) {
            auto it = tiers[r].find(j);
            if (it == tiers[r].end())
                throw ValidationError("no ring for pair " + std::to_string(j) +
                                      " at tier " + std::to_string(r));
            row += it->second;
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::vector<Generator> thetas(const Diagram& d, bool plus) {
    auto rows = iota_of(d);
    int S = d.system_count();
    bool bordered = d.is_bordered();
    std::string sign = plus ? "th+" : "th-";
    std::vector<Generator> out;
    for (int s = 1; s + 1 < S; ++s) {
        int ta = bordered ? s - 1 : s;
        int tb = ta + 1;
        Generator g;
        for (int ci : d.system_curves(s + 1)) {
            const std::string& id = d.curves[ci].id;
            std::string pid;
            if (auto rn = parse_ring(id)) {
                char tpa = ta == 0 ? rn->type : rows[ta - 1][rn->j - 1];
                if (tpa == rn->type) {
                    pid = sign + 'H' + std::to_string(rn->j) + rn->type + ':' +
                          std::to_string(ta) + '.' + std::to_string(tb);
                } else {
                    int mt = tpa == 'm' ? ta : tb;
                    int ltr = tpa == 'm' ? tb : ta;
                    pid = "e" + std::to_string(rn->j) + ':' + std::to_string(mt) + '.' +
                          std::to_string(ltr);
                }
            } else {
                auto [base, tier] = split_tier(id);
                if (tier != tb)
                    throw ValidationError("curve '" + id + "' is not an approximation copy");
                pid = sign + base + ':' + std::to_string(ta) + '.' + std::to_string(tb);
            }
            g.points.push_back(d.point(pid).id);
        }
        std::sort(g.points.begin(), g.points.end());
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

std::vector<Generator> theta_plus(const Diagram& splayed) { return thetas(splayed, true); }

std::vector<Generator> theta_minus(const Diagram& splayed) { return thetas(splayed, false); }

Generator nearest_point(const Diagram& splayed, const Generator& x, int level) {
    auto rows = iota_of(splayed);
    int m = (int)rows.size();
    bool bordered = splayed.is_bordered();
    if (x.points.empty()) throw ValidationError("empty generator");
    int src = -1;
    for (const auto& pid : x.points) {
        const Point& p = splayed.point(pid);
        if (splayed.curve(p.curve_a).system != 0)
            throw ValidationError("nearest point wants a beta-paired generator");
        int tier = splayed.curve(p.curve_b).system - (bordered ? 1 : 0);
        if (src == -1) src = tier;
        else if (src != tier)
            throw ValidationError("generator spans several copy tiers");
    }
    int lo = bordered ? 0 : 1;
    if (level < lo || level > m) throw ValidationError("level outside the copy range");
    if (level == src) return x;
    Generator out;
    for (const auto& pid : x.points) {
        auto [base, tier] = split_tier(pid);
        if (auto j = parse_xh(base)) {
            for (int t = std::min(src, level); t <= std::max(src, level); ++t)
                if (t != 0 && rows[t - 1][*j - 1] != 'm')
                    throw ValidationError("handle slot jumps between levels");
        }
        out.points.push_back(splayed.point(tiered(base, level)).id);
    }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

Diagram regularise(const Diagram& basic, const StabData& d, const std::vector<int>& rows,
                   bool partial) {
    std::vector<std::string> rr;
    for (int idx : rows) {
        if (idx < 1 || idx > (int)d.iota.size())
            throw ValidationError("iota row index " + std::to_string(idx) + " outside 1.." +
                                  std::to_string(d.iota.size()));
        const std::string& w = d.iota[idx - 1];
        if (rr.empty() || rr.back() != w) rr.push_back(w);
    }
    return partial ? partial_splay(basic, d, rr) : splay(basic, d, rr);
}

// ---------------------------------------------------------------------------
// Reeb decomposition

std::string format_reeb(const ReebDomainSequence& s) {
    if (s.blocks.empty()) return "-";
    std::ostringstream out;
    bool first = true;
    for (const auto& blk : s.blocks) {
        if (!first) out << ' ';
        first = false;
        out << torus::name(blk.chord);
        if (blk.jump) out << '*';
        else out << '^' << blk.mult;
    }
    return out.str();
}

ReebDomainSequence decompose_reeb_domains(const Diagram& splayed, const Domain& b, int j) {
    if (!splayed.is_bordered())
        throw ValidationError("local decomposition wants a bordered diagram");
    if (b.mult.size() != splayed.regions.size())
        throw ValidationError("domain size mismatch");
    if (j < 1 || j > splayed.boundaries)
        throw ValidationError("no boundary " + std::to_string(j));
    std::string J = std::to_string(j);
    auto rows = iota_of(splayed);
    int m = (int)rows.size();

    int ref_region = -1;
    for (size_t i = 0; i < splayed.regions.size(); ++i)
        for (auto [bj, t] : splayed.regions[i].arcs)
            if (bj == j && t == 0) {
                if (ref_region >= 0)
                    throw ValidationError("boundary " + J + " carries two interval-0 regions");
                ref_region = (int)i;
            }
    if (ref_region < 0)
        throw ValidationError("boundary " + J + " has no interval-0 region");
    long long ref = b.mult[ref_region];
    auto cls = boundary_class(splayed, b, j);

    std::vector<ReebBlock> blocks;
    std::array<long long, 3> emitted{0, 0, 0};
    auto emit = [&](torus::Gen g, long long mult, bool jump) {
        blocks.push_back({g, mult, jump});
        auto hol = torus::chord_homology(g);
        for (int t = 0; t < 3; ++t) emitted[t] += (jump ? 1 : mult) * hol[t];
    };

    for (int r = 1; r < m; ++r) {
        char ta = rows[r - 1][j - 1], tb = rows[r][j - 1];
        if (ta == tb) continue;
        int mt = ta == 'm' ? r : r + 1;
        int ltr = ta == 'm' ? r + 1 : r;
        const Point& e =
            splayed.point("e" + J + ':' + std::to_string(mt) + '.' + std::to_string(ltr));
        auto at = [&](int q) { return b.mult[splayed.region_index.at(e.quad[q])]; };
        long long corner = (at(0) + at(2)) - (at(1) + at(3));
        if (corner == 0) continue;
        if (corner != 1 && corner != -1)
            throw ValidationError("inconsistent local multiplicities");
        std::array<int, 4> sec = mt < ltr ? std::array<int, 4>{0, 3, 2, 1}
                                          : std::array<int, 4>{3, 2, 1, 0};
        long long s0 = at(sec[0]);
        if (s0 != ref) throw ValidationError("inconsistent local multiplicities");
        long long n1 = at(sec[1]) - s0, n2 = at(sec[2]) - s0, n3 = at(sec[3]) - s0;
        if (n1 < 0 || n2 < 0 || n3 < 0)
            throw ValidationError("negative local multiplicity");
        if (tb == 'm') {
            if (n3 > 0) emit(torus::Gen::R23, n3, false);
            emit(torus::Gen::R2, 1, true);
        } else if (n1 > n2) {
            if (n2 > 0) emit(torus::Gen::R12, n2, false);
            emit(torus::Gen::R1, 1, true);
        } else {
            if (n1 > 0) emit(torus::Gen::R12, n1, false);
            emit(torus::Gen::R3, 1, true);
        }
    }

    std::array<long long, 3> tgt;
    for (int t = 0; t < 3; ++t) tgt[t] = cls[t] - ref - emitted[t];
    auto fits = [&](torus::Gen g) -> std::optional<long long> {
        auto hol = torus::chord_homology(g);
        long long k = 0;
        for (int t = 0; t < 3; ++t)
            if (hol[t]) k = tgt[t];
        for (int t = 0; t < 3; ++t)
            if (tgt[t] != k * hol[t]) return std::nullopt;
        if (k < 0) return std::nullopt;
        return k;
    };
    if (tgt != std::array<long long, 3>{0, 0, 0}) {
        std::optional<long long> k;
        torus::Gen base = torus::Gen::R23;
        if (m >= 1) {
            base = rows[m - 1][j - 1] == 'm' ? torus::Gen::R23 : torus::Gen::R12;
            k = fits(base);
        } else {
            k = fits(base);
            if (!k) {
                base = torus::Gen::R12;
                k = fits(base);
            }
        }
        if (!k || *k == 0) throw ValidationError("inconsistent local multiplicities");
        emit(base, *k, false);
    }
    return {blocks};
}

splice::ChordSeqSet rho_of_domain(const Diagram& splayed, const Domain& b) {
    splice::ChordSeqSet out;
    for (int j = 1; j <= splayed.boundaries; ++j) {
        auto s = decompose_reeb_domains(splayed, b, j);
        splice::ChordSeq seq;
        for (const auto& blk : s.blocks) {
            long long reps = blk.jump ? 1 : blk.mult;
            for (long long i = 0; i < reps; ++i) seq.push_back(blk.chord);
        }
        out.push_back(splice::reduce_123(std::move(seq)));
    }
    return out;
}

splice::Splicing sigma_of_domain(const Diagram& splayed, const Domain& b,
                                 const std::vector<splice::IdemTuple>& iota) {
    return splice::splicing_from(rho_of_domain(splayed, b), iota);
}

bool approximation_supported(const Diagram& splayed, const Domain& b) {
    if (b.mult.size() != splayed.regions.size())
        throw ValidationError("domain size mismatch");
    for (size_t i = 0; i < b.mult.size(); ++i)
        if (b.mult[i] != 0 && splayed.regions[i].id.rfind("~a", 0) != 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// transfer between splayings

namespace {

std::optional<std::string> shift_name(const std::string& id) {
    if (auto th = parse_theta(id)) {
        if (th->a == 0 && th->b == 1) return std::nullopt;
        auto dec = [](int v) { return v == 0 ? 0 : v - 1; };
        return std::string(th->plus ? "th+" : "th-") + th->fam + ':' +
               std::to_string(dec(th->a)) + '.' + std::to_string(dec(th->b));
    }
    if (auto e = parse_epoint(id)) {
        if ((e->a == 0 && e->b == 1) || (e->a == 1 && e->b == 0)) return std::nullopt;
        auto dec = [](int v) { return v == 0 ? 0 : v - 1; };
        return "e" + std::to_string(e->j) + ':' + std::to_string(dec(e->a)) + '.' +
               std::to_string(dec(e->b));
    }
    auto [base, tier] = split_tier(id);
    if (tier == 0) return id;
    return tiered(base, tier - 1);
}

}  // namespace

std::vector<Generator> shift_sequence(const Diagram& source, const Diagram& target,
                                      const std::vector<Generator>& source_seq) {
    std::vector<Generator> out;
    for (const auto& g : source_seq) {
        if (g.points.empty()) throw ValidationError("empty generator in sequence");
        Generator ng;
        int dropped = 0;
        for (const auto& pid : g.points) {
            source.point(pid);
            auto s = shift_name(pid);
            if (!s) {
                ++dropped;
                continue;
            }
            ng.points.push_back(target.point(*s).id);
        }
        if (dropped && !ng.points.empty())
            throw ValidationError("sequence does not survive the collapse");
        if (ng.points.empty()) continue;
        std::sort(ng.points.begin(), ng.points.end());
        out.push_back(std::move(ng));
    }
    return out;
}

Domain splay_domain(const Diagram& basic, const StabData& d,
                    const std::vector<std::string>& source_rows, bool partial,
                    const std::vector<Generator>& source_seq, const Domain& bprime) {
    if (!partial) throw ValidationError("domain transfer wants a partial splaying");
    if (source_rows.empty())
        throw ValidationError("domain transfer wants at least one copy row");
    Built S = construct(basic, d, source_rows, true, false);
    std::vector<std::string> trows(source_rows.begin() + 1, source_rows.end());
    Built T = construct(basic, d, trows, true, false);
    if (bprime.mult.size() != S.d.regions.size())
        throw ValidationError("domain size mismatch");

    auto tseq = shift_sequence(S.d, T.d, source_seq);
    if (tseq.size() < 2) throw ValidationError("no consistent extension");
    auto req = required_of(T.d, tseq);

    size_t nv = T.d.regions.size();
    std::vector<std::vector<Rat>> eqs;
    for (const auto& p : T.d.points) {
        std::vector<Rat> row(nv + 1, Rat(0));
        for (int i = 0; i < 4; ++i)
            row[T.d.region_index.at(p.quad[i])] += Rat(i % 2 == 0 ? 1 : -1);
        auto it = req.find(p.id);
        row[nv] = Rat(it == req.end() ? 0 : it->second);
        eqs.push_back(std::move(row));
    }
    for (const auto& [key, rid] : S.face_region) {
        auto tkey = transfer_key(key, source_rows[0]);
        if (!tkey) continue;
        auto it = T.face_region.find(*tkey);
        if (it == T.face_region.end()) continue;
        std::vector<Rat> row(nv + 1, Rat(0));
        row[T.d.region_index.at(it->second)] = Rat(1);
        row[nv] = Rat(bprime.mult[S.d.region_index.at(rid)]);
        eqs.push_back(std::move(row));
    }

    size_t rank = 0;
    std::vector<int> piv(nv, -1);
    for (size_t c = 0; c < nv && rank < eqs.size(); ++c) {
        size_t sel = rank;
        while (sel < eqs.size() && eqs[sel][c] == Rat(0)) ++sel;
        if (sel == eqs.size()) continue;
        std::swap(eqs[rank], eqs[sel]);
        Rat dv = eqs[rank][c];
        for (auto& v : eqs[rank]) v /= dv;
        for (size_t r = 0; r < eqs.size(); ++r) {
            if (r == rank || eqs[r][c] == Rat(0)) continue;
            Rat f = eqs[r][c];
            for (size_t t = c; t <= nv; ++t) eqs[r][t] -= f * eqs[rank][t];
        }
        piv[c] = (int)rank;
        ++rank;
    }
    for (size_t r = rank; r < eqs.size(); ++r)
        if (eqs[r][nv] != Rat(0)) throw ValidationError("no consistent extension");

    Domain out = diag::zero_domain(T.d);
    for (size_t c = 0; c < nv; ++c) {
        if (piv[c] < 0) throw ValidationError("no consistent extension");
        Rat v = eqs[piv[c]][nv];
        if (v.denominator() != 1) throw ValidationError("no consistent extension");
        out.mult[c] = v.numerator();
    }
    return out;
}

bool splays(const Diagram& basic, const StabData& d,
            const std::vector<std::string>& source_rows, bool partial,
            const std::vector<Generator>& source_seq, const Domain& bprime,
            const Domain& b) {
    try {
        return splay_domain(basic, d, source_rows, partial, source_seq, bprime) == b;
    } catch (const ValidationError&) {
        return false;
    }
}

}  // namespace polycalc::splaying
