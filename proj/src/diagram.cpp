#include "polycalc/diagram.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace polycalc::diag {

namespace {

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

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

void Diagram::finalize() {
    curve_index.clear();
    point_index.clear();
    region_index.clear();
    for (size_t i = 0; i < curves.size(); ++i) {
        if (!curve_index.emplace(curves[i].id, (int)i).second)
            throw ValidationError("duplicate curve id '" + curves[i].id + "'");
    }
    for (size_t i = 0; i < points.size(); ++i) {
        if (!point_index.emplace(points[i].id, (int)i).second)
            throw ValidationError("duplicate point id '" + points[i].id + "'");
    }
    for (size_t i = 0; i < regions.size(); ++i) {
        if (!region_index.emplace(regions[i].id, (int)i).second)
            throw ValidationError("duplicate region id '" + regions[i].id + "'");
    }

    if (genus < 0) throw ValidationError("negative genus");
    if (boundaries < 0) throw ValidationError("negative boundary count");
    if (curves.empty()) throw ValidationError("no curves");

    int max_sys = 0;
    for (const auto& c : curves) {
        if (c.system < 0) throw ValidationError("curve '" + c.id + "' has negative system");
        max_sys = std::max(max_sys, c.system);
        if (c.kind == CurveKind::Closed) {
            if (c.boundary != 0)
                throw ValidationError("closed curve '" + c.id + "' carries a boundary id");
        } else {
            if (c.boundary < 1 || c.boundary > boundaries)
                throw ValidationError("arc '" + c.id + "' has boundary outside 1.." +
                                      std::to_string(boundaries));
        }
    }
    for (int s = 0; s <= max_sys; ++s)
        if (system_curves(s).empty())
            throw ValidationError("system " + std::to_string(s) + " has no curves");

    bool bordered = is_bordered();
    for (int s = 0; s <= max_sys; ++s) {
        long long closed = 0;
        std::map<int, int> arcs_m, arcs_l;
        for (int ci : system_curves(s)) {
            const Curve& c = curves[ci];
            if (c.kind == CurveKind::Closed)
                ++closed;
            else if (c.kind == CurveKind::ArcM)
                ++arcs_m[c.boundary];
            else
                ++arcs_l[c.boundary];
        }
        bool has_arcs = !arcs_m.empty() || !arcs_l.empty();
        if (has_arcs) {
            for (int j = 1; j <= boundaries; ++j)
                if (arcs_m[j] != 1 || arcs_l[j] != 1)
                    throw ValidationError("system " + std::to_string(s) +
                                          " needs one m-arc and one l-arc on boundary " +
                                          std::to_string(j));
            // g-h in the torus-boundary normal form, g-1 for stabilised diagrams
            if (closed != genus - boundaries && closed != genus - 1)
                throw ValidationError("arc system " + std::to_string(s) + " has " +
                                      std::to_string(closed) +
                                      " closed curves, expected g-h or g-1");
        } else if (bordered) {
            // g for the side paired against the arcs, g+h-1 for approximation systems
            if (closed != genus && closed != genus + boundaries - 1)
                throw ValidationError("closed system " + std::to_string(s) + " has " +
                                      std::to_string(closed) + " curves, expected g or g+h-1");
        } else {
            if (boundaries < 1)
                throw ValidationError("closed multi-diagram needs at least one marked component");
            if (closed != genus + boundaries - 1)
                throw ValidationError("system " + std::to_string(s) + " has " +
                                      std::to_string(closed) + " curves, expected g+h-1");
        }
    }

    for (const auto& p : points) {
        auto a = curve_index.find(p.curve_a);
        auto b = curve_index.find(p.curve_b);
        if (a == curve_index.end())
            throw ValidationError("point '" + p.id + "' references unknown curve '" + p.curve_a + "'");
        if (b == curve_index.end())
            throw ValidationError("point '" + p.id + "' references unknown curve '" + p.curve_b + "'");
        if (curves[a->second].system >= curves[b->second].system)
            throw ValidationError("point '" + p.id + "' must list the lower-system curve first");
        for (const auto& q : p.quad)
            if (!region_index.count(q))
                throw ValidationError("point '" + p.id + "' references unknown region '" + q + "'");
    }

    std::map<std::string, int> slot_count;
    for (const auto& p : points)
        for (const auto& q : p.quad) ++slot_count[q];
    for (const auto& r : regions) {
        for (auto [j, t] : r.arcs) {
            if (j < 1 || j > boundaries)
                throw ValidationError("region '" + r.id + "' covers arc on unknown boundary " +
                                      std::to_string(j));
            if (t < 0 || t > 3)
                throw ValidationError("region '" + r.id + "' covers interval outside 0..3");
        }
        long long expect = slot_count[r.id] + 2 * (long long)r.arcs.size();
        if (r.corners != expect)
            throw ValidationError("region '" + r.id + "' lists " + std::to_string(r.corners) +
                                  " corners, slot tables give " + std::to_string(expect));
    }

    std::map<std::string, int> bp_placed;
    std::set<std::string> bp_ids;
    for (const auto& bp : basepoints) {
        if (!bp_ids.insert(bp.id).second)
            throw ValidationError("duplicate basepoint id '" + bp.id + "'");
        if (bp.on_boundary && (bp.boundary < 1 || bp.boundary > boundaries))
            throw ValidationError("basepoint '" + bp.id + "' on unknown boundary");
    }
    for (const auto& r : regions)
        for (const auto& z : r.basepoints) {
            if (!bp_ids.count(z))
                throw ValidationError("region '" + r.id + "' holds undeclared basepoint '" + z + "'");
            ++bp_placed[z];
        }
    for (const auto& bp : basepoints)
        if (bp_placed[bp.id] != 1)
            throw ValidationError("basepoint '" + bp.id + "' must lie in exactly one region");
}

int Diagram::system_count() const {
    int m = 0;
    for (const auto& c : curves) m = std::max(m, c.system + 1);
    return m;
}

bool Diagram::is_bordered() const {
    for (const auto& c : curves)
        if (c.kind != CurveKind::Closed) return true;
    return false;
}

std::vector<int> Diagram::system_curves(int system) const {
    std::vector<int> out;
    for (size_t i = 0; i < curves.size(); ++i)
        if (curves[i].system == system) out.push_back((int)i);
    return out;
}

bool Diagram::system_has_arcs(int system) const {
    for (int ci : system_curves(system))
        if (curves[ci].kind != CurveKind::Closed) return true;
    return false;
}

// generator size = closed curves plus one slot per boundary carrying arcs,
// required to agree across systems
long long Diagram::points_per_generator() const {
    long long common = -1;
    for (int s = 0; s < system_count(); ++s) {
        long long slots = 0;
        bool has_arcs = false;
        for (int ci : system_curves(s)) {
            if (curves[ci].kind == CurveKind::Closed)
                ++slots;
            else
                has_arcs = true;
        }
        if (has_arcs) slots += boundaries;
        if (common == -1)
            common = slots;
        else if (common != slots)
            throw ValidationError("curve systems have mismatched generator sizes");
    }
    return common;
}

const Curve& Diagram::curve(const std::string& id) const {
    auto it = curve_index.find(id);
    if (it == curve_index.end()) throw ValidationError("unknown curve '" + id + "'");
    return curves[it->second];
}

const Point& Diagram::point(const std::string& id) const {
    auto it = point_index.find(id);
    if (it == point_index.end()) throw ValidationError("unknown point '" + id + "'");
    return points[it->second];
}

const Region& Diagram::region(const std::string& id) const {
    auto it = region_index.find(id);
    if (it == region_index.end()) throw ValidationError("unknown region '" + id + "'");
    return regions[it->second];
}

Diagram parse_diagram(const std::string& text) {
    Diagram d;
    enum Section { None, Curves, Points, Regions, Basepoints } sec = None;
    bool have_surface = false;

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
        if (head == "SURFACE") {
            if (toks.size() != 3) throw ParseError(lineno, "SURFACE wants genus and boundary count");
            d.genus = parse_ll(toks[1], lineno);
            d.boundaries = (int)parse_ll(toks[2], lineno);
            have_surface = true;
            continue;
        }
        if (head == "CURVES") { sec = Curves; continue; }
        if (head == "POINTS") { sec = Points; continue; }
        if (head == "REGIONS") { sec = Regions; continue; }
        if (head == "BASEPOINTS") { sec = Basepoints; continue; }

        switch (sec) {
            case Curves: {
                if (toks.size() != 4)
                    throw ParseError(lineno, "curve line wants: system id kind boundary");
                Curve c;
                c.system = (int)parse_ll(toks[0], lineno);
                c.id = toks[1];
                if (toks[2] == "closed")
                    c.kind = CurveKind::Closed;
                else if (toks[2] == "arc:m")
                    c.kind = CurveKind::ArcM;
                else if (toks[2] == "arc:l")
                    c.kind = CurveKind::ArcL;
                else
                    throw ParseError(lineno, "curve kind must be closed, arc:m or arc:l");
                if (toks[3] == "-") {
                    if (c.kind != CurveKind::Closed)
                        throw ParseError(lineno, "arc needs a boundary id");
                    c.boundary = 0;
                } else {
                    c.boundary = (int)parse_ll(toks[3], lineno);
                }
                d.curves.push_back(c);
                break;
            }
            case Points: {
                if (toks.size() != 7)
                    throw ParseError(lineno, "point line wants: id curveA curveB q0 q1 q2 q3");
                Point p;
                p.id = toks[0];
                p.curve_a = toks[1];
                p.curve_b = toks[2];
                for (int i = 0; i < 4; ++i) p.quad[i] = toks[3 + i];
                d.points.push_back(p);
                break;
            }
            case Regions: {
                if (toks.size() != 5)
                    throw ParseError(lineno, "region line wants: id chi corners basepoints arcs");
                Region r;
                r.id = toks[0];
                r.chi = parse_ll(toks[1], lineno);
                r.corners = parse_ll(toks[2], lineno);
                if (toks[3] != "-") r.basepoints = split_commas(toks[3]);
                if (toks[4] != "-") {
                    for (const auto& item : split_commas(toks[4])) {
                        auto colon = item.find(':');
                        if (colon == std::string::npos)
                            throw ParseError(lineno, "arc coverage wants boundary:interval");
                        r.arcs.emplace_back((int)parse_ll(item.substr(0, colon), lineno),
                                            (int)parse_ll(item.substr(colon + 1), lineno));
                    }
                }
                d.regions.push_back(r);
                break;
            }
            case Basepoints: {
                if (toks.size() != 3)
                    throw ParseError(lineno, "basepoint line wants: id kind boundary");
                Basepoint bp;
                bp.id = toks[0];
                if (toks[1] == "interior")
                    bp.on_boundary = false;
                else if (toks[1] == "boundary")
                    bp.on_boundary = true;
                else
                    throw ParseError(lineno, "basepoint kind must be interior or boundary");
                if (toks[2] == "-") {
                    if (bp.on_boundary) throw ParseError(lineno, "boundary basepoint needs an id");
                    bp.boundary = 0;
                } else {
                    bp.boundary = (int)parse_ll(toks[2], lineno);
                }
                d.basepoints.push_back(bp);
                break;
            }
            case None:
                throw ParseError(lineno, "content before any section header");
        }
    }
    if (!have_surface) throw ValidationError("missing SURFACE line");
    d.finalize();
    return d;
}

Diagram load_diagram_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_diagram(ss.str());
}

std::string format_diagram(const Diagram& d) {
    std::ostringstream out;
    out << "SURFACE " << d.genus << ' ' << d.boundaries << '\n';
    out << "CURVES\n";
    for (const auto& c : d.curves) {
        out << c.system << ' ' << c.id << ' ';
        out << (c.kind == CurveKind::Closed ? "closed" : c.kind == CurveKind::ArcM ? "arc:m" : "arc:l");
        if (c.kind == CurveKind::Closed)
            out << " -\n";
        else
            out << ' ' << c.boundary << '\n';
    }
    out << "POINTS\n";
    for (const auto& p : d.points) {
        out << p.id << ' ' << p.curve_a << ' ' << p.curve_b;
        for (const auto& q : p.quad) out << ' ' << q;
        out << '\n';
    }
    out << "REGIONS\n";
    for (const auto& r : d.regions) {
        out << r.id << ' ' << r.chi << ' ' << r.corners << ' ';
        if (r.basepoints.empty()) {
            out << '-';
        } else {
            for (size_t i = 0; i < r.basepoints.size(); ++i)
                out << (i ? "," : "") << r.basepoints[i];
        }
        out << ' ';
        if (r.arcs.empty()) {
            out << '-';
        } else {
            for (size_t i = 0; i < r.arcs.size(); ++i)
                out << (i ? "," : "") << r.arcs[i].first << ':' << r.arcs[i].second;
        }
        out << '\n';
    }
    out << "BASEPOINTS\n";
    for (const auto& bp : d.basepoints) {
        out << bp.id << ' ' << (bp.on_boundary ? "boundary" : "interior") << ' ';
        if (bp.on_boundary)
            out << bp.boundary << '\n';
        else
            out << "-\n";
    }
    return out.str();
}

std::string Generator::name() const {
    std::string out;
    for (size_t i = 0; i < points.size(); ++i) {
        if (i) out += '.';
        out += points[i];
    }
    return out;
}

namespace {

// slot of a point within one system's matching: a closed curve is its own
// slot, the two arcs of a boundary share one
int slot_of(const Diagram& d, const Point& p, int system, std::map<std::string, int>& slots) {
    const Curve& a = d.curve(p.curve_a);
    const Curve& b = d.curve(p.curve_b);
    const Curve& c = a.system == system ? a : b;
    std::string key = c.kind == CurveKind::Closed ? "c:" + c.id : "b:" + std::to_string(c.boundary);
    auto it = slots.find(key);
    return it == slots.end() ? -1 : it->second;
}

}  // namespace

std::vector<Generator> enumerate_generators(const Diagram& d, int si, int sj) {
    int m = d.system_count();
    if (si < 0 || si >= m || sj < 0 || sj >= m || si == sj)
        throw ValidationError("generator systems must be distinct and present");

    auto build_slots = [&](int s) {
        std::map<std::string, int> slots;
        int n = 0;
        for (int ci : d.system_curves(s))
            if (d.curves[ci].kind == CurveKind::Closed) slots["c:" + d.curves[ci].id] = n++;
        if (d.system_has_arcs(s))
            for (int j = 1; j <= d.boundaries; ++j) slots["b:" + std::to_string(j)] = n++;
        return slots;
    };
    auto slots_i = build_slots(si), slots_j = build_slots(sj);

    std::vector<const Point*> usable;
    for (const auto& p : d.points) {
        int sa = d.curve(p.curve_a).system, sb = d.curve(p.curve_b).system;
        if ((sa == si && sb == sj) || (sa == sj && sb == si)) usable.push_back(&p);
    }
    std::sort(usable.begin(), usable.end(),
              [](const Point* a, const Point* b) { return a->id < b->id; });

    size_t need = slots_i.size();
    if (need != slots_j.size()) return {};

    std::vector<Generator> out;
    std::vector<char> used_i(need, 0), used_j(need, 0);
    std::vector<std::string> chosen;
    std::function<void(size_t, size_t)> rec = [&](size_t idx, size_t covered) {
        if (covered == need) {
            Generator g;
            g.points = chosen;
            std::sort(g.points.begin(), g.points.end());
            out.push_back(g);
            return;
        }
        if (idx == usable.size() || usable.size() - idx < need - covered) return;
        rec(idx + 1, covered);
        const Point& p = *usable[idx];
        int a = slot_of(d, p, si, slots_i), b = slot_of(d, p, sj, slots_j);
        if (a >= 0 && b >= 0 && !used_i[a] && !used_j[b]) {
            used_i[a] = used_j[b] = 1;
            chosen.push_back(p.id);
            rec(idx + 1, covered + 1);
            chosen.pop_back();
            used_i[a] = used_j[b] = 0;
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<torus::Idem> idempotent_of(const Diagram& d, const Generator& x) {
    if (!d.is_bordered()) throw ValidationError("idempotents need a bordered diagram");
    std::vector<std::optional<torus::Idem>> per_bdy(d.boundaries + 1);
    for (const auto& pid : x.points) {
        const Point& p = d.point(pid);
        for (const auto& cid : {p.curve_a, p.curve_b}) {
            const Curve& c = d.curve(cid);
            if (c.kind == CurveKind::Closed) continue;
            torus::Idem idem = c.kind == CurveKind::ArcM ? torus::Idem::M : torus::Idem::L;
            auto& slot = per_bdy[c.boundary];
            if (slot && *slot != idem)
                throw ValidationError("generator '" + x.name() + "' occupies both arcs of boundary " +
                                      std::to_string(c.boundary));
            slot = idem;
        }
    }
    std::vector<torus::Idem> out;
    for (int j = 1; j <= d.boundaries; ++j) {
        if (!per_bdy[j])
            throw ValidationError("generator '" + x.name() + "' misses boundary " + std::to_string(j));
        out.push_back(*per_bdy[j]);
    }
    return out;
}

bool Domain::is_zero() const {
    for (long long v : mult)
        if (v) return false;
    return true;
}

Domain Domain::operator+(const Domain& o) const {
    Domain r = *this;
    for (size_t i = 0; i < mult.size(); ++i) r.mult[i] += o.mult[i];
    return r;
}

Domain Domain::operator-(const Domain& o) const {
    Domain r = *this;
    for (size_t i = 0; i < mult.size(); ++i) r.mult[i] -= o.mult[i];
    return r;
}

Domain zero_domain(const Diagram& d) {
    Domain b;
    b.mult.assign(d.regions.size(), 0);
    return b;
}

Domain parse_domain(const Diagram& d, const std::string& text) {
    Domain b = zero_domain(d);
    if (text == "-") return b;
    for (const auto& item : split_commas(text)) {
        auto colon = item.rfind(':');
        if (colon == std::string::npos)
            throw ParseError(0, "domain term wants region:multiplicity, got '" + item + "'");
        std::string rid = item.substr(0, colon);
        auto it = d.region_index.find(rid);
        if (it == d.region_index.end()) throw ParseError(0, "unknown region '" + rid + "'");
        b.mult[it->second] += parse_ll(item.substr(colon + 1), 0);
    }
    return b;
}

std::string format_domain(const Diagram& d, const Domain& b) {
    std::string out;
    for (size_t i = 0; i < b.mult.size(); ++i) {
        if (!b.mult[i]) continue;
        if (!out.empty()) out += ',';
        out += d.regions[i].id + ':' + std::to_string(b.mult[i]);
    }
    return out.empty() ? "-" : out;
}

namespace {

// cyclic system chain s_0..s_k of a polygon sequence; x_t joins s_t to s_{t+1}
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
            int nxt = s[t] == pairs[t].first ? pairs[t].second
                      : s[t] == pairs[t].second ? pairs[t].first
                                                : -1;
            if (nxt < 0) { ok = false; break; }
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
    // two-system sequences chain either way; the first generator leaves the
    // higher system
    return valid[0][0] > valid[1][0] ? valid[0] : valid[1];
}

}  // namespace

bool in_pi2(const Diagram& d, const Domain& b, const std::vector<Generator>& xs) {
    if (xs.size() < 2) throw ValidationError("sequence needs at least two generators");
    if (b.mult.size() != d.regions.size()) throw ValidationError("domain size mismatch");
    auto s = system_chain(d, xs);
    size_t n = xs.size();
    std::map<std::string, long long> required;
    for (size_t t = 0; t < n; ++t) {
        int sense = s[t] > s[(t + 1) % n] ? 1 : -1;
        for (const auto& pid : xs[t].points) required[pid] += sense;
    }
    for (const auto& p : d.points) {
        long long diag = 0;
        for (int i = 0; i < 4; ++i) {
            long long m = b.mult[d.region_index.at(p.quad[i])];
            diag += (i % 2 == 0) ? m : -m;
        }
        auto it = required.find(p.id);
        if (diag != (it == required.end() ? 0 : it->second)) return false;
    }
    return true;
}

namespace {

// integer kernel of an integer constraint matrix via unimodular column
// reduction; returns an exact lattice basis
std::vector<std::vector<long long>> integer_kernel(std::vector<std::vector<long long>> m, size_t n) {
    std::vector<std::vector<long long>> u(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i) u[i][i] = 1;
    std::vector<char> active(n, 1);

    auto col_sub = [&](size_t dst, size_t src, long long q) {
        for (auto& row : m) row[dst] -= q * row[src];
        for (auto& row : u) row[dst] -= q * row[src];
    };
    for (auto& row : m) {
        for (;;) {
            size_t best = n;
            for (size_t c = 0; c < n; ++c)
                if (active[c] && row[c] != 0 &&
                    (best == n || std::llabs(row[c]) < std::llabs(row[best])))
                    best = c;
            if (best == n) break;
            bool others = false;
            for (size_t c = 0; c < n; ++c) {
                if (c == best || !active[c] || row[c] == 0) continue;
                col_sub(c, best, row[c] / row[best]);
                if (row[c] != 0) others = true;
            }
            if (!others) {
                active[best] = 0;  // pivot column retired
                break;
            }
        }
    }

    std::vector<std::vector<long long>> basis;
    for (size_t c = 0; c < n; ++c) {
        if (!active[c]) continue;
        std::vector<long long> v(n);
        for (size_t i = 0; i < n; ++i) v[i] = u[i][c];
        size_t first = 0;
        while (first < n && v[first] == 0) ++first;
        if (first == n) continue;
        if (v[first] < 0)
            for (auto& x : v) x = -x;
        basis.push_back(v);
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

std::vector<std::vector<long long>> constraint_rows(const Diagram& d, bool provincial_only) {
    size_t n = d.regions.size();
    std::vector<std::vector<long long>> rows;
    for (const auto& p : d.points) {
        std::vector<long long> row(n, 0);
        for (int i = 0; i < 4; ++i)
            row[d.region_index.at(p.quad[i])] += (i % 2 == 0) ? 1 : -1;
        rows.push_back(row);
    }
    for (size_t i = 0; i < n; ++i) {
        bool pin = !d.regions[i].basepoints.empty() ||
                   (provincial_only && !d.regions[i].arcs.empty());
        if (pin) {
            std::vector<long long> row(n, 0);
            row[i] = 1;
            rows.push_back(row);
        }
    }
    return rows;
}

struct Ineq {
    std::vector<Rat> coef;  // over the remaining lambda variables
    Rat cst;                // coef . lambda + cst >= 0
};

void normalize_ineq(Ineq& q) {
    long long g = 0;
    auto acc = [&](const Rat& r) {
        g = std::gcd(g, std::llabs(r.numerator()));
    };
    for (const auto& c : q.coef) acc(c);
    acc(q.cst);
    if (g > 1) {
        for (auto& c : q.coef) c /= g;
        q.cst /= g;
    }
}

}  // namespace

std::vector<Domain> periodic_domain_basis(const Diagram& d, bool provincial_only) {
    auto basis = integer_kernel(constraint_rows(d, provincial_only), d.regions.size());
    std::vector<Domain> out;
    for (auto& v : basis) {
        Domain b;
        b.mult = std::move(v);
        out.push_back(std::move(b));
    }
    return out;
}

bool is_provincial(const Diagram& d, const Domain& b) {
    for (size_t i = 0; i < d.regions.size(); ++i)
        if (b.mult[i] != 0 && !d.regions[i].arcs.empty()) return false;
    return true;
}

std::optional<Domain> nonnegative_periodic_witness(const Diagram& d, bool provincial_only) {
    auto basis = periodic_domain_basis(d, provincial_only);
    size_t r = basis.size(), n = d.regions.size();
    if (r == 0) return std::nullopt;

    // feasibility of K.lambda >= 0 with sum(K.lambda) = 1; the equality
    // removes the cone's scale freedom
    std::vector<Rat> eq(r, Rat(0));
    for (size_t c = 0; c < r; ++c)
        for (size_t i = 0; i < n; ++i) eq[c] += Rat(basis[c].mult[i]);
    size_t pivot = r;
    for (size_t c = 0; c < r; ++c)
        if (eq[c] != Rat(0)) { pivot = c; break; }
    if (pivot == r) return std::nullopt;  // every kernel vector sums to zero: cone is trivial

    // order: all variables except pivot, expressed over indices != pivot
    std::vector<size_t> vars;
    for (size_t c = 0; c < r; ++c)
        if (c != pivot) vars.push_back(c);

    std::vector<Ineq> sys;
    for (size_t i = 0; i < n; ++i) {
        // K_i . lambda >= 0 with lambda_pivot = (1 - sum_{c != pivot} eq_c lambda_c)/eq_pivot
        Rat kp = Rat(basis[pivot].mult[i]);
        Ineq q;
        q.coef.assign(vars.size(), Rat(0));
        q.cst = kp / eq[pivot];
        for (size_t vi = 0; vi < vars.size(); ++vi) {
            size_t c = vars[vi];
            q.coef[vi] = Rat(basis[c].mult[i]) - kp * eq[c] / eq[pivot];
        }
        sys.push_back(q);
    }

    struct Level {
        std::vector<Ineq> lowers, uppers;  // bounds on the eliminated variable
    };
    std::vector<Level> stack;

    std::vector<Ineq> cur = sys;
    for (size_t v = vars.size(); v-- > 0;) {
        Level lv;
        std::vector<Ineq> next;
        std::vector<Ineq> pos, neg;
        for (auto& q : cur) {
            Rat a = q.coef[v];
            Ineq rest = q;
            rest.coef.resize(v);
            if (a > Rat(0)) {
                lv.lowers.push_back(q);
                pos.push_back(q);
            } else if (a < Rat(0)) {
                lv.uppers.push_back(q);
                neg.push_back(q);
            } else {
                next.push_back(rest);
            }
        }
        for (const auto& p : pos)
            for (const auto& g : neg) {
                // p: a.lambda_v + rest_p >= 0 (a>0); g: b.lambda_v + rest_g >= 0 (b<0)
                Ineq q;
                q.coef.assign(v, Rat(0));
                Rat a = p.coef[v], bc = -g.coef[v];
                for (size_t i = 0; i < v; ++i) q.coef[i] = p.coef[i] * bc + g.coef[i] * a;
                q.cst = p.cst * bc + g.cst * a;
                normalize_ineq(q);
                next.push_back(q);
            }
        std::sort(next.begin(), next.end(), [](const Ineq& x, const Ineq& y) {
            return std::tie(x.coef, x.cst) < std::tie(y.coef, y.cst);
        });
        next.erase(std::unique(next.begin(), next.end(),
                               [](const Ineq& x, const Ineq& y) {
                                   return x.coef == y.coef && x.cst == y.cst;
                               }),
                   next.end());
        if (next.size() > 200000) throw ValidationError("admissibility system too large");
        stack.push_back(std::move(lv));
        cur = std::move(next);
    }
    for (const auto& q : cur)
        if (q.cst < Rat(0)) return std::nullopt;  // infeasible: no nonnegative combination

    // back-substitute a feasible lambda
    std::vector<Rat> lam(vars.size(), Rat(0));
    for (size_t v = 0; v < vars.size(); ++v) {
        const Level& lv = stack[stack.size() - 1 - v];
        bool has_lo = false, has_hi = false;
        Rat lo(0), hi(0);
        auto eval = [&](const Ineq& q) {
            Rat s = q.cst;
            for (size_t i = 0; i < v; ++i) s += q.coef[i] * lam[i];
            return s;
        };
        for (const auto& q : lv.lowers) {
            Rat bound = -eval(q) / q.coef[v];
            if (!has_lo || bound > lo) { lo = bound; has_lo = true; }
        }
        for (const auto& q : lv.uppers) {
            Rat bound = -eval(q) / q.coef[v];
            if (!has_hi || bound < hi) { hi = bound; has_hi = true; }
        }
        Rat pick(0);
        if (has_lo && has_hi)
            pick = (lo + hi) / 2;
        else if (has_lo)
            pick = lo;
        else if (has_hi)
            pick = hi;
        lam[v] = pick;
    }
    std::reverse(lam.begin(), lam.end());

    std::vector<Rat> full(r, Rat(0));
    Rat acc(1);
    for (size_t vi = 0; vi < vars.size(); ++vi) {
        full[vars[vi]] = lam[vi];
        acc -= eq[vars[vi]] * lam[vi];
    }
    full[pivot] = acc / eq[pivot];

    std::vector<Rat> x(n, Rat(0));
    for (size_t i = 0; i < n; ++i)
        for (size_t c = 0; c < r; ++c) x[i] += Rat(basis[c].mult[i]) * full[c];
    long long scale = 1;
    for (const auto& xi : x) scale = std::lcm(scale, xi.denominator());
    Domain w = zero_domain(d);
    bool nonzero = false;
    for (size_t i = 0; i < n; ++i) {
        Rat v = x[i] * scale;
        w.mult[i] = v.numerator();
        if (w.mult[i] < 0) throw ValidationError("witness reconstruction went negative");
        if (w.mult[i]) nonzero = true;
    }
    if (!nonzero) throw ValidationError("witness reconstruction vanished");
    return w;
}

bool is_admissible(const Diagram& d) { return !nonnegative_periodic_witness(d, false); }

bool is_provincially_admissible(const Diagram& d) {
    return !nonnegative_periodic_witness(d, true);
}

Rat euler_measure(const Diagram& d, const Domain& b) {
    Rat e(0);
    for (size_t i = 0; i < d.regions.size(); ++i)
        e += Rat(b.mult[i]) * (Rat(d.regions[i].chi) - Rat(d.regions[i].corners, 4));
    return e;
}

std::array<long long, 3> boundary_class(const Diagram& d, const Domain& b, int j) {
    if (!d.is_bordered()) throw ValidationError("boundary class needs a bordered diagram");
    if (j < 1 || j > d.boundaries) throw ValidationError("boundary index out of range");
    std::array<long long, 3> out{0, 0, 0};
    for (size_t i = 0; i < d.regions.size(); ++i)
        for (auto [bj, t] : d.regions[i].arcs)
            if (bj == j && t >= 1) out[t - 1] += b.mult[i];
    return out;
}

bool is_rho_compatible(const Diagram& d, const Domain& b, const splice::ChordSeqSet& rho) {
    if ((int)rho.size() != d.boundaries)
        throw ValidationError("chord sequence tuple must have one row per boundary");
    for (int j = 1; j <= d.boundaries; ++j) {
        std::array<long long, 3> want{0, 0, 0};
        for (torus::Gen c : rho[j - 1]) {
            auto h = torus::chord_homology(c);
            for (int t = 0; t < 3; ++t) want[t] += h[t];
        }
        if (boundary_class(d, b, j) != want) return false;
    }
    return true;
}

long long index(const Diagram& d, const Domain& b, long long chi_s, int k,
                const splice::ChordSeqSet& rho_boat, const splice::Splicing& sigma_boat,
                long long cut_count, IndexMode mode) {
    if (b.mult.size() != d.regions.size()) throw ValidationError("domain size mismatch");
    long long chords = 0;
    for (const auto& row : rho_boat) chords += (long long)row.size();

    switch (mode) {
        case IndexMode::Bigon:
            if (k != 1) throw ValidationError("bigon index wants k = 1");
            if (cut_count != 0) throw ValidationError("bigon index takes no cuts");
            break;
        case IndexMode::ClosedPolygon:
            if (chords != 0 || sigma_boat.cols() != 0)
                throw ValidationError("closed polygon index takes no chords");
            if (cut_count != 0) throw ValidationError("closed polygon index takes no cuts");
            break;
        case IndexMode::BorderedPolygon:
            if (cut_count != 0) throw ValidationError("bordered polygon index takes no cuts");
            break;
        case IndexMode::CutPrescribed:
            if (cut_count < 0) throw ValidationError("negative cut count");
            break;
    }
    if (k < 1) throw ValidationError("polygon parameter must be positive");
    if (chords != 0 && !d.is_bordered())
        throw ValidationError("chord terms need a bordered diagram");
    if (chords != 0 && (int)rho_boat.size() != d.boundaries)
        throw ValidationError("chord sequence tuple must have one row per boundary");

    Rat ind = Rat(3 - k, 2) * Rat(d.points_per_generator()) - Rat(chi_s) +
              Rat(2) * euler_measure(d, b) + Rat(chords) - Rat(splice::col(sigma_boat)) -
              Rat(cut_count);
    if (ind.denominator() != 1) {
        std::ostringstream msg;
        msg << "index is not an integer: " << ind.numerator() << '/' << ind.denominator();
        throw ValidationError(msg.str());
    }
    return ind.numerator();
}

long long expected_dimension(long long ind, int k) { return ind + k - 2; }

long long chi_emb_bigon(const Diagram& d, const Domain& b, const Generator& x,
                        const Generator& y) {
    Rat n(0);
    for (const auto& gen : {x, y})
        for (const auto& pid : gen.points) {
            const Point& p = d.point(pid);
            for (int i = 0; i < 4; ++i) n += Rat(b.mult[d.region_index.at(p.quad[i])], 4);
        }
    Rat chi = Rat(d.points_per_generator()) + euler_measure(d, b) - n;
    if (chi.denominator() != 1) throw ValidationError("embedded Euler characteristic not integral");
    return chi.numerator();
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Diagram subdiagram(const Diagram& d, const std::vector<int>& systems) {
    if (systems.empty()) throw ValidationError("subdiagram needs at least one system");
    std::vector<int> want = systems;
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    int m = d.system_count();
    for (int s : want)
        if (s < 0 || s >= m)
            throw ValidationError("subdiagram system " + std::to_string(s) + " out of range");

    std::map<int, int> renumber;
    for (size_t i = 0; i < want.size(); ++i) renumber[want[i]] = (int)i;
    auto kept = [&](const std::string& cid) { return renumber.count(d.curve(cid).system) > 0; };

    std::set<std::string> removed_with_points;
    for (const auto& c : d.curves) {
        if (renumber.count(c.system)) continue;
        if (c.kind != CurveKind::Closed)
            throw ValidationError("subdiagram cannot remove arc curve '" + c.id + "'");
    }
    for (const auto& p : d.points) {
        if (!kept(p.curve_a)) removed_with_points.insert(p.curve_a);
        if (!kept(p.curve_b)) removed_with_points.insert(p.curve_b);
    }
    for (const auto& c : d.curves)
        if (!renumber.count(c.system) && !removed_with_points.count(c.id))
            throw ValidationError("removed curve '" + c.id + "' meets no intersection point");

    size_t n = d.regions.size();
    UnionFind uf(n);
    auto ri = [&](const std::string& id) { return d.region_index.at(id); };
    for (const auto& p : d.points) {
        bool ka = kept(p.curve_a), kb = kept(p.curve_b);
        if (ka && kb) continue;
        if (!ka) {  // merge across the lower curve's rays
            uf.unite(ri(p.quad[3]), ri(p.quad[0]));
            uf.unite(ri(p.quad[1]), ri(p.quad[2]));
        }
        if (!kb) {
            uf.unite(ri(p.quad[0]), ri(p.quad[1]));
            uf.unite(ri(p.quad[2]), ri(p.quad[3]));
        }
    }

    // class representative: the constituent with the least original index
    std::map<int, std::vector<int>> classes;
    for (size_t i = 0; i < n; ++i) classes[uf.find((int)i)].push_back((int)i);
    std::map<int, int> class_order;  // root -> merged region index
    std::vector<std::vector<int>> members;
    {
        std::vector<std::pair<int, int>> heads;  // (min member, root)
        for (auto& [root, mem] : classes) heads.emplace_back(mem.front(), root);
        std::sort(heads.begin(), heads.end());
        for (auto& [mn, root] : heads) {
            class_order[root] = (int)members.size();
            members.push_back(classes[root]);
        }
    }
    auto merged_of = [&](const std::string& id) { return class_order.at(uf.find(ri(id))); };

    std::vector<long long> chi(members.size(), 0);
    std::vector<long long> ray_count(members.size(), 0), corrections(members.size(), 0);
    std::vector<long long> corner_slots(members.size(), 0);
    for (size_t c = 0; c < members.size(); ++c)
        for (int i : members[c]) chi[c] += d.regions[i].chi;

    for (const auto& p : d.points) {
        bool ka = kept(p.curve_a), kb = kept(p.curve_b);
        if (ka && kb) {
            for (const auto& q : p.quad) ++corner_slots[merged_of(q)];
            continue;
        }
        if (!ka && !kb) {
            int c = merged_of(p.quad[0]);
            ray_count[c] += 4;
            corrections[c] += 3;
        } else if (!ka) {
            int c30 = merged_of(p.quad[0]), c12 = merged_of(p.quad[1]);
            ray_count[c30] += 1;
            ray_count[c12] += 1;
            corrections[c30] += 1;
            corrections[c12] += 1;
        } else {
            int c01 = merged_of(p.quad[0]), c23 = merged_of(p.quad[2]);
            ray_count[c01] += 1;
            ray_count[c23] += 1;
            corrections[c01] += 1;
            corrections[c23] += 1;
        }
    }

    Diagram out;
    out.genus = d.genus;
    out.boundaries = d.boundaries;
    for (const auto& c : d.curves) {
        if (!renumber.count(c.system)) continue;
        Curve nc = c;
        nc.system = renumber[c.system];
        out.curves.push_back(nc);
    }
    for (const auto& p : d.points) {
        if (!kept(p.curve_a) || !kept(p.curve_b)) continue;
        Point np = p;
        for (auto& q : np.quad) q = d.regions[members[merged_of(q)].front()].id;
        out.points.push_back(np);
    }
    for (size_t c = 0; c < members.size(); ++c) {
        if (ray_count[c] % 2 != 0)
            throw ValidationError("inconsistent gluing while merging regions");
        Region r;
        r.id = d.regions[members[c].front()].id;
        r.chi = chi[c] + ray_count[c] / 2 - corrections[c];
        long long arc_instances = 0;
        for (int i : members[c]) {
            for (const auto& z : d.regions[i].basepoints) r.basepoints.push_back(z);
            for (auto a : d.regions[i].arcs) r.arcs.push_back(a);
            arc_instances += (long long)d.regions[i].arcs.size();
        }
        std::sort(r.basepoints.begin(), r.basepoints.end());
        std::sort(r.arcs.begin(), r.arcs.end());
        r.corners = corner_slots[c] + 2 * arc_instances;
        out.regions.push_back(r);
    }
    out.basepoints = d.basepoints;
    out.finalize();
    return out;
}

}  // namespace polycalc::diag
