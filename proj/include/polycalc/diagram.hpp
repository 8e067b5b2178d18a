#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "polycalc/chord_splicing.hpp"
#include "polycalc/errors.hpp"
#include "polycalc/torus_algebra.hpp"

namespace polycalc::diag {

using Rat = boost::rational<long long>;

enum class CurveKind { Closed, ArcM, ArcL };

struct Curve {
    std::string id;
    int system = 0;
    CurveKind kind = CurveKind::Closed;
    int boundary = 0;  // 1-based, arcs only
};

// Quadrant slots are listed counterclockwise starting on a ray of the
// lower-system curve, so slots {0,2} and {1,3} are the two diagonals.
// A corner wedge whose ccw start lies on the lower curve sits in an even slot.
struct Point {
    std::string id;
    std::string curve_a, curve_b;  // curve_a belongs to the lower system
    std::array<std::string, 4> quad;
};

struct Region {
    std::string id;
    long long chi = 1;
    long long corners = 0;
    std::vector<std::string> basepoints;
    // (boundary j, interval t) covered along ∂Σ_j; t ∈ {0,1,2,3},
    // interval 0 carries the boundary basepoint, 1..3 carry chord homology.
    std::vector<std::pair<int, int>> arcs;
};

struct Basepoint {
    std::string id;
    bool on_boundary = false;
    int boundary = 0;  // 1-based when on_boundary
};

struct Diagram {
    long long genus = 0;
    int boundaries = 0;
    std::vector<Curve> curves;
    std::vector<Point> points;
    std::vector<Region> regions;
    std::vector<Basepoint> basepoints;

    std::map<std::string, int> curve_index, point_index, region_index;

    void finalize();  // rebuild index maps, then validate

    int system_count() const;
    bool is_bordered() const;
    std::vector<int> system_curves(int system) const;
    bool system_has_arcs(int system) const;
    // points in one generator; throws when systems disagree on the count
    long long points_per_generator() const;
    const Curve& curve(const std::string& id) const;
    const Point& point(const std::string& id) const;
    const Region& region(const std::string& id) const;
};

Diagram parse_diagram(const std::string& text);
Diagram load_diagram_file(const std::string& path);
std::string format_diagram(const Diagram& d);

struct Generator {
    std::vector<std::string> points;  // sorted
    std::string name() const;
    bool operator==(const Generator& o) const { return points == o.points; }
    bool operator<(const Generator& o) const { return points < o.points; }
};

std::vector<Generator> enumerate_generators(const Diagram& d, int si, int sj);
// slot j is M or L per which arc carries the generator's point on boundary j
std::vector<torus::Idem> idempotent_of(const Diagram& d, const Generator& x);

struct Domain {
    std::vector<long long> mult;  // indexed like Diagram::regions
    bool is_zero() const;
    Domain operator+(const Domain& o) const;
    Domain operator-(const Domain& o) const;
    bool operator==(const Domain& o) const { return mult == o.mult; }
};

Domain zero_domain(const Diagram& d);
Domain parse_domain(const Diagram& d, const std::string& text);
std::string format_domain(const Diagram& d, const Domain& b);

bool in_pi2(const Diagram& d, const Domain& b, const std::vector<Generator>& xs);

std::vector<Domain> periodic_domain_basis(const Diagram& d, bool provincial_only = false);
bool is_provincial(const Diagram& d, const Domain& b);
std::optional<Domain> nonnegative_periodic_witness(const Diagram& d, bool provincial_only = false);
bool is_admissible(const Diagram& d);
bool is_provincially_admissible(const Diagram& d);

Rat euler_measure(const Diagram& d, const Domain& b);

std::array<long long, 3> boundary_class(const Diagram& d, const Domain& b, int j);
bool is_rho_compatible(const Diagram& d, const Domain& b, const splice::ChordSeqSet& rho);

enum class IndexMode { Bigon, ClosedPolygon, BorderedPolygon, CutPrescribed };

// k is the polygon parameter, #systems - 1; g in the formulas is the
// per-generator point count of the diagram.  Throws on a non-integer value.
long long index(const Diagram& d, const Domain& b, long long chi_s, int k,
                const splice::ChordSeqSet& rho_boat, const splice::Splicing& sigma_boat,
                long long cut_count, IndexMode mode);
long long expected_dimension(long long ind, int k);
long long chi_emb_bigon(const Diagram& d, const Domain& b, const Generator& x,
                        const Generator& y);

Diagram subdiagram(const Diagram& d, const std::vector<int>& systems);

}  // namespace polycalc::diag
