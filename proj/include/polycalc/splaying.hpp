#pragma once

// Splayed-diagram construction.  A closed multipointed diagram plus
// stabilisation data (basepoint pairs joined inside one region, a handle
// twist, and idempotent rows) determines a bordered diagram and a family of
// splayed diagrams whose extra systems are parallel approximating copies of
// the alpha curves.  Domains on a splayed diagram decompose near each
// boundary into Reeb chord blocks, and domains transfer between splayings
// with different numbers of copies.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polycalc/chord_splicing.hpp"
#include "polycalc/diagram.hpp"
#include "polycalc/torus_algebra.hpp"

namespace polycalc::splaying {

// One stabilisation pair: basepoints w,z of the basic diagram lying in a
// common region, joined by two embedded paths inside that region.  The w-z
// path misses the alpha curves, the z-w path misses the beta curves; both
// stay in the pair's region.  twist is the handle framing; nonzero twist is
// accepted by border only.
struct StabPair {
    std::string id;
    std::string w, z;
    long long twist = 0;
};

// Cyclic traversal of one basic alpha curve.  Each crossing on the curve
// appears once with the quadrant slot whose counterclockwise end ray is the
// exit direction; slots on the lower curve are 1 or 3.  The listing fixes
// which side of the curve carries the parallel copies: the side of quadrants
// 0,1, which must be consistent along the whole curve.
struct CurveOrder {
    std::string curve;
    std::vector<std::pair<std::string, int>> steps;  // (point id, exit slot)
};

// Parsed STAB section: handle pairs, idempotent rows over {m,l} (row r gives
// the arc types of copy tier r, one letter per pair), and curve traversals.
struct StabData {
    std::vector<StabPair> pairs;
    std::vector<std::string> iota;
    std::vector<CurveOrder> orders;
};

StabData parse_stab(const std::string& text);
std::string format_stab(const StabData& d);

// A basic diagram together with its STAB section, from one file.
struct StabbedDiagram {
    diag::Diagram diagram;
    StabData stab;
};

StabbedDiagram parse_stabbed(const std::string& text);
StabbedDiagram load_stabbed_file(const std::string& path);
std::string format_stabbed(const StabbedDiagram& sd);

// Bordered diagram: one handle with a boundary bite per pair, arcs am<j>,
// al<j>, beta curve bH<j>, basepoint b<j> on interval 0.  Ignores iota.
diag::Diagram border(const diag::Diagram& basic, const StabData& d);

// Closed splayed diagram with one copy system per iota row.  Tier curves are
// named c~<r>, handle rings H<j>m~<r> / H<j>l~<r>; handle basepoints wH<j>,
// zH<j> replace the pair.  Rejects nonzero twist.
diag::Diagram splay(const diag::Diagram& basic, const StabData& d);
diag::Diagram splay(const diag::Diagram& basic, const StabData& d,
                    const std::vector<std::string>& rows);

// Bordered splayed diagram: the arc system of border plus one copy system
// per iota row.  Rejects nonzero twist.
diag::Diagram partial_splay(const diag::Diagram& basic, const StabData& d);
diag::Diagram partial_splay(const diag::Diagram& basic, const StabData& d,
                            const std::vector<std::string>& rows);

// Idempotent rows of a splayed diagram, recovered from its curve names.
// Entry r lists the arc type of copy tier r+1 at each handle, in pair order.
std::vector<std::string> iota_of(const diag::Diagram& splayed);

// Distinguished cycles between consecutive copy systems.  Entry i pairs
// system i+1 with system i+2 (the two crossings of parallel copies sit in a
// finger zone; theta_plus takes the one the finger leaves last, theta_minus
// the other; an idempotent change contributes the unique grid crossing).
std::vector<diag::Generator> theta_plus(const diag::Diagram& splayed);
std::vector<diag::Generator> theta_minus(const diag::Diagram& splayed);

// Translates a generator of G(beta, tier s) to G(beta, tier `level`) by the
// nearest-point correspondence.  Level 0 is the arc system of a partial
// splaying.  Throws when a handle slot changes arc type on the way.
diag::Generator nearest_point(const diag::Diagram& splayed,
                              const diag::Generator& x, int level);

// Splayed diagram over the selected iota rows (1-based indices into d.iota)
// with consecutive duplicate rows merged.
diag::Diagram regularise(const diag::Diagram& basic, const StabData& d,
                         const std::vector<int>& rows, bool partial);

// One block of the local decomposition at a boundary: `mult` copies of the
// chord for a sector block, or a single jumping chord for a jump block.
struct ReebBlock {
    torus::Gen chord = torus::Gen::R1;
    long long mult = 1;
    bool jump = false;
};

struct ReebDomainSequence {
    std::vector<ReebBlock> blocks;
};

std::string format_reeb(const ReebDomainSequence& s);

// Decomposes a domain near handle j of a splayed diagram into sector and
// jump blocks, walking the copy rings from the innermost tier outward.
// Throws when the local multiplicities admit no such decomposition.
ReebDomainSequence decompose_reeb_domains(const diag::Diagram& splayed,
                                          const diag::Domain& b, int j);

// Chord sequences of a domain, one per boundary, from the local
// decompositions, with adjacent blocks merging to r123 where possible.
splice::ChordSeqSet rho_of_domain(const diag::Diagram& splayed,
                                  const diag::Domain& b);

// Splicing of a domain: positions of the jump blocks against the idempotent
// rows.  iota lists the m+1 idempotent tuples of the splaying sequence.
splice::Splicing sigma_of_domain(const diag::Diagram& splayed,
                                 const diag::Domain& b,
                                 const std::vector<splice::IdemTuple>& iota);

// True when every region the domain touches lies in the thin zones between
// parallel copies (fingers, grid cells, copy strips).
bool approximation_supported(const diag::Diagram& splayed,
                             const diag::Domain& b);

// Transfers a domain from the splaying over source_rows to the splaying
// over source_rows minus its first row.  source_seq is the generator
// sequence of bprime on the source diagram; multiplicities away from the
// collapsing copy are matched and the rest solved from the crossing
// relations of the transported sequence.  Throws "no consistent extension"
// when no unique integral solution exists.
diag::Domain splay_domain(const diag::Diagram& basic, const StabData& d,
                          const std::vector<std::string>& source_rows,
                          bool partial,
                          const std::vector<diag::Generator>& source_seq,
                          const diag::Domain& bprime);

// True when splay_domain carries bprime to b.
bool splays(const diag::Diagram& basic, const StabData& d,
            const std::vector<std::string>& source_rows, bool partial,
            const std::vector<diag::Generator>& source_seq,
            const diag::Domain& bprime, const diag::Domain& b);

// Transports a generator sequence one level down, dropping the generator
// that collapses with the removed copy.  Point names shift one tier.
std::vector<diag::Generator> shift_sequence(
    const diag::Diagram& source, const diag::Diagram& target,
    const std::vector<diag::Generator>& source_seq);

}  // namespace polycalc::splaying
