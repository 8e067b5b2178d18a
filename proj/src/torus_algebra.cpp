#include "polycalc/torus_algebra.hpp"

namespace polycalc::torus {

namespace {
constexpr int kIM = 0, kIL = 1, kR1 = 2, kR2 = 3, kR3 = 4, kR12 = 5, kR23 = 6, kR123 = 7;
constexpr int8_t Z = -1;

// Full generator product table; Z is zero.
constexpr int8_t kMul[kGenCount][kGenCount] = {
    //            im     il     r1     r2     r3     r12    r23    r123
    /* im   */ {  kIM,   Z,     kR1,   Z,     kR3,   kR12,  Z,     kR123 },
    /* il   */ {  Z,     kIL,   Z,     kR2,   Z,     Z,     kR23,  Z     },
    /* r1   */ {  Z,     kR1,   Z,     kR12,  Z,     Z,     kR123, Z     },
    /* r2   */ {  kR2,   Z,     Z,     Z,     kR23,  Z,     Z,     Z     },
    /* r3   */ {  Z,     kR3,   Z,     Z,     Z,     Z,     Z,     Z     },
    /* r12  */ {  kR12,  Z,     Z,     Z,     kR123, Z,     Z,     Z     },
    /* r23  */ {  Z,     kR23,  Z,     Z,     Z,     Z,     Z,     Z     },
    /* r123 */ {  Z,     kR123, Z,     Z,     Z,     Z,     Z,     Z     },
};
}  // namespace

bool is_idempotent(Gen g) { return g == Gen::IM || g == Gen::IL; }
bool is_chord(Gen g) { return !is_idempotent(g); }

std::optional<Gen> mul_gen(Gen a, Gen b) {
    int8_t r = kMul[static_cast<int>(a)][static_cast<int>(b)];
    if (r == Z) return std::nullopt;
    return static_cast<Gen>(r);
}

Element Element::unit() { return of(Gen::IM) + of(Gen::IL); }

Element operator*(Element a, Element b) {
    Element out;
    for (int i = 0; i < kGenCount; ++i) {
        if (!(a.bits & (1u << i))) continue;
        for (int j = 0; j < kGenCount; ++j) {
            if (!(b.bits & (1u << j))) continue;
            int8_t r = kMul[i][j];
            if (r != Z) out.bits ^= static_cast<uint8_t>(1u << r);
        }
    }
    return out;
}

Element differential(Element) { return Element::zero(); }

namespace {
struct ChordInfo {
    Idem start, end;
    std::array<int, 3> hom;
};
// r2 is missing below: the table is indexed from R1 with r2 at slot 1, etc.
constexpr ChordInfo kChord[6] = {
    /* r1   */ {Idem::M, Idem::L, {1, 0, 0}},
    /* r2   */ {Idem::L, Idem::M, {0, 1, 0}},
    /* r3   */ {Idem::M, Idem::L, {0, 0, 1}},
    /* r12  */ {Idem::M, Idem::M, {1, 1, 0}},
    /* r23  */ {Idem::L, Idem::L, {0, 1, 1}},
    /* r123 */ {Idem::M, Idem::L, {1, 1, 1}},
};
const ChordInfo& chord_info(Gen g) { return kChord[static_cast<int>(g) - kR1]; }
}  // namespace

Idem start_idem(Gen chord) { return chord_info(chord).start; }
Idem end_idem(Gen chord) { return chord_info(chord).end; }
bool is_jumping(Gen chord) { return chord_info(chord).start != chord_info(chord).end; }
std::array<int, 3> chord_homology(Gen chord) { return chord_info(chord).hom; }

const char* name(Gen g) {
    static const char* kNames[kGenCount] = {"im", "il", "r1", "r2", "r3", "r12", "r23", "r123"};
    return kNames[static_cast<int>(g)];
}

std::string str(Idem i) { return i == Idem::M ? "m" : "l"; }

std::optional<Gen> parse_gen(std::string_view s) {
    for (int i = 0; i < kGenCount; ++i)
        if (s == name(static_cast<Gen>(i))) return static_cast<Gen>(i);
    return std::nullopt;
}

std::string Element::str() const {
    if (bits == 0) return "0";
    std::string out;
    for (int i = 0; i < kGenCount; ++i) {
        if (!(bits & (1u << i))) continue;
        if (!out.empty()) out += "+";
        out += name(static_cast<Gen>(i));
    }
    return out;
}

}  // namespace polycalc::torus
