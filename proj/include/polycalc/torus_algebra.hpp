#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace polycalc::torus {

// The eight generators over F2: two idempotents and six chords.
enum class Gen : uint8_t { IM = 0, IL, R1, R2, R3, R12, R23, R123 };
inline constexpr int kGenCount = 8;

enum class Idem : uint8_t { M = 0, L = 1 };

bool is_idempotent(Gen g);
bool is_chord(Gen g);

// Product of two generators; nullopt encodes zero.
std::optional<Gen> mul_gen(Gen a, Gen b);

// F2 span of the generators, one bit per Gen.
struct Element {
    uint8_t bits = 0;

    static Element zero() { return {}; }
    static Element unit();  // im + il
    static Element of(Gen g) { return Element{static_cast<uint8_t>(1u << static_cast<int>(g))}; }

    bool is_zero() const { return bits == 0; }
    bool has(Gen g) const { return bits & (1u << static_cast<int>(g)); }

    friend Element operator+(Element a, Element b) { return Element{static_cast<uint8_t>(a.bits ^ b.bits)}; }
    friend Element operator*(Element a, Element b);
    friend bool operator==(Element a, Element b) { return a.bits == b.bits; }

    std::string str() const;
};

// Trivial differential.
Element differential(Element);

// Idempotent action on chords: iota_start * rho = rho = rho * iota_end.
Idem start_idem(Gen chord);
Idem end_idem(Gen chord);

// A chord jumps when it changes idempotent.
bool is_jumping(Gen chord);

// Multiplicities over the three boundary arcs.
std::array<int, 3> chord_homology(Gen chord);

const char* name(Gen g);
std::string str(Idem i);
std::optional<Gen> parse_gen(std::string_view s);

}  // namespace polycalc::torus
