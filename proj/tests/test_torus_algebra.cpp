#include "polycalc/torus_algebra.hpp"

#include <set>
#include <utility>

#include "doctest.h"

using namespace polycalc;
using torus::Gen;
using torus::Idem;

// Independent oracle: generators as sets of arrows between four marks on the
// boundary circle. Idempotents are identity arrows at odd (m) or even (l)
// marks; a chord [i,j] is the single arrow i -> j. Products compose arrows.
namespace {

using ArrowSet = std::set<std::pair<int, int>>;

ArrowSet oracle(Gen g) {
    switch (g) {
        case Gen::IM: return {{1, 1}, {3, 3}};
        case Gen::IL: return {{2, 2}, {4, 4}};
        case Gen::R1: return {{1, 2}};
        case Gen::R2: return {{2, 3}};
        case Gen::R3: return {{3, 4}};
        case Gen::R12: return {{1, 3}};
        case Gen::R23: return {{2, 4}};
        case Gen::R123: return {{1, 4}};
    }
    return {};
}

ArrowSet oracle_mul(const ArrowSet& a, const ArrowSet& b) {
    ArrowSet out;
    for (auto [p, q] : a)
        for (auto [r, s] : b)
            if (q == r) {
                auto arrow = std::make_pair(p, s);
                if (out.count(arrow))
                    out.erase(arrow);  // F2 coefficients
                else
                    out.insert(arrow);
            }
    return out;
}

torus::Element from_arrows(const ArrowSet& a) {
    for (int i = 0; i < torus::kGenCount; ++i) {
        Gen g = static_cast<Gen>(i);
        if (oracle(g) == a) return torus::Element::of(g);
    }
    REQUIRE(a.empty());
    return torus::Element::zero();
}

Gen gen_at(int i) { return static_cast<Gen>(i); }

}  // namespace

TEST_CASE("generator product table matches the arrow-composition oracle") {
    for (int i = 0; i < torus::kGenCount; ++i)
        for (int j = 0; j < torus::kGenCount; ++j) {
            auto expect = from_arrows(oracle_mul(oracle(gen_at(i)), oracle(gen_at(j))));
            auto got = torus::Element::of(gen_at(i)) * torus::Element::of(gen_at(j));
            CAPTURE(torus::name(gen_at(i)));
            CAPTURE(torus::name(gen_at(j)));
            CHECK(got == expect);
        }
}

TEST_CASE("generator products are associative over all 512 triples") {
    for (int i = 0; i < torus::kGenCount; ++i)
        for (int j = 0; j < torus::kGenCount; ++j)
            for (int k = 0; k < torus::kGenCount; ++k) {
                auto a = torus::Element::of(gen_at(i));
                auto b = torus::Element::of(gen_at(j));
                auto c = torus::Element::of(gen_at(k));
                CHECK((a * b) * c == a * (b * c));
            }
}

TEST_CASE("unit and idempotent structure") {
    auto one = torus::Element::unit();
    for (int i = 0; i < torus::kGenCount; ++i) {
        auto g = torus::Element::of(gen_at(i));
        CHECK(one * g == g);
        CHECK(g * one == g);
    }
    CHECK(torus::Element::of(Gen::IM) * torus::Element::of(Gen::IL) == torus::Element::zero());
    CHECK(torus::mul_gen(Gen::IM, Gen::IM) == Gen::IM);
    CHECK(torus::mul_gen(Gen::IL, Gen::IL) == Gen::IL);
}

TEST_CASE("start and end idempotents match the oracle marks") {
    auto parity_idem = [](int mark) { return mark % 2 == 1 ? Idem::M : Idem::L; };
    for (int i = 0; i < torus::kGenCount; ++i) {
        Gen g = gen_at(i);
        if (!torus::is_chord(g)) continue;
        auto arrow = *oracle(g).begin();
        CHECK(torus::start_idem(g) == parity_idem(arrow.first));
        CHECK(torus::end_idem(g) == parity_idem(arrow.second));
        CHECK(torus::is_jumping(g) == (parity_idem(arrow.first) != parity_idem(arrow.second)));
    }
}

TEST_CASE("jumping chords are exactly r1, r2, r3, r123") {
    CHECK(torus::is_jumping(Gen::R1));
    CHECK(torus::is_jumping(Gen::R2));
    CHECK(torus::is_jumping(Gen::R3));
    CHECK(torus::is_jumping(Gen::R123));
    CHECK_FALSE(torus::is_jumping(Gen::R12));
    CHECK_FALSE(torus::is_jumping(Gen::R23));
}

TEST_CASE("chord homology covers the oracle interval") {
    for (int i = 0; i < torus::kGenCount; ++i) {
        Gen g = gen_at(i);
        if (!torus::is_chord(g)) continue;
        auto arrow = *oracle(g).begin();
        auto hom = torus::chord_homology(g);
        for (int arc = 1; arc <= 3; ++arc)
            CHECK(hom[static_cast<size_t>(arc - 1)] == (arrow.first <= arc && arc < arrow.second ? 1 : 0));
    }
}

TEST_CASE("differential vanishes") {
    for (int bits = 0; bits < 256; ++bits)
        CHECK(torus::differential(torus::Element{static_cast<uint8_t>(bits)}) == torus::Element::zero());
}

TEST_CASE("names parse and print") {
    for (int i = 0; i < torus::kGenCount; ++i) {
        Gen g = gen_at(i);
        CHECK(torus::parse_gen(torus::name(g)) == g);
    }
    CHECK(!torus::parse_gen("rho1"));
    CHECK(torus::Element::zero().str() == "0");
    CHECK((torus::Element::of(Gen::R1) + torus::Element::of(Gen::R23)).str() == "r1+r23");
    CHECK(torus::Element::unit().str() == "im+il");
}
