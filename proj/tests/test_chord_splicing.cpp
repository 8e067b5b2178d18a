#include "polycalc/chord_splicing.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "polycalc/errors.hpp"

using namespace polycalc;
using namespace polycalc::splice;
using torus::Gen;
using torus::Idem;

namespace {

const Gen kChords[6] = {Gen::R1, Gen::R2, Gen::R3, Gen::R12, Gen::R23, Gen::R123};

// Contracts pairs in caller-chosen order; used to check confluence of reduce.
ChordSeq reduce_in_order(ChordSeq s, bool only_123, std::mt19937& rng) {
    while (true) {
        std::vector<size_t> sites;
        for (size_t i = 0; i + 1 < s.size(); ++i) {
            auto p = torus::mul_gen(s[i], s[i + 1]);
            if (p && (!only_123 || *p == Gen::R123)) sites.push_back(i);
        }
        if (sites.empty()) return s;
        size_t i = sites[rng() % sites.size()];
        s[i] = *torus::mul_gen(s[i], s[i + 1]);
        s.erase(s.begin() + static_cast<long>(i) + 1);
    }
}

std::vector<ChordSeq> all_sequences(int max_len) {
    std::vector<ChordSeq> out{{}};
    size_t lo = 0;
    for (int len = 1; len <= max_len; ++len) {
        size_t hi = out.size();
        for (size_t i = lo; i < hi; ++i)
            for (Gen c : kChords) {
                ChordSeq next = out[i];
                next.push_back(c);
                out.push_back(std::move(next));
            }
        lo = hi;
    }
    return out;
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("jump positions and counts") {
    ChordSeq s{Gen::R123, Gen::R23, Gen::R123};
    CHECK(jump_positions(s) == std::vector<int>{0, 2});
    CHECK(jump_count(s) == 2);
    CHECK(total_jumps({{Gen::R1, Gen::R2}, {Gen::R3}}) == 3);
}

TEST_CASE("reduce and 123-reduce fixed points") {
    CHECK(reduce({Gen::R1, Gen::R2, Gen::R3}) == ChordSeq{Gen::R123});
    CHECK(reduce_123({Gen::R1, Gen::R23}) == ChordSeq{Gen::R123});
    CHECK(reduce_123({Gen::R12, Gen::R3}) == ChordSeq{Gen::R123});
    CHECK(reduce_123({Gen::R1, Gen::R2, Gen::R3}) == ChordSeq{Gen::R1, Gen::R2, Gen::R3});
    CHECK(reduce({}) == ChordSeq{});
}

TEST_CASE("reduce is confluent over all sequences of length <= 5") {
    std::mt19937 rng(20240817);
    for (const auto& s : all_sequences(5)) {
        ChordSeq fixed = reduce(s);
        ChordSeq fixed123 = reduce_123(s);
        for (int trial = 0; trial < 3; ++trial) {
            CHECK(reduce_in_order(s, false, rng) == fixed);
            CHECK(reduce_in_order(s, true, rng) == fixed123);
        }
    }
}

TEST_CASE("equivalences compare reductions") {
    CHECK(equivalent_123({Gen::R1, Gen::R23}, {Gen::R12, Gen::R3}));
    CHECK(composable_equivalent({Gen::R1}, {Gen::R1}));
    CHECK_FALSE(composable_equivalent({Gen::R1, Gen::R2}, {Gen::R2, Gen::R1}));
    CHECK_FALSE(equivalent_123({Gen::R1, Gen::R2}, {Gen::R12}));
    CHECK(composable_equivalent({Gen::R1, Gen::R2}, {Gen::R12}));
}

TEST_CASE("123-equivalence preserves total homology class") {
    auto hom = [](const ChordSeq& s) {
        std::array<int, 3> h{0, 0, 0};
        for (Gen c : s) {
            auto ch = torus::chord_homology(c);
            for (int i = 0; i < 3; ++i) h[static_cast<size_t>(i)] += ch[static_cast<size_t>(i)];
        }
        return h;
    };
    for (const auto& s : all_sequences(4)) CHECK(hom(s) == hom(reduce_123(s)));
}

TEST_CASE("star concatenates componentwise") {
    ChordSeqSet a{{Gen::R1}, {Gen::R2}};
    ChordSeqSet b{{Gen::R3}, {}};
    CHECK(star(a, b) == ChordSeqSet{{Gen::R1, Gen::R3}, {Gen::R2}});
    CHECK(star(a, ChordSeqSet{{}, {}}) == a);
    CHECK_THROWS_AS(star(a, ChordSeqSet{{}}), ValidationError);
}

TEST_CASE("splicing enumeration counts") {
    ChordSeqSet j11{{Gen::R1}, {Gen::R2}};
    CHECK(enumerate_interleavings(j11).size() == 2);
    ChordSeqSet j21{{Gen::R1, Gen::R2}, {Gen::R3}};
    CHECK(enumerate_interleavings(j21).size() == 3);
    ChordSeqSet j00{{Gen::R12}, {Gen::R23}};
    CHECK(enumerate_interleavings(j00).size() == 1);  // the empty 0-splicing
    CHECK(enumerate_splicings(j00, 1).empty());       // a column would be empty
    for (const auto& s : enumerate_interleavings(j21)) {
        CHECK(splices(s, j21));
        CHECK(col(s) == 0);
        CHECK(is_interleaving(s));
    }
    // all 2-splicings of jumps (2,1): one column shared
    auto two = enumerate_splicings(j21, 2);
    CHECK(two.size() == 2);
    for (const auto& s : two) CHECK(col(s) == 1);
}

TEST_CASE("interleaving count equals the multinomial coefficient") {
    ChordSeqSet rho{{Gen::R1, Gen::R2, Gen::R1}, {Gen::R3, Gen::R2}};
    CHECK(static_cast<long>(enumerate_interleavings(rho).size()) == binomial(5, 2));
    ChordSeqSet rho3{{Gen::R1}, {Gen::R2}, {Gen::R3}};
    CHECK(enumerate_interleavings(rho3).size() == 6);
}

TEST_CASE("star of splicings concatenates columns") {
    ChordSeqSet a{{Gen::R1}, {}};
    ChordSeqSet b{{}, {Gen::R2}};
    auto sa = enumerate_interleavings(a).at(0);
    auto sb = enumerate_interleavings(b).at(0);
    auto s = star(sa, sb);
    CHECK(s.cols() == 2);
    CHECK(splices(s, star(a, b)));
}

TEST_CASE("occupants follow jump order") {
    ChordSeqSet rho{{Gen::R12, Gen::R1, Gen::R2}, {Gen::R3}};
    for (const auto& s : enumerate_interleavings(rho)) {
        std::vector<Gen> seen;
        for (int i = 0; i < s.cols(); ++i)
            for (int j = 0; j < s.rows(); ++j)
                if (s.cell(j, i) && j == 0) seen.push_back(occupant(s, rho, j, i));
        CHECK(seen == std::vector<Gen>{Gen::R1, Gen::R2});
    }
}

TEST_CASE("idempotents_of follows start and end idempotents") {
    ChordSeqSet rho{{Gen::R1}, {}};
    auto s = enumerate_interleavings(rho).at(0);
    auto iota = idempotents_of(s, rho);
    REQUIRE(iota.size() == 2);
    CHECK(iota[0] == IdemTuple{Idem::M, Idem::M});
    CHECK(iota[1] == IdemTuple{Idem::L, Idem::M});

    ChordSeqSet flat{{Gen::R12, Gen::R12}, {Gen::R23}};
    auto s0 = enumerate_interleavings(flat).at(0);
    auto iota0 = idempotents_of(s0, flat);
    REQUIRE(iota0.size() == 1);
    CHECK(iota0[0] == IdemTuple{Idem::M, Idem::L});
}

TEST_CASE("splicing_from inverts idempotents_of on valid cases") {
    std::vector<ChordSeqSet> family{
        {{Gen::R1}, {Gen::R2}},
        {{Gen::R1, Gen::R2}, {Gen::R3}},
        {{Gen::R2, Gen::R123}, {}},
        {{Gen::R12, Gen::R1}, {Gen::R23, Gen::R2}},
    };
    int round_trips = 0;
    for (const auto& rho : family) {
        int m = total_jumps(rho);
        for (int cols = (m > 0 ? 1 : 0); cols <= m; ++cols) {
            for (const auto& s : enumerate_splicings(rho, cols)) {
                auto iota = idempotents_of(s, rho);
                Splicing back = splicing_from(rho, iota);
                CHECK(back == s);
                ++round_trips;
            }
        }
    }
    CHECK(round_trips > 0);
}

TEST_CASE("splicing_from validates change counts") {
    ChordSeqSet rho{{Gen::R1}, {}};
    std::vector<IdemTuple> constant{{Idem::M, Idem::M}, {Idem::M, Idem::M}};
    CHECK_THROWS_AS(splicing_from(rho, constant), ValidationError);
    // jump-free sequences with a constant row give the empty splicing at m=0
    ChordSeqSet flat{{Gen::R12}, {}};
    auto s = splicing_from(flat, {{Idem::M, Idem::M}});
    CHECK(s.cols() == 0);
}

TEST_CASE("compatibility case analysis") {
    // both jumping, consecutive columns: case (3)
    ChordSeqSet r12pair{{Gen::R1, Gen::R2}, {Gen::R3}};
    for (const auto& s : enumerate_interleavings(r12pair)) {
        auto jcols = std::make_pair(-1, -1);
        for (int i = 0; i < s.cols(); ++i)
            if (s.cell(0, i)) (jcols.first < 0 ? jcols.first : jcols.second) = i;
        auto cc = compatible(r12pair, s, 0, 0);
        if (jcols.second == jcols.first + 1) {
            REQUIRE(cc.has_value());
            CHECK(*cc == CompatCase::TwoJumpingConsecutive);
            auto [nrho, ns] = compose_at(r12pair, s, 0, 0);
            CHECK(nrho == ChordSeqSet{{Gen::R12}, {Gen::R3}});
            CHECK(ns.cols() == s.cols() - 2);
            CHECK(splices(ns, nrho));
        } else {
            CHECK_FALSE(cc.has_value());
        }
    }
    // zero product: case (1), no composition
    ChordSeqSet zp{{Gen::R3, Gen::R2}, {}};
    auto sz = enumerate_interleavings(zp).at(0);
    auto cz = compatible(zp, sz, 0, 0);
    REQUIRE(cz.has_value());
    CHECK(*cz == CompatCase::ZeroProduct);
    CHECK_THROWS_AS(compose_at(zp, sz, 0, 0), ValidationError);
    // one jumping, product r123: case (2), occupancy unchanged
    ChordSeqSet oj{{Gen::R1, Gen::R23}, {Gen::R2}};
    for (const auto& s : enumerate_interleavings(oj)) {
        auto cc = compatible(oj, s, 0, 0);
        REQUIRE(cc.has_value());
        CHECK(*cc == CompatCase::OneJumping);
        auto [nrho, ns] = compose_at(oj, s, 0, 0);
        CHECK(nrho == ChordSeqSet{{Gen::R123}, {Gen::R2}});
        CHECK(ns == s);
        CHECK(splices(ns, nrho));
    }
}

TEST_CASE("case (2) never produces a non-jumping chord in the torus algebra") {
    for (Gen a : kChords)
        for (Gen b : kChords) {
            auto p = torus::mul_gen(a, b);
            if (!p) continue;
            if (torus::is_jumping(a) != torus::is_jumping(b)) CHECK(torus::is_jumping(*p));
        }
}

TEST_CASE("collisions merge distinct rows only") {
    ChordSeqSet rho{{Gen::R1}, {Gen::R2}};
    auto inter = enumerate_interleavings(rho);
    REQUIRE(inter.size() == 2);
    for (const auto& s : inter) {
        CHECK(collidable(s, 0));
        auto merged = collide(s, 0);
        CHECK(merged.cols() == 1);
        CHECK(col(merged) == 1);
    }
    CHECK(collide(inter[0], 0) == collide(inter[1], 0));

    // two jumps of the same row in adjacent columns are not collidable
    ChordSeqSet same{{Gen::R1, Gen::R2}, {}};
    auto s = enumerate_interleavings(same).at(0);
    CHECK_FALSE(collidable(s, 0));
    CHECK_THROWS_AS(collide(s, 0), ValidationError);
}

TEST_CASE("collide is exactly 2-to-1 onto its image") {
    ChordSeqSet rho{{Gen::R1, Gen::R2}, {Gen::R3, Gen::R2}};
    std::map<std::pair<std::string, int>, int> preimages;
    for (const auto& s : enumerate_interleavings(rho))
        for (int k = 0; k + 1 < s.cols(); ++k)
            if (collidable(s, k)) ++preimages[{format_splicing(collide(s, k)), k}];
    CHECK(!preimages.empty());
    for (const auto& [key, count] : preimages) CHECK(count == 2);
}

TEST_CASE("splits reassemble and cover the degenerate ends") {
    ChordSeqSet rho{{Gen::R12, Gen::R1}, {Gen::R2}};
    for (const auto& s : enumerate_interleavings(rho)) {
        auto splits = enumerate_splits(rho, s);
        bool saw_empty_lambda = false, saw_empty_delta = false;
        for (const auto& sp : splits) {
            CHECK(star(sp.lambda, sp.delta) == rho);
            CHECK(star(sp.sigma1, sp.sigma2) == s);
            bool lempty = true, dempty = true;
            for (const auto& r : sp.lambda) lempty = lempty && r.empty();
            for (const auto& r : sp.delta) dempty = dempty && r.empty();
            saw_empty_lambda = saw_empty_lambda || lempty;
            saw_empty_delta = saw_empty_delta || dempty;
        }
        CHECK(saw_empty_lambda);
        CHECK(saw_empty_delta);
    }
}

TEST_CASE("shippings: degenerate level zero") {
    ChordSeqSet flat{{Gen::R12}, {Gen::R23}};
    auto s = enumerate_interleavings(flat).at(0);
    auto ships = enumerate_shippings(flat, s, 0);
    REQUIRE(ships.size() == 1);
    CHECK(ships[0].boat_rho == flat);
    CHECK(ships[0].anchor_rho == ChordSeqSet{{}, {}});
    CHECK(ships[0].anchor_sigma.cols() == 0);

    // level zero on a jumping sequence still has only the empty anchor
    ChordSeqSet rho{{Gen::R3, Gen::R2}, {}};
    auto si = enumerate_interleavings(rho).at(0);
    auto zs = enumerate_shippings(rho, si, 0);
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].boat_rho == rho);
}

TEST_CASE("shippings anchor the last columns and start with a jump") {
    ChordSeqSet rho{{Gen::R3, Gen::R2}, {}};
    auto s = enumerate_interleavings(rho).at(0);
    auto one = enumerate_shippings(rho, s, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].anchor_rho == ChordSeqSet{{Gen::R2}, {}});
    CHECK(one[0].boat_rho == ChordSeqSet{{Gen::R3}, {}});
    auto two = enumerate_shippings(rho, s, 2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].anchor_rho == rho);
    CHECK(enumerate_shippings(rho, s, 3).empty());

    for (int k = 0; k <= 2; ++k)
        for (const auto& sh : enumerate_shippings(rho, s, k)) {
            CHECK(star(sh.boat_rho, sh.anchor_rho) == rho);
            CHECK(star(sh.boat_sigma, sh.anchor_sigma) == s);
            CHECK(sh.anchor_sigma.cols() == k);
        }

    CHECK(splays(one[0], two[0]));
    CHECK_FALSE(splays(two[0], one[0]));
}

TEST_CASE("shippings with trailing non-jumping chords cut uniquely at level zero") {
    ChordSeqSet rho{{Gen::R2, Gen::R23}, {}};
    auto s = enumerate_interleavings(rho).at(0);
    auto zero = enumerate_shippings(rho, s, 0);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].anchor_rho == ChordSeqSet{{}, {}});
    auto one = enumerate_shippings(rho, s, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].anchor_rho == ChordSeqSet{{Gen::R2, Gen::R23}, {}});
}

TEST_CASE("sequence and splicing text forms round trip") {
    ChordSeqSet rho{{Gen::R1, Gen::R23}, {}, {Gen::R2}};
    CHECK(format_seqset(rho) == "r1.r23 | - | r2");
    CHECK(parse_seqset("r1.r23 | - | r2") == rho);
    CHECK(parse_seqset(format_seqset(rho)) == rho);
    for (const auto& s : enumerate_interleavings(rho)) {
        CHECK(parse_splicing(format_splicing(s), s.rows()) == s);
    }
    CHECK(format_splicing(empty_splicing(2)) == "-");
    CHECK_THROWS_AS(parse_seqset("r1.bogus"), ParseError);
    CHECK_THROWS_AS(parse_splicing("[3]", 2), ParseError);
}
