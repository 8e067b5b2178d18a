#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "polycalc/chord_splicing.hpp"
#include "polycalc/fp2.hpp"

namespace polycalc::ainf {

using splice::ChordSeq;
using splice::ChordSeqSet;
using splice::Splicing;

// T_k: first k chords. T^k: chords from (1-based) index k on.
ChordSeq truncate_low(const ChordSeq& s, int k);
ChordSeq truncate_high(const ChordSeq& s, int k);

// Replaces the adjacent pair (k, k+1) of boundary j (both 1-based) by its
// product; nullopt when the product vanishes.
std::optional<ChordSeqSet> mu_bar(const ChordSeqSet& rho, int j, int k);

// Finitely supported structure maps; lookups outside the table are zero.
struct MultiModule {
    int boundaries = 0;
    std::vector<std::string> generators;
    std::map<std::string, splice::IdemTuple> idempotent_of;
    std::map<std::pair<std::string, std::string>, F2Sum> maps;  // (x, sequence text)

    F2Sum m(const std::string& x, const ChordSeqSet& rho) const;
    void add_entry(const std::string& x, const ChordSeqSet& rho, const F2Sum& value);
};

struct PartialMaps {
    int boundaries = 0;
    std::vector<std::string> generators;
    std::map<std::string, splice::IdemTuple> idempotent_of;
    std::map<std::tuple<std::string, std::string, std::string>, F2Sum> maps;

    F2Sum n(const std::string& x, const ChordSeqSet& rho, const Splicing& sigma) const;
    void add_entry(const std::string& x, const ChordSeqSet& rho, const Splicing& sigma, const F2Sum& value);
};

// Residual of the multi-module relation at (x, rho); zero iff satisfied there.
F2Sum check_ainfinity(const MultiModule& M, const std::string& x, const ChordSeqSet& rho);

// Residual of the partial relation at (x, rho, sigma); sigma must interleave rho.
F2Sum check_partial(const PartialMaps& N, const std::string& x, const ChordSeqSet& rho, const Splicing& sigma);

// m(x, rho) := sum of n(x, rho, sigma) over interleavings sigma.
MultiModule assemble_m_from_n(const PartialMaps& N);

// Distinct (x, rho) pairs appearing as table keys.
std::vector<std::pair<std::string, ChordSeqSet>> table_reach(const MultiModule& M);
std::vector<std::pair<std::string, ChordSeqSet>> table_reach(const PartialMaps& N);

// Table records: "x ; r1.r23|r2 ; [splicing] ; y1+y2" (no splicing for m).
std::string format_partial_maps(const PartialMaps& N);
PartialMaps parse_partial_maps(std::string_view text);
std::string format_multimodule(const MultiModule& M);
MultiModule parse_multimodule(std::string_view text);

// Formal expansion of the summed partial relations (left) against the
// relation for the assembled maps (right), as multisets of term keys.
namespace symbolic {

using TermMultiset = std::map<std::string, long>;

struct Expansion {
    TermMultiset lhs_two_story, lhs_case2, lhs_case3, lhs_collision;
    TermMultiset rhs_two_story, rhs_mu_one_jumping, rhs_mu_two_jumping;
};

Expansion expand(const ChordSeqSet& rho);

bool all_even(const TermMultiset& t);
TermMultiset mod2(const TermMultiset& t);
TermMultiset merge(const TermMultiset& a, const TermMultiset& b);

}  // namespace symbolic

}  // namespace polycalc::ainf
