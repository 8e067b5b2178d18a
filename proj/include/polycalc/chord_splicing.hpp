#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polycalc/torus_algebra.hpp"

namespace polycalc::splice {

using torus::Gen;
using torus::Idem;

// One sequence of chords per boundary; sequences need not be composable.
using ChordSeq = std::vector<Gen>;
using ChordSeqSet = std::vector<ChordSeq>;

std::vector<int> jump_positions(const ChordSeq& s);
int jump_count(const ChordSeq& s);
int total_jumps(const ChordSeqSet& rho);

// Iterated composition of adjacent composable pairs, to the fixed point.
ChordSeq reduce(ChordSeq s);
// Composes an adjacent pair only when the product is r123.
ChordSeq reduce_123(ChordSeq s);
bool composable_equivalent(const ChordSeq& a, const ChordSeq& b);
bool equivalent_123(const ChordSeq& a, const ChordSeq& b);

// Ordered partition of each row's jumping chords into m columns, at most one
// per cell, every column nonempty across rows. Cell (j,i) holds row j's next
// jumping chord in sequence order, so occupancy determines the occupants.
struct Splicing {
    std::vector<std::vector<char>> occ;  // occ[j][i], rows x columns

    int rows() const { return static_cast<int>(occ.size()); }
    int cols() const { return occ.empty() ? 0 : static_cast<int>(occ[0].size()); }
    int row_jumps(int j) const;
    bool cell(int j, int i) const { return occ[j][i] != 0; }

    friend bool operator==(const Splicing&, const Splicing&) = default;
    friend bool operator<(const Splicing& a, const Splicing& b) { return a.occ < b.occ; }
};

Splicing empty_splicing(int rows);
bool splices(const Splicing& s, const ChordSeqSet& rho);
int col(const Splicing& s);
bool is_interleaving(const Splicing& s);

ChordSeqSet star(const ChordSeqSet& a, const ChordSeqSet& b);
Splicing star(const Splicing& a, const Splicing& b);

// All m-splicings in lexicographic order; interleavings are the Col = 0 ones
// with m = total jump count.
std::vector<Splicing> enumerate_splicings(const ChordSeqSet& rho, int m);
std::vector<Splicing> enumerate_interleavings(const ChordSeqSet& rho);

// The chord occupying cell (j,i); requires occupancy.
Gen occupant(const Splicing& s, const ChordSeqSet& rho, int j, int i);

using IdemTuple = std::vector<Idem>;  // one idempotent per boundary

// iota_sigma: m+1 tuples; row value changes exactly at occupied cells.
std::vector<IdemTuple> idempotents_of(const Splicing& s, const ChordSeqSet& rho);
// Inverse: the k-th change in row j receives the k-th jumping chord.
Splicing splicing_from(const ChordSeqSet& rho, const std::vector<IdemTuple>& iota);

enum class CompatCase { ZeroProduct, OneJumping, TwoJumpingConsecutive };

// Adjacent pair (position i, i+1) in row j against an interleaving.
std::optional<CompatCase> compatible(const ChordSeqSet& rho, const Splicing& s, int i, int j);
// mu-bar at (i,j) together with the induced splicing; only cases (2) and (3).
std::pair<ChordSeqSet, Splicing> compose_at(const ChordSeqSet& rho, const Splicing& s, int i, int j);

bool collidable(const Splicing& s, int k);  // merge columns k, k+1 (0-based k)
Splicing collide(const Splicing& s, int k);

// Splitting (rho, sigma) = (lambda, sigma1) star (delta, sigma2); cut[j] is
// the prefix length of row j taken by lambda.
struct Split {
    ChordSeqSet lambda, delta;
    Splicing sigma1, sigma2;
    std::vector<int> cut;
    int col_cut = 0;
};
std::vector<Split> enumerate_splits(const ChordSeqSet& rho, const Splicing& s);

// (boat) star (anchor) = (rho, sigma); the anchor takes the last k columns and
// begins with a jumping chord in some row (empty anchor only at k = 0).
struct Shipping {
    ChordSeqSet boat_rho, anchor_rho;
    Splicing boat_sigma, anchor_sigma;
    std::vector<int> cut;  // per-row boat prefix length
    int k = 0;

    friend bool operator==(const Shipping&, const Shipping&) = default;
};
std::vector<Shipping> enumerate_shippings(const ChordSeqSet& rho, const Splicing& s, int k);
// True when the second shipping anchors one more column of the same (rho, sigma).
bool splays(const Shipping& lower, const Shipping& higher);

// Text forms: chords '.'-joined, boundaries ' | '-joined, '-' for an empty row.
std::string format_seq(const ChordSeq& s);
std::string format_seqset(const ChordSeqSet& rho);
ChordSeq parse_seq(std::string_view text);
ChordSeqSet parse_seqset(std::string_view text);
// Column-major occupancy: "[j2][j1.j3]" lists 1-based row indices per column.
std::string format_splicing(const Splicing& s);
Splicing parse_splicing(std::string_view text, int rows);
std::string format_idem_tuples(const std::vector<IdemTuple>& iota);

}  // namespace polycalc::splice
