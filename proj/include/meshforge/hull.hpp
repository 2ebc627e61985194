#pragma once

// Minimal disjoint covers of closed-interval families, the epsilon-chain
// relation used as their defining oracle, and the minimal extension of a
// net by a finitely generated scaling group, computed per line by merging
// colinear scaled strings through the interval cover.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "meshforge/common.hpp"
#include "meshforge/exact.hpp"
#include "meshforge/netlib.hpp"

namespace meshforge::hull {

using exact::ExactScalar;
using exact::LineKey;
using exact::LineKeyHash;
using exact::Point;
using exact::StringGeom;
using exact::StringKind;
using exact::Vec;
using exact::VecHash;

struct Interval {
    ExactScalar lo, hi;  // closed, nondegenerate: lo < hi
};

struct IntervalFamily {
    std::vector<Interval> intervals;

    void validate() const {
        for (const auto& iv : intervals)
            if (!(iv.lo < iv.hi)) throw Error("IntervalFamily: degenerate interval");
    }
};

// separation distance of two closed intervals (0 when they intersect)
inline ExactScalar separation(const Interval& a, const Interval& b) {
    ExactScalar gap1 = b.lo - a.hi;  // b to the right
    ExactScalar gap2 = a.lo - b.hi;  // a to the right
    ExactScalar g = exact::max(gap1, gap2);
    return g.sign() > 0 ? g : ExactScalar(0);
}

inline ExactScalar separation(const ExactScalar& x, const Interval& b) {
    return separation(Interval{x, x}, b);  // point treated as [x,x] here only
}

struct CoverResult {
    std::vector<Interval> cover;  // disjoint, ascending
    std::vector<int> class_map;   // input index -> cover index
};

// Minimal disjoint cover of a finite family: convex hulls of the connected
// components of the intersection graph, where closed intervals at
// separation zero (touching) count as intersecting.
inline CoverResult minimal_cover(const IntervalFamily& fam) {
    fam.validate();
    const std::size_t n = fam.intervals.size();
    CoverResult res;
    res.class_map.assign(n, -1);
    if (n == 0) return res;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (fam.intervals[a].lo != fam.intervals[b].lo) return fam.intervals[a].lo < fam.intervals[b].lo;
        return fam.intervals[a].hi < fam.intervals[b].hi;
    });

    std::size_t i = 0;
    while (i < n) {
        ExactScalar lo = fam.intervals[order[i]].lo;
        ExactScalar hi = fam.intervals[order[i]].hi;
        std::size_t j = i;
        while (j + 1 < n && fam.intervals[order[j + 1]].lo <= hi) {
            ++j;
            hi = exact::max(hi, fam.intervals[order[j]].hi);
        }
        int cid = static_cast<int>(res.cover.size());
        for (std::size_t k = i; k <= j; ++k) res.class_map[order[k]] = cid;
        res.cover.push_back({lo, hi});
        i = j + 1;
    }
    return res;
}

struct ChainResult {
    bool connected = false;
    std::vector<int> chain;  // interval indices, in order from x to y
};

// Is there a finite chain I_1 .. I_N in the family with all the separations
// sep({x}, I_1), sep(I_k, I_{k+1}), sep(I_N, {y}) at most eps?  For finite
// closed families the equivalence x ~ y (chains for every eps > 0) holds iff
// a chain exists at eps = 0, which is the oracle minimal_cover is checked
// against.
inline ChainResult epsilon_chain(const IntervalFamily& fam, const ExactScalar& x, const ExactScalar& y,
                                 const ExactScalar& eps) {
    if (eps.sign() < 0) throw Error("epsilon_chain: eps must be >= 0");
    fam.validate();
    ChainResult res;
    if (x == y) {
        res.connected = true;
        return res;
    }
    const std::size_t n = fam.intervals.size();
    std::vector<int> parent(n, -2);  // -2 unvisited, -1 root
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (separation(x, fam.intervals[i]) <= eps) {
            parent[i] = -1;
            queue.push_back(i);
        }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        std::size_t i = queue[qi];
        if (separation(y, fam.intervals[i]) <= eps) {
            for (int cur = static_cast<int>(i); cur >= 0; cur = parent[static_cast<std::size_t>(cur)])
                res.chain.push_back(cur);
            std::reverse(res.chain.begin(), res.chain.end());
            res.connected = true;
            return res;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (parent[j] == -2 && separation(fam.intervals[i], fam.intervals[j]) <= eps) {
                parent[j] = static_cast<int>(i);
                queue.push_back(j);
            }
    }
    return res;
}

// ---------------------------------------------------------------------------
// extension of a net by a scaling group
// ---------------------------------------------------------------------------

struct ExtendReport {
    int lines_merged = 0;             // lines on which the cover fused >= 2 inputs
    int nodes_in = 0;
    int nodes_out = 0;
    int orbit_nodes = 0;              // U-word images of input nodes inside the window
    int extra_intersection_nodes = 0; // output nodes beyond that orbit
    bool node_inclusion_ok = false;   // orbit nodes are all output nodes
    bool u_invariant_ok = false;      // g * (body ∩ inner box) inside body, all generators
    ExactScalar invariance_checked_radius;
    std::vector<ExactScalar> scales_used;
};

struct ExtendResult {
    netlib::NetTruncation net;
    ExtendReport report;
};

namespace detail {

inline std::vector<ExactScalar> scaling_words(const std::vector<ExactScalar>& generators, int word_depth) {
    for (const auto& g : generators)
        if (g.sign() <= 0) throw Error("extend_net: generators must be positive");
    std::set<ExactScalar> words = {ExactScalar(1)};
    for (const auto& g : generators) {
        std::set<ExactScalar> next;
        ExactScalar ginv = ExactScalar(1) / g;
        for (const auto& w : words) {
            ExactScalar up = w, down = w;
            next.insert(w);
            for (int e = 1; e <= word_depth; ++e) {
                up *= g;
                down *= ginv;
                next.insert(up);
                next.insert(down);
            }
        }
        words = std::move(next);
    }
    return {words.begin(), words.end()};
}

}  // namespace detail

inline ExtendResult extend_net(const netlib::NetTruncation& input,
                               const std::vector<ExactScalar>& u_generators, int word_depth,
                               const ExactScalar& R) {
    if (word_depth < 0) throw Error("extend_net: word depth must be >= 0");
    ExtendResult out;
    ExtendReport& rep = out.report;
    rep.scales_used = detail::scaling_words(u_generators, word_depth);

    // scaled images of the input strings, merged per line by the minimal cover
    struct PerLine {
        IntervalFamily fam;
        std::vector<StringKind> kinds;
    };
    std::map<LineKey, PerLine> per_line;
    for (const auto& u : rep.scales_used) {
        for (const auto& s : input.strings) {
            Point a = u * s.point_lo();
            Point b = u * s.point_hi();
            LineKey key = exact::line_key_of(a, b);
            ExactScalar lo, hi;
            if (s.source_kind == StringKind::Line) {
                // the image of a full line is the full line; clip it fresh
                auto box = netlib::detail::clip_line_to_box(key, R);
                if (!box) continue;
                lo = box->first;
                hi = box->second;
            } else {
                auto box = netlib::detail::clip_line_to_box(key, R);
                if (!box) continue;
                ExactScalar ta = key.param_of(a), tb = key.param_of(b);
                lo = exact::max(exact::min(ta, tb), box->first);
                hi = exact::min(exact::max(ta, tb), box->second);
                if (!(lo < hi)) continue;
            }
            auto& pl = per_line[key];
            pl.fam.intervals.push_back({lo, hi});
            pl.kinds.push_back(s.source_kind);
        }
    }

    netlib::NetTruncation& net = out.net;
    net.name = input.name + "_ext";
    net.dim = input.dim;
    net.window = R;
    for (auto& [key, pl] : per_line) {
        // drop exact duplicates before covering (repeated scaled images)
        std::vector<std::pair<Interval, StringKind>> uniq;
        for (std::size_t i = 0; i < pl.fam.intervals.size(); ++i) {
            bool dup = false;
            for (auto& u : uniq)
                if (u.first.lo == pl.fam.intervals[i].lo && u.first.hi == pl.fam.intervals[i].hi) {
                    dup = true;
                    break;
                }
            if (!dup) uniq.push_back({pl.fam.intervals[i], pl.kinds[i]});
        }
        IntervalFamily fam;
        for (auto& u : uniq) fam.intervals.push_back(u.first);
        CoverResult cover = minimal_cover(fam);
        for (std::size_t c = 0; c < cover.cover.size(); ++c) {
            int members = 0;
            bool any_line = false;
            for (std::size_t i = 0; i < fam.intervals.size(); ++i)
                if (cover.class_map[i] == static_cast<int>(c)) {
                    ++members;
                    any_line |= uniq[i].second == StringKind::Line;
                }
            if (members > 1) ++rep.lines_merged;
            netlib::TruncString ts;
            ts.source_kind = any_line ? StringKind::Line : StringKind::Segment;
            ts.class_tag = 0;
            ts.key = key;
            ts.lo = cover.cover[c].lo;
            ts.hi = cover.cover[c].hi;
            // endpoints produced by the window, not by the data
            auto box = netlib::detail::clip_line_to_box(key, R);
            ts.lo_clipped = box && ts.lo == box->first;
            ts.hi_clipped = box && ts.hi == box->second;
            ts.step = key.dir;
            net.strings.push_back(std::move(ts));
        }
    }

    // nodes: pairwise intersections of the merged strings
    netlib::populate_nodes_by_intersection(net);

    // --- report ---
    rep.nodes_in = static_cast<int>(input.nodes.size());
    rep.nodes_out = static_cast<int>(net.nodes.size());
    rep.node_inclusion_ok = true;
    std::set<Point> orbit;
    for (const auto& u : rep.scales_used)
        for (const auto& nd : input.nodes) {
            Point q = u * nd.p;
            if (q.norm_box() <= R) orbit.insert(q);
        }
    for (const auto& q : orbit)
        if (!net.has_node(q)) rep.node_inclusion_ok = false;
    rep.orbit_nodes = static_cast<int>(orbit.size());
    int orbit_hits = 0;
    for (const auto& nd : net.nodes)
        if (orbit.count(nd.p)) ++orbit_hits;
    rep.extra_intersection_nodes = rep.nodes_out - orbit_hits;

    // U-invariance on the inner window: for each generator g and both signs
    // of the exponent, the scaled image of every string piece inside the
    // inner box stays in the body
    ExactScalar max_scale(1);
    for (const auto& g : u_generators) {
        max_scale = exact::max(max_scale, g);
        max_scale = exact::max(max_scale, ExactScalar(1) / g);
    }
    ExactScalar r_inner = R / max_scale;
    rep.invariance_checked_radius = r_inner;
    rep.u_invariant_ok = true;
    std::vector<ExactScalar> gens_both;
    for (const auto& g : u_generators) {
        gens_both.push_back(g);
        gens_both.push_back(ExactScalar(1) / g);
    }
    for (const auto& g : gens_both) {
        for (const auto& s : net.strings) {
            auto inner = netlib::detail::clip_line_to_box(s.key, r_inner);
            if (!inner) continue;
            ExactScalar lo = exact::max(s.lo, inner->first);
            ExactScalar hi = exact::min(s.hi, inner->second);
            if (!(lo <= hi)) continue;
            Point a = g * s.key.point_at(lo);
            Point b = g * s.key.point_at(hi);
            bool ok = (a == b) ? net.covers_point(a) : net.covers_segment(a, b);
            if (!ok) {
                rep.u_invariant_ok = false;
                break;
            }
        }
        if (!rep.u_invariant_ok) break;
    }
    return out;
}

}  // namespace meshforge::hull
