#pragma once

// Desk-scale certification of net symmetries. Every positive verdict is a
// proof for the truncation on a stated inner window: the candidate map is
// applied to every node and every string piece inside that window and the
// images are required to land on nodes and inside the body, in both the
// forward and the inverse direction. Combined with exact lattice
// normalization this extends a certificate to the infinite periodic net.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "meshforge/common.hpp"
#include "meshforge/exact.hpp"
#include "meshforge/netlib.hpp"

namespace meshforge::symmetry {

using exact::ExactScalar;
using exact::LineKey;
using exact::Mat;
using exact::Point;
using exact::ScaledIsometry;
using exact::StringGeom;
using exact::StringKind;
using exact::Vec;
using netlib::FigureClass;
using netlib::NetTruncation;

struct CertifiedSymmetry {
    ScaledIsometry map;
    bool certified = false;
    ExactScalar certified_radius;
    bool extends_periodically = false;  // map normalizes the period lattice
    std::string witness;                // human-readable refutation evidence
    std::optional<Point> witness_point;
};

namespace detail {

// exact check that the linear part maps the period lattice onto itself
inline bool normalizes_lattice(const NetTruncation& net, const Mat& M) {
    if (net.periods.empty()) return false;
    Mat P = Mat::zero(net.dim);
    for (int j = 0; j < net.dim; ++j)
        for (int i = 0; i < net.dim; ++i) P.at(i, j) = net.periods[static_cast<std::size_t>(j)][i];
    Mat C = P.inverse() * (M * P);
    for (int i = 0; i < net.dim; ++i)
        for (int j = 0; j < net.dim; ++j) {
            const ExactScalar& e = C.at(i, j);
            if (!e.root_part().is_zero()) return false;
            if (boost::multiprecision::denominator(e.rational_part()) != 1) return false;
        }
    ExactScalar det = C.det();
    return det == ExactScalar(1) || det == ExactScalar(-1);
}

// one-way check of T on the sub-window of radius r: nodes to nodes,
// string pieces into the body
inline bool check_one_way(const NetTruncation& from, const NetTruncation& to, const ScaledIsometry& T,
                          const ExactScalar& r, std::string& witness, std::optional<Point>& wp) {
    for (const auto& nd : from.nodes) {
        if (nd.p.norm_box() > r) continue;
        Point q = T.apply(nd.p);
        if (!to.has_node(q)) {
            witness = "node " + nd.p.str() + " maps to " + q.str() + " which is not a node";
            wp = nd.p;
            return false;
        }
    }
    for (const auto& s : from.strings) {
        auto inner = netlib::detail::clip_line_to_box(s.key, r);
        if (!inner) continue;
        ExactScalar lo = exact::max(s.lo, inner->first);
        ExactScalar hi = exact::min(s.hi, inner->second);
        if (!(lo <= hi)) continue;
        Point a = T.apply(s.key.point_at(lo));
        Point b = T.apply(s.key.point_at(hi));
        bool ok = (a == b) ? to.covers_point(a) : to.covers_segment(a, b);
        if (!ok) {
            witness = "string piece " + s.key.point_at(lo).str() + " .. " + s.key.point_at(hi).str() +
                      " maps outside the body";
            wp = s.key.point_at(lo);
            return false;
        }
    }
    return true;
}

}  // namespace detail

namespace detail {

inline Mat period_matrix_of(const NetTruncation& net) {
    Mat P = Mat::zero(net.dim);
    for (int j = 0; j < net.dim; ++j)
        for (int i = 0; i < net.dim; ++i) P.at(i, j) = net.periods[static_cast<std::size_t>(j)][i];
    return P;
}

// translate p by a lattice vector so its lattice coordinates land in [0,1)
inline Point lattice_reduce(const NetTruncation& net, const Mat& P, const Mat& Pinv, const Point& p) {
    Vec coords = Pinv.apply(p);
    Point out = p;
    for (int j = 0; j < net.dim; ++j) {
        exact::BigInt f = netlib::exact_floor(coords[j]);
        if (f != 0)
            out = out - ExactScalar(exact::Rational(f)) * net.periods[static_cast<std::size_t>(j)];
    }
    return out;
}

enum class PeriodicVerdict { Certified, Refuted, WindowTooSmall };

// Certificate against the infinite periodic net: with the lattice exactly
// normalized by the linear part, checking one representative per node class
// and per string class proves the map on everything (images of lattice
// translates are lattice translates of images). Every probe must stay in
// the zone of the window where the truncation is reliable; when it cannot,
// the caller falls back to sub-window verification.
inline PeriodicVerdict periodic_check(const NetTruncation& net, const Mat& P, const Mat& Pinv,
                                      const ScaledIsometry& T, std::string& witness,
                                      std::optional<Point>& wp) {
    const ExactScalar node_safe = net.window - net.boundary_margin();
    std::set<int> node_classes, string_classes;
    for (const auto& nd : net.nodes)
        if (!node_classes.count(nd.class_tag)) {
            node_classes.insert(nd.class_tag);
            Point q = lattice_reduce(net, P, Pinv, T.apply(nd.p));
            if (q.norm_box() > node_safe) return PeriodicVerdict::WindowTooSmall;
            if (!net.has_node(q)) {
                witness = "node " + nd.p.str() + " maps to the non-node class point " + q.str();
                wp = nd.p;
                return PeriodicVerdict::Refuted;
            }
        }
    for (const auto& s : net.strings) {
        if (string_classes.count(s.class_tag)) continue;
        string_classes.insert(s.class_tag);
        Point a, b;
        if (s.source_kind == StringKind::Line) {
            // image line, reduced; a covered chunk of one lattice period
            // along the image direction extends by periodicity
            Vec dir = T.linear.apply(s.step);
            auto ls = netlib::lattice_step_along(Pinv, net.periods, dir);
            if (!ls) {
                witness = "image line direction has no lattice period";
                return PeriodicVerdict::Refuted;
            }
            a = lattice_reduce(net, P, Pinv, T.apply(s.key.point_at(s.lo)));
            b = a + ls->step;
        } else {
            Point ia = T.apply(s.key.point_at(s.lo));
            Point ib = T.apply(s.key.point_at(s.hi));
            a = lattice_reduce(net, P, Pinv, ia);
            b = ib + (a - ia);
        }
        if (a.norm_box() > net.window || b.norm_box() > net.window)
            return PeriodicVerdict::WindowTooSmall;
        if (!net.covers_segment(a, b)) {
            witness = "image of string class " + std::to_string(s.class_tag) +
                      " is not in the body near " + a.str();
            wp = a;
            return PeriodicVerdict::Refuted;
        }
    }
    return PeriodicVerdict::Certified;
}

}  // namespace detail

// Certify T as a symmetry. When the truncation is the lattice-complete
// closure of its class representatives and T's linear part normalizes the
// period lattice exactly, one fundamental cell is checked and the verdict
// holds for the infinite net. Otherwise T and its inverse are verified on
// the largest sub-window whose images stay clear of clipping artifacts.
inline CertifiedSymmetry certify(const NetTruncation& net, const ScaledIsometry& T,
                                 const ExactScalar& min_radius = ExactScalar(0)) {
    CertifiedSymmetry cs;
    cs.map = T;
    ScaledIsometry Tinv = T.inverse();

    if (net.lattice_complete && !net.periods.empty() && detail::normalizes_lattice(net, T.linear)) {
        Mat P = detail::period_matrix_of(net);
        Mat Pinv = P.inverse();
        auto fwd = detail::periodic_check(net, P, Pinv, T, cs.witness, cs.witness_point);
        if (fwd != detail::PeriodicVerdict::WindowTooSmall) {
            if (fwd == detail::PeriodicVerdict::Refuted) {
                cs.certified_radius = net.window;
                return cs;
            }
            auto bwd = detail::periodic_check(net, P, Pinv, Tinv, cs.witness, cs.witness_point);
            if (bwd != detail::PeriodicVerdict::WindowTooSmall) {
                cs.certified_radius = net.window;
                if (bwd == detail::PeriodicVerdict::Refuted) return cs;
                cs.certified = true;
                cs.extends_periodically = true;
                return cs;
            }
        }
    }

    ExactScalar safe = net.window - net.boundary_margin();
    ExactScalar r_fwd = (safe - T.shift.norm_box()) / T.linear.opnorm_box();
    ExactScalar r_bwd = (safe - Tinv.shift.norm_box()) / Tinv.linear.opnorm_box();
    ExactScalar r = exact::min(exact::min(r_fwd, r_bwd), net.window);
    cs.certified_radius = r;
    if (r.sign() <= 0 || r < min_radius) {
        cs.witness = "window too small to certify";
        return cs;
    }
    if (!detail::check_one_way(net, net, T, r, cs.witness, cs.witness_point)) return cs;
    if (!detail::check_one_way(net, net, Tinv, r, cs.witness, cs.witness_point)) return cs;
    cs.certified = true;
    cs.extends_periodically = detail::normalizes_lattice(net, T.linear);
    return cs;
}

// ---------------------------------------------------------------------------
// candidate generation from ray-figure frames
// ---------------------------------------------------------------------------

namespace detail {

// all scaled-orthogonal linear maps sending the direction multiset `from`
// onto the multiset `to` (norm ratio fixed by the sets); options filter
// orientation and scaling
struct FrameMatchOptions {
    bool allow_reflection = false;
    bool allow_scaling = false;
    bool require_rotation_only = true;  // det +1 and ratio 1
};

inline bool same_direction_multiset(const std::vector<Vec>& image, const std::vector<Vec>& target) {
    if (image.size() != target.size()) return false;
    std::vector<Vec> a = image, b = target;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

inline std::vector<Mat> frame_match_candidates(const std::vector<Vec>& from, const std::vector<Vec>& to,
                                               const FrameMatchOptions& opt) {
    std::vector<Mat> out;
    if (from.empty() || to.empty()) return out;
    const int d = from[0].dim;
    if (from.size() < static_cast<std::size_t>(d - 1)) return out;

    // anchor frame: first direction plus the first non-parallel one
    const Vec& u1 = from[0];
    int u2_idx = -1;
    for (std::size_t i = 1; i < from.size(); ++i)
        if (!u1.parallel(from[i])) {
            u2_idx = static_cast<int>(i);
            break;
        }
    ExactScalar nu1 = u1.norm_sq();

    auto push_candidate = [&](const Mat& M) {
        ExactScalar det = M.det();
        if (det.is_zero()) return;
        auto T = ScaledIsometry::try_from_linear(M, Vec::zero(d));
        if (!T) return;
        if (!opt.allow_reflection && T->orientation < 0) return;
        if (!opt.allow_scaling && !(T->ratio_sq == ExactScalar(1))) return;
        std::vector<Vec> image;
        image.reserve(from.size());
        for (const auto& u : from) image.push_back(M.apply(u));
        if (!same_direction_multiset(image, to)) return;
        for (const auto& seen : out)
            if (seen == M) return;
        out.push_back(M);
    };

    if (d == 2) {
        for (const auto& v1 : to) {
            ExactScalar nv1 = v1.norm_sq();
            if (!opt.allow_scaling && !(nv1 == nu1)) continue;
            // rotation taking u1 to v1 (composed with the norm ratio)
            ExactScalar c = u1.dot(v1) / nu1;
            ExactScalar s = u1.cross2(v1) / nu1;
            Mat M = Mat::zero(2);
            M.at(0, 0) = c;
            M.at(0, 1) = -s;
            M.at(1, 0) = s;
            M.at(1, 1) = c;
            push_candidate(M);
            if (opt.allow_reflection) {
                // reflection taking u1 to v1: columns solve M u1 = v1 with
                // mirrored second axis
                Mat R = Mat::zero(2);
                R.at(0, 0) = c;
                R.at(0, 1) = s;
                R.at(1, 0) = s;
                R.at(1, 1) = -c;
                push_candidate(R);
            }
        }
        return out;
    }

    if (u2_idx < 0) return out;
    const Vec& u2 = from[static_cast<std::size_t>(u2_idx)];
    Vec u3 = u1.cross3(u2);
    Mat U = Mat::from_cols({u1, u2, u3});
    Mat Uinv = U.inverse();
    for (const auto& v1 : to)
        for (const auto& v2 : to) {
            if (v1.parallel(v2)) continue;
            if (!opt.allow_scaling) {
                if (!(v1.norm_sq() == u1.norm_sq())) continue;
                if (!(v2.norm_sq() == u2.norm_sq())) continue;
                if (!(u1.dot(u2) == v1.dot(v2))) continue;
            } else {
                // angles must match: cross-ratios of dot products
                if (!(u1.dot(u2) * v1.norm_sq() == v1.dot(v2) * u1.norm_sq())) continue;
            }
            Vec v3 = v1.cross3(v2);
            push_candidate(Mat::from_cols({v1, v2, v3}) * Uinv);
            push_candidate(Mat::from_cols({v1, v2, -v3}) * Uinv);
        }
    return out;
}

inline std::vector<Vec> ray_dirs(const NetTruncation& net, int node_id) {
    std::vector<Vec> dirs;
    for (const auto& r : net.rays_at(node_id)) dirs.push_back(r.dir);
    return dirs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// local rotations (Definition 2.4(iii) machinery)
// ---------------------------------------------------------------------------

// exact rotations fixing the node and preserving its ray-direction set,
// before any certification on the net
inline std::vector<ScaledIsometry> figure_rotations(const NetTruncation& net, int node_id) {
    std::vector<Vec> dirs = detail::ray_dirs(net, node_id);
    detail::FrameMatchOptions opt;  // rotations only
    std::vector<ScaledIsometry> out;
    const Point& p = net.nodes[static_cast<std::size_t>(node_id)].p;
    for (const auto& M : detail::frame_match_candidates(dirs, dirs, opt)) {
        Vec t = p - M.apply(p);
        out.push_back(ScaledIsometry::from_linear(M, t));
    }
    return out;
}

// rotations of the ray figure certified (or refuted) as net symmetries
inline std::vector<CertifiedSymmetry> local_rotations(const NetTruncation& net, int node_id,
                                                      const ExactScalar& min_radius = ExactScalar(0)) {
    std::vector<CertifiedSymmetry> out;
    for (const auto& T : figure_rotations(net, node_id)) out.push_back(certify(net, T, min_radius));
    bool any_radius = false;
    for (const auto& cs : out) any_radius |= cs.certified || cs.witness != "window too small to certify";
    if (!out.empty() && !any_radius) throw Error(net.name + ": window too small to certify any rotation");
    return out;
}

struct ConditionIII {
    bool holds = true;
    std::optional<CertifiedSymmetry> witness;  // a figure rotation refuted on the net
    int rotations_checked = 0;
};

inline ConditionIII condition_rotations(const NetTruncation& net, int node_id,
                                        const ExactScalar& min_radius = ExactScalar(0)) {
    ConditionIII res;
    for (const auto& cs : local_rotations(net, node_id, min_radius)) {
        ++res.rotations_checked;
        if (!cs.certified) {
            res.holds = false;
            res.witness = cs;
            return res;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// transitivity
// ---------------------------------------------------------------------------

struct TransitivityReport {
    bool transitive = true;
    std::vector<CertifiedSymmetry> class_maps;  // one per ordered class pair (by class index)
    std::string witness;
};

namespace detail {

inline std::vector<int> class_anchor_nodes(const NetTruncation& net) {
    std::map<int, int> anchors;  // class tag -> node id
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        int tag = net.nodes[i].class_tag;
        auto it = anchors.find(tag);
        if (it == anchors.end()) {
            anchors[tag] = static_cast<int>(i);
            continue;
        }
        const Point& cur = net.nodes[static_cast<std::size_t>(it->second)].p;
        const Point& cand = net.nodes[i].p;
        ExactScalar cn = cur.norm_box(), an = cand.norm_box();
        if (an < cn || (an == cn && cand < cur)) it->second = static_cast<int>(i);
    }
    std::vector<int> out;
    for (auto& [tag, id] : anchors) out.push_back(id);
    return out;
}

}  // namespace detail

// for each ordered pair of node translation classes find a certified
// isometry carrying one anchor to the other (translations first, then
// frame-matched translation-rotations)
inline TransitivityReport check_transitive(const NetTruncation& net,
                                           const ExactScalar& min_radius = ExactScalar(0),
                                           bool allow_reflection = false) {
    TransitivityReport rep;
    auto anchors = detail::class_anchor_nodes(net);
    for (int a : anchors) {
        for (int b : anchors) {
            const Point& pa = net.nodes[static_cast<std::size_t>(a)].p;
            const Point& pb = net.nodes[static_cast<std::size_t>(b)].p;
            std::vector<ScaledIsometry> candidates;
            candidates.push_back(ScaledIsometry::translation(pb - pa));
            detail::FrameMatchOptions opt;
            opt.allow_reflection = allow_reflection;
            opt.require_rotation_only = !allow_reflection;
            auto da = detail::ray_dirs(net, a);
            auto db = detail::ray_dirs(net, b);
            for (const auto& M : detail::frame_match_candidates(da, db, opt))
                candidates.push_back(ScaledIsometry::from_linear(M, pb - M.apply(pa)));
            CertifiedSymmetry best;
            bool found = false;
            for (const auto& T : candidates) {
                CertifiedSymmetry cs = certify(net, T, min_radius);
                if (cs.certified) {
                    best = cs;
                    found = true;
                    break;
                }
                if (!found) best = cs;
            }
            rep.class_maps.push_back(best);
            if (!found) {
                rep.transitive = false;
                rep.witness = "no certified isometry carries class anchor " + pa.str() + " to " + pb.str();
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// regularity
// ---------------------------------------------------------------------------

struct RegularityReport {
    std::string net_name;
    bool transitive = false;
    std::vector<FigureClass> class_figures;
    std::vector<int> class_degrees;
    FigureClass figure = FigureClass::Other;
    bool figure_regular = false;
    bool condition_iii = false;
    bool relatively_dense = false;  // periodic full-rank truncations: certified by construction
    bool regular = false;
    std::string reason;
    ExactScalar certification_radius;
    std::string condition_iii_witness;
    std::string transitivity_witness;
};

inline RegularityReport is_regular(const NetTruncation& net,
                                   const ExactScalar& min_radius = ExactScalar(0)) {
    RegularityReport rep;
    rep.net_name = net.name;
    rep.certification_radius = net.window;

    auto anchors = detail::class_anchor_nodes(net);
    if (anchors.empty()) {
        rep.reason = "empty truncation";
        return rep;
    }
    for (int a : anchors) {
        auto rf = netlib::ray_figure(net, a, ExactScalar(0));
        rep.class_figures.push_back(rf.figure);
        rep.class_degrees.push_back(rf.degree);
    }
    rep.figure = rep.class_figures.front();

    auto trans = check_transitive(net, min_radius);
    rep.transitive = trans.transitive;
    rep.transitivity_witness = trans.witness;
    for (const auto& cs : trans.class_maps)
        if (cs.certified) rep.certification_radius = exact::min(rep.certification_radius, cs.certified_radius);

    bool same_figure = true;
    for (const auto& f : rep.class_figures) same_figure &= f == rep.figure;
    rep.figure_regular = same_figure && netlib::figure_is_regular(rep.figure);

    auto ciii = condition_rotations(net, anchors.front(), min_radius);
    rep.condition_iii = ciii.holds;
    if (!ciii.holds && ciii.witness) {
        rep.condition_iii_witness = ciii.witness->witness;
        if (rep.condition_iii_witness.empty()) rep.condition_iii_witness = "figure rotation refuted";
    }

    rep.relatively_dense = !net.periods.empty();

    if (!rep.transitive) {
        rep.reason = "not transitive";
    } else if (!same_figure) {
        rep.reason = "node classes have different vertex figures";
    } else if (!rep.figure_regular) {
        rep.reason = std::string("vertex figure ") + netlib::figure_name(rep.figure) + " is not regular";
    } else if (!rep.condition_iii) {
        rep.reason = "a vertex-figure rotation is not a net symmetry";
    } else if (!rep.relatively_dense) {
        rep.reason = "not periodic";
    } else {
        rep.regular = true;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// congruence / conformal isomorphism between truncations
// ---------------------------------------------------------------------------

struct CongruenceResult {
    enum class Kind { Equivalent, Distinct, DistinctUpToRadius, Inconclusive };
    Kind kind = Kind::Inconclusive;
    std::optional<ScaledIsometry> map;
    ExactScalar certified_radius;
    std::string detail;  // invariant witness or search summary
};

namespace detail {

inline bool two_way_certify(const NetTruncation& A, const NetTruncation& B, const ScaledIsometry& T,
                            const ExactScalar& r, std::string& witness) {
    std::optional<Point> wp;
    if (!check_one_way(A, B, T, r, witness, wp)) return false;
    ScaledIsometry Tinv = T.inverse();
    ExactScalar r_b = (A.window - Tinv.shift.norm_box()) / Tinv.linear.opnorm_box();
    r_b = exact::min(r_b, B.window);
    if (r_b.sign() <= 0) {
        witness = "window too small for the inverse check";
        return false;
    }
    if (!check_one_way(B, A, Tinv, r_b, witness, wp)) return false;
    return true;
}

inline std::vector<ExactScalar> length_spectrum(const NetTruncation& net) {
    std::set<ExactScalar> lens;
    for (const auto& s : net.strings) lens.insert(s.step.norm_sq());
    return {lens.begin(), lens.end()};
}

}  // namespace detail

inline CongruenceResult congruent(const NetTruncation& A, const NetTruncation& B,
                                  const ExactScalar& min_radius, bool allow_scaling,
                                  bool allow_reflection) {
    CongruenceResult res;

    auto anchors_a = detail::class_anchor_nodes(A);
    auto anchors_b = detail::class_anchor_nodes(B);
    if (anchors_a.empty() || anchors_b.empty()) {
        res.detail = "empty truncation";
        return res;
    }

    // cheap invariants first
    {
        std::multiset<int> da, db;
        std::multiset<std::pair<int, int>> fa, fb;  // (degree, figure)
        for (int a : anchors_a) {
            auto rf = netlib::ray_figure(A, a, ExactScalar(0));
            da.insert(rf.degree);
            fa.insert({rf.degree, static_cast<int>(rf.figure)});
        }
        for (int b : anchors_b) {
            auto rf = netlib::ray_figure(B, b, ExactScalar(0));
            db.insert(rf.degree);
            fb.insert({rf.degree, static_cast<int>(rf.figure)});
        }
        if (da != db) {
            res.kind = CongruenceResult::Kind::Distinct;
            res.detail = "degree multisets differ";
            return res;
        }
        if (fa != fb) {
            res.kind = CongruenceResult::Kind::Distinct;
            res.detail = "vertex figure classes differ";
            return res;
        }
        if (!allow_scaling) {
            auto la = detail::length_spectrum(A);
            auto lb = detail::length_spectrum(B);
            if (la != lb) {
                res.kind = CongruenceResult::Kind::Distinct;
                res.detail = "internodal length spectra differ";
                return res;
            }
        }
    }

    // frame-matched candidates from the first anchor of A to every anchor of B
    int a0 = anchors_a.front();
    const Point& pa = A.nodes[static_cast<std::size_t>(a0)].p;
    auto da = detail::ray_dirs(A, a0);
    detail::FrameMatchOptions opt;
    opt.allow_reflection = allow_reflection;
    opt.allow_scaling = allow_scaling;
    int candidates_tried = 0;
    for (int b : anchors_b) {
        const Point& pb = B.nodes[static_cast<std::size_t>(b)].p;
        auto db = detail::ray_dirs(B, b);
        for (const auto& M : detail::frame_match_candidates(da, db, opt)) {
            ScaledIsometry T = ScaledIsometry::from_linear(M, pb - M.apply(pa));
            ++candidates_tried;
            ExactScalar r_fwd = (B.window - T.shift.norm_box()) / T.linear.opnorm_box();
            ExactScalar r = exact::min(exact::min(r_fwd, A.window), B.window);
            if (r < min_radius || r.sign() <= 0) continue;
            std::string witness;
            if (detail::two_way_certify(A, B, T, r, witness)) {
                res.kind = CongruenceResult::Kind::Equivalent;
                res.map = T;
                res.certified_radius = r;
                return res;
            }
        }
    }
    if (candidates_tried > 0) {
        res.kind = CongruenceResult::Kind::DistinctUpToRadius;
        res.detail = "all " + std::to_string(candidates_tried) +
                     " frame-matched candidates refuted on the window";
    } else {
        res.kind = CongruenceResult::Kind::Inconclusive;
        res.detail = "no candidate maps (incompatible ray frames)";
    }
    return res;
}

// ---------------------------------------------------------------------------
// chirality of the double ray figure
// ---------------------------------------------------------------------------

struct ChiralityResult {
    bool chiral = false;           // no proper rigid motion maps the mirror image back
    int candidates_checked = 0;
    std::string detail;
};

// The double ray figure of an edge (p, q): both nodes with all their
// outgoing internodal steps, held as an exact labelled point configuration.
// Chirality is decided exactly: every proper rigid motion candidate (built
// by matching the node pair and ray frames) is tested for mapping the
// mirrored configuration onto the original.
inline ChiralityResult double_ray_figure_chiral(const NetTruncation& net, int node_p, int node_q) {
    const Point& p = net.nodes[static_cast<std::size_t>(node_p)].p;
    const Point& q = net.nodes[static_cast<std::size_t>(node_q)].p;
    auto dirs_p = detail::ray_dirs(net, node_p);
    auto dirs_q = detail::ray_dirs(net, node_q);

    auto config_points = [&](const ScaledIsometry& T) {
        std::set<Point> pts;
        Point tp = T.apply(p), tq = T.apply(q);
        pts.insert(tp);
        pts.insert(tq);
        for (const auto& d : dirs_p) pts.insert(tp + T.linear.apply(d));
        for (const auto& d : dirs_q) pts.insert(tq + T.linear.apply(d));
        return pts;
    };

    ScaledIsometry mirror = ScaledIsometry::mirror_x(net.dim);
    std::set<Point> original = config_points(ScaledIsometry::identity(net.dim));

    // mirrored configuration data
    Point mp = mirror.apply(p), mq = mirror.apply(q);
    std::vector<Vec> mdirs_p, mdirs_q;
    for (const auto& d : dirs_p) mdirs_p.push_back(mirror.linear.apply(d));
    for (const auto& d : dirs_q) mdirs_q.push_back(mirror.linear.apply(d));
    std::set<Point> mirrored;
    mirrored.insert(mp);
    mirrored.insert(mq);
    for (const auto& d : mdirs_p) mirrored.insert(mp + d);
    for (const auto& d : mdirs_q) mirrored.insert(mq + d);

    ChiralityResult res;
    detail::FrameMatchOptions opt;  // proper rotations only
    // try to take the mirrored pair onto (p,q) or (q,p)
    struct Try {
        Point from_anchor;
        const std::vector<Vec>* from_dirs;
        Point to_anchor;
        const std::vector<Vec>* to_dirs;
    };
    std::vector<Try> tries = {
        {mp, &mdirs_p, p, &dirs_p},
        {mp, &mdirs_p, q, &dirs_q},
        {mq, &mdirs_q, p, &dirs_p},
        {mq, &mdirs_q, q, &dirs_q},
    };
    for (const auto& t : tries) {
        for (const auto& M : detail::frame_match_candidates(*t.from_dirs, *t.to_dirs, opt)) {
            ScaledIsometry T = ScaledIsometry::from_linear(M, t.to_anchor - M.apply(t.from_anchor));
            ++res.candidates_checked;
            std::set<Point> moved;
            for (const auto& x : mirrored) moved.insert(T.apply(x));
            if (moved == original) {
                res.chiral = false;
                res.detail = "a proper rigid motion maps the mirror image onto the double ray figure";
                return res;
            }
        }
    }
    res.chiral = true;
    res.detail = "no proper rigid motion maps the mirrored double ray figure back (" +
                 std::to_string(res.candidates_checked) + " candidates checked exactly)";
    return res;
}

// convenience: pick an interior edge of the truncation
inline std::pair<int, int> interior_edge(const NetTruncation& net, const ExactScalar& margin) {
    for (std::size_t sid = 0; sid < net.strings.size(); ++sid) {
        const auto& s = net.strings[sid];
        for (std::size_t i = 0; i + 1 < s.node_ids.size(); ++i) {
            int u = s.node_ids[i], v = s.node_ids[i + 1];
            if (net.is_interior(u, margin) && net.is_interior(v, margin)) return {u, v};
        }
    }
    throw Error(net.name + ": no interior edge found");
}

// ---------------------------------------------------------------------------
// strong transitivity probe (pairs of nodes on strings)
// ---------------------------------------------------------------------------

// Exact membership oracle for the infinite object a truncation approximates.
// When absent, certification falls back to the truncation body itself.
struct BodyOracle {
    std::function<bool(const Point&)> is_node;
    std::function<bool(const Point&, const Point&)> covers_segment;
};

struct StrongTransitivityCheck {
    bool certified = false;
    ScaledIsometry map;
    std::string witness;
};

// the dilation-plus-rotation forced by sending the string pair (p1, p1') to
// (p2, p2'); in two dimensions the linear part is the scaled rotation
// (or scaled reflection) taking u = p1'-p1 to v = p2'-p2
inline StrongTransitivityCheck strongly_transitive_pair(const NetTruncation& net, const Point& p1,
                                                        const Point& p1p, const Point& p2,
                                                        const Point& p2p,
                                                        const BodyOracle* oracle = nullptr) {
    if (net.dim != 2) throw Error("strongly_transitive_pair: implemented for planar meshes");
    StrongTransitivityCheck res;
    Vec u = p1p - p1, v = p2p - p2;
    if (u.is_zero() || v.is_zero()) throw Error("strongly_transitive_pair: degenerate pair");
    ExactScalar nu = u.norm_sq();
    std::vector<Mat> candidates;
    {
        ExactScalar c = u.dot(v) / nu;
        ExactScalar s = u.cross2(v) / nu;
        Mat M = Mat::zero(2);
        M.at(0, 0) = c;
        M.at(0, 1) = -s;
        M.at(1, 0) = s;
        M.at(1, 1) = c;
        candidates.push_back(M);
        Mat R = Mat::zero(2);
        R.at(0, 0) = c;
        R.at(0, 1) = s;
        R.at(1, 0) = s;
        R.at(1, 1) = -c;
        candidates.push_back(R);
    }
    for (const auto& M : candidates) {
        auto T0 = ScaledIsometry::try_from_linear(M, p2 - M.apply(p1));
        if (!T0) continue;
        const ScaledIsometry& T = *T0;
        if (!(T.apply(p1p) == p2p)) continue;
        if (oracle) {
            bool ok = true;
            std::string witness;
            for (const auto& nd : net.nodes) {
                Point img = T.apply(nd.p);
                if (!oracle->is_node(img)) {
                    ok = false;
                    witness = "node " + nd.p.str() + " maps to " + img.str() + " outside the mesh";
                    break;
                }
            }
            if (ok)
                for (const auto& s : net.strings) {
                    Point a = T.apply(s.point_lo()), b = T.apply(s.point_hi());
                    if (!oracle->covers_segment(a, b)) {
                        ok = false;
                        witness = "string image not inside the mesh body";
                        break;
                    }
                }
            if (ok) {
                res.certified = true;
                res.map = T;
                return res;
            }
            res.witness = witness;
        } else {
            CertifiedSymmetry cs = certify(net, T);
            if (cs.certified) {
                res.certified = true;
                res.map = T;
                return res;
            }
            res.witness = cs.witness;
        }
    }
    if (res.witness.empty()) res.witness = "no scaled isometry matches the pair";
    return res;
}

}  // namespace meshforge::symmetry
