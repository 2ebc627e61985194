#pragma once

// Catalog of periodic string-node nets as motifs (representative nodes and
// strings plus period vectors), window truncations, ray figures and vertex
// figure classification, scaling-inclusion checks, the Sierpinski segment
// net, and the weighted string graph.
//
// Motif convention for the catalog: every string rep is anchored at a node
// and its direction vector is the internodal step, so the nodes on a string
// sit exactly at the integer parameters. Coordinates of the 3D nets stay
// integral (internodal distances sqrt(2) or sqrt(3) are normalized only in
// reports, never in the stored geometry).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "meshforge/common.hpp"
#include "meshforge/exact.hpp"

namespace meshforge::netlib {

using exact::BigInt;
using exact::ExactScalar;
using exact::LineKey;
using exact::LineKeyHash;
using exact::Mat;
using exact::ParamInterval;
using exact::Point;
using exact::Rational;
using exact::ScaledIsometry;
using exact::StringGeom;
using exact::StringKind;
using exact::Vec;
using exact::VecHash;

// ---------------------------------------------------------------------------
// small exact helpers
// ---------------------------------------------------------------------------

inline BigInt exact_floor(const ExactScalar& x) {
    if (x.root_part().is_zero()) {
        BigInt num = boost::multiprecision::numerator(x.rational_part());
        BigInt den = boost::multiprecision::denominator(x.rational_part());
        BigInt q = num / den;
        if (num < 0 && q * den != num) --q;
        return q;
    }
    BigInt f = static_cast<BigInt>(static_cast<long long>(std::floor(x.to_double())));
    while (ExactScalar(Rational(f + 1)) <= x) ++f;
    while (ExactScalar(Rational(f)) > x) --f;
    return f;
}

inline BigInt exact_ceil(const ExactScalar& x) { return -exact_floor(-x); }

inline long long to_ll(const BigInt& v) { return static_cast<long long>(v); }

struct LatticeStep {
    std::array<BigInt, 3> g{};  // primitive integer combination
    Vec step;                   // P * g, parallel to the queried direction
};

// primitive period of the lattice with matrix P along direction dir, if any
inline std::optional<LatticeStep> lattice_step_along(const Mat& Pinv,
                                                     const std::vector<Vec>& periods, const Vec& dir) {
    const int d = dir.dim;
    Vec v = Pinv.apply(dir);
    BigInt lcm_den = 1;
    for (int i = 0; i < d; ++i) {
        if (!v[i].root_part().is_zero()) return std::nullopt;
        lcm_den = boost::multiprecision::lcm(lcm_den,
                                             boost::multiprecision::denominator(v[i].rational_part()));
    }
    LatticeStep out;
    BigInt common = 0;
    for (int i = 0; i < d; ++i) {
        out.g[static_cast<std::size_t>(i)] =
            boost::multiprecision::numerator(v[i].rational_part()) * lcm_den /
            boost::multiprecision::denominator(v[i].rational_part());
        common = boost::multiprecision::gcd(common, out.g[static_cast<std::size_t>(i)]);
    }
    if (common == 0) return std::nullopt;
    out.step = Vec::zero(d);
    for (int i = 0; i < d; ++i) {
        out.g[static_cast<std::size_t>(i)] /= common;
        out.step = out.step + ExactScalar(Rational(out.g[static_cast<std::size_t>(i)])) *
                                  periods[static_cast<std::size_t>(i)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// vertex / ray figure classification
// ---------------------------------------------------------------------------

enum class FigureClass {
    RegularTriangle,
    Square,
    Rectangle,
    RegularHexagon,
    RegularTetrahedron,
    Cube,
    RegularOctahedron,
    Cuboctahedron,
    Other,
};

inline const char* figure_name(FigureClass f) {
    switch (f) {
        case FigureClass::RegularTriangle: return "regular triangle";
        case FigureClass::Square: return "square";
        case FigureClass::Rectangle: return "rectangle";
        case FigureClass::RegularHexagon: return "hexagon";
        case FigureClass::RegularTetrahedron: return "regular tetrahedron";
        case FigureClass::Cube: return "cube";
        case FigureClass::RegularOctahedron: return "regular octahedron";
        case FigureClass::Cuboctahedron: return "cuboctahedron";
        default: return "other";
    }
}

// Regular polygon or regular polyhedron (a polygon figure is admissible in
// dimension 3 as well).
inline bool figure_is_regular(FigureClass f) {
    switch (f) {
        case FigureClass::RegularTriangle:
        case FigureClass::Square:
        case FigureClass::RegularHexagon:
        case FigureClass::RegularTetrahedron:
        case FigureClass::Cube:
        case FigureClass::RegularOctahedron:
            return true;
        default:
            return false;
    }
}

namespace detail {

// Sorted multiset of pairwise cosines (exact, norms divided out). Requires
// all directions of equal squared norm; returns nullopt otherwise.
inline std::optional<std::vector<ExactScalar>> cosine_multiset(const std::vector<Vec>& dirs) {
    if (dirs.empty()) return std::nullopt;
    ExactScalar n0 = dirs[0].norm_sq();
    for (const auto& d : dirs)
        if (!(d.norm_sq() == n0)) return std::nullopt;
    std::vector<ExactScalar> cos;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) cos.push_back(dirs[i].dot(dirs[j]) / n0);
    std::sort(cos.begin(), cos.end());
    return cos;
}

inline int direction_rank(const std::vector<Vec>& dirs) {
    // exact rank over the field; dirs nonzero
    std::vector<Vec> basis;
    for (const auto& d : dirs) {
        Vec v = d;
        for (const auto& b : basis) {
            // eliminate the pivot of b from v
            int piv = -1;
            for (int i = 0; i < b.dim; ++i)
                if (!b[i].is_zero()) {
                    piv = i;
                    break;
                }
            if (piv >= 0 && !v[piv].is_zero()) v = v - (v[piv] / b[piv]) * b;
        }
        if (!v.is_zero()) basis.push_back(v);
    }
    return static_cast<int>(basis.size());
}

inline std::vector<Vec> reference_dirs(FigureClass f) {
    const ExactScalar h = ExactScalar::of(1, 2);
    const ExactScalar r = ExactScalar::rt3(1, 2);
    switch (f) {
        case FigureClass::RegularTriangle:
            return {Vec(ExactScalar(1), ExactScalar(0)), Vec(-h, r), Vec(-h, -r)};
        case FigureClass::Square:
            return {Vec::of2(1, 0), Vec::of2(-1, 0), Vec::of2(0, 1), Vec::of2(0, -1)};
        case FigureClass::RegularHexagon:
            return {Vec(ExactScalar(1), ExactScalar(0)), Vec(h, r), Vec(-h, r),
                    Vec(ExactScalar(-1), ExactScalar(0)), Vec(-h, -r), Vec(h, -r)};
        case FigureClass::RegularTetrahedron:
            return {Vec::of3(1, 1, 1), Vec::of3(1, -1, -1), Vec::of3(-1, 1, -1), Vec::of3(-1, -1, 1)};
        case FigureClass::RegularOctahedron:
            return {Vec::of3(1, 0, 0), Vec::of3(-1, 0, 0), Vec::of3(0, 1, 0),
                    Vec::of3(0, -1, 0), Vec::of3(0, 0, 1), Vec::of3(0, 0, -1)};
        case FigureClass::Cube: {
            std::vector<Vec> v;
            for (int sx : {1, -1})
                for (int sy : {1, -1})
                    for (int sz : {1, -1}) v.push_back(Vec::of3(sx, sy, sz));
            return v;
        }
        case FigureClass::Cuboctahedron: {
            std::vector<Vec> v;
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    v.push_back(Vec::of3(s1, s2, 0));
                    v.push_back(Vec::of3(s1, 0, s2));
                    v.push_back(Vec::of3(0, s1, s2));
                }
            return v;
        }
        default:
            return {};
    }
}

}  // namespace detail

// Decide the figure class of a set of equal-length ray directions by the
// exact multiset of pairwise cosines (equivalently squared chord distances),
// plus a planarity check for polygon figures sitting in R^3.
inline FigureClass classify_figure(const std::vector<Vec>& dirs) {
    auto cos = detail::cosine_multiset(dirs);
    if (!cos) return FigureClass::Other;
    const int rank = detail::direction_rank(dirs);
    auto matches = [&](FigureClass f) {
        auto ref = detail::reference_dirs(f);
        if (ref.size() != dirs.size()) return false;
        auto rcos = detail::cosine_multiset(ref);
        return rcos && *rcos == *cos;
    };
    if (rank <= 2) {
        if (matches(FigureClass::RegularTriangle)) return FigureClass::RegularTriangle;
        if (matches(FigureClass::Square)) return FigureClass::Square;
        if (matches(FigureClass::RegularHexagon)) return FigureClass::RegularHexagon;
        // general rectangle: two antipodal pairs at a non-right angle
        if (dirs.size() == 4) {
            int antipodal = 0;
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = i + 1; j < 4; ++j)
                    if ((dirs[i] + dirs[j]).is_zero()) ++antipodal;
            if (antipodal == 2) return FigureClass::Rectangle;
        }
        return FigureClass::Other;
    }
    if (matches(FigureClass::RegularTetrahedron)) return FigureClass::RegularTetrahedron;
    if (matches(FigureClass::RegularOctahedron)) return FigureClass::RegularOctahedron;
    if (matches(FigureClass::Cube)) return FigureClass::Cube;
    if (matches(FigureClass::Cuboctahedron)) return FigureClass::Cuboctahedron;
    return FigureClass::Other;
}

// ---------------------------------------------------------------------------
// Motif
// ---------------------------------------------------------------------------

struct Motif {
    std::string name;
    int dim = 2;
    std::vector<Point> node_reps;
    std::vector<StringGeom> string_reps;  // lines for linear nets, unit edges for segment nets
    std::vector<Vec> periods;

    Mat period_matrix() const {
        Mat P = Mat::zero(dim);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) P.at(i, j) = periods[static_cast<std::size_t>(j)][i];
        return P;
    }

    void validate() const {
        if (static_cast<int>(periods.size()) != dim) throw Error(name + ": need d period vectors");
        if (period_matrix().det().is_zero()) throw Error(name + ": rank-deficient periods");
        if (node_reps.empty() || string_reps.empty()) throw Error(name + ": empty motif");
        // node reps pairwise inequivalent under the period lattice
        Mat Pinv = period_matrix().inverse();
        for (std::size_t i = 0; i < node_reps.size(); ++i)
            for (std::size_t j = i + 1; j < node_reps.size(); ++j) {
                Vec k = Pinv.apply(node_reps[i] - node_reps[j]);
                bool integral = true;
                for (int c = 0; c < dim; ++c) {
                    const ExactScalar& t = k[c];
                    if (!t.root_part().is_zero() ||
                        boost::multiprecision::denominator(t.rational_part()) != 1)
                        integral = false;
                }
                if (integral) throw Error(name + ": node reps equivalent under lattice");
            }
    }

    bool is_linear() const {
        for (const auto& s : string_reps)
            if (s.kind != StringKind::Line) return false;
        return true;
    }
};

inline Motif transform_motif(const Motif& m, const ScaledIsometry& T) {
    Motif out = m;
    out.name = m.name + "'";
    for (auto& p : out.node_reps) p = T.apply(p);
    for (auto& s : out.string_reps) s = T.apply(s);
    for (auto& v : out.periods) v = T.linear.apply(v);
    return out;
}

inline Motif mirror_motif(const Motif& m) {
    Motif out = transform_motif(m, ScaledIsometry::mirror_x(m.dim));
    out.name = m.name + "_mirror";
    return out;
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

namespace detail {

inline Vec v2(long long x, long long y) { return Vec::of2(x, y); }
inline Vec v3(long long x, long long y, long long z) { return Vec::of3(x, y, z); }

inline Motif make_tri() {
    Motif m;
    m.name = "tri";
    m.dim = 2;
    const ExactScalar h = ExactScalar::of(1, 2);
    const ExactScalar r = ExactScalar::rt3(1, 2);
    m.node_reps = {v2(0, 0)};
    m.periods = {v2(1, 0), Vec(h, r)};
    m.string_reps = {
        StringGeom::line(v2(0, 0), v2(1, 0)),
        StringGeom::line(v2(0, 0), Vec(h, r)),
        StringGeom::line(v2(0, 0), Vec(-h, r)),
    };
    return m;
}

inline Motif make_Z2() {
    Motif m;
    m.name = "Z2";
    m.dim = 2;
    m.node_reps = {v2(0, 0)};
    m.periods = {v2(1, 0), v2(0, 1)};
    m.string_reps = {
        StringGeom::line(v2(0, 0), v2(1, 0)),
        StringGeom::line(v2(0, 0), v2(0, 1)),
    };
    return m;
}

// Kagome lines in standard position: the x-axis is a string with nodes at
// the integers; positive-slope strings cross the x-axis at even integers,
// negative-slope strings at odd integers, horizontals at y in sqrt(3) Z.
inline Motif make_kag() {
    Motif m;
    m.name = "kag";
    m.dim = 2;
    const ExactScalar h = ExactScalar::of(1, 2);
    const ExactScalar r = ExactScalar::rt3(1, 2);
    m.node_reps = {v2(0, 0), v2(1, 0), Vec(h, r)};
    m.periods = {v2(2, 0), Vec(ExactScalar(1), ExactScalar::rt3())};
    m.string_reps = {
        StringGeom::line(v2(0, 0), v2(1, 0)),
        StringGeom::line(v2(0, 0), Vec(h, r)),
        StringGeom::line(v2(1, 0), Vec(ExactScalar(1) - h, r)),
    };
    return m;
}

inline Motif make_hex() {
    Motif m;
    m.name = "hex";
    m.dim = 2;
    const ExactScalar h = ExactScalar::of(1, 2);
    const ExactScalar r = ExactScalar::rt3(1, 2);
    m.node_reps = {v2(0, 0), v2(1, 0)};
    m.periods = {Vec(ExactScalar::of(3, 2), r), Vec(ExactScalar(0), ExactScalar::rt3())};
    m.string_reps = {
        StringGeom::segment(v2(0, 0), v2(1, 0)),
        StringGeom::segment(v2(0, 0), Vec(-h, r)),
        StringGeom::segment(v2(0, 0), Vec(-h, -r)),
    };
    return m;
}

inline Motif make_Z3() {
    Motif m;
    m.name = "Z3";
    m.dim = 3;
    m.node_reps = {v3(0, 0, 0)};
    m.periods = {v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)};
    m.string_reps = {
        StringGeom::line(v3(0, 0, 0), v3(1, 0, 0)),
        StringGeom::line(v3(0, 0, 0), v3(0, 1, 0)),
        StringGeom::line(v3(0, 0, 0), v3(0, 0, 1)),
    };
    return m;
}

// Scaffolding net: 6 nodes and 6 lines per (2,0,0),(0,2,0),(0,0,2) cell.
// Axis lines at x:(y,z)=(0,0),(1,1); y:(x,z)=(0,0),(1,1);
// z:(x,y)=(1,0),(0,1) modulo 2. Every node lies on exactly two orthogonal
// lines, and the body-centring translation (1,1,1) is a symmetry.
inline Motif make_Scaff() {
    Motif m;
    m.name = "Scaff";
    m.dim = 3;
    m.node_reps = {v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(0, 1, 1), v3(1, 0, 1), v3(1, 1, 1)};
    m.periods = {v3(2, 0, 0), v3(0, 2, 0), v3(0, 0, 2)};
    m.string_reps = {
        StringGeom::line(v3(0, 0, 0), v3(1, 0, 0)),
        StringGeom::line(v3(0, 1, 1), v3(1, 1, 1)),
        StringGeom::line(v3(0, 0, 0), v3(0, 1, 0)),
        StringGeom::line(v3(1, 0, 1), v3(1, 1, 1)),
        StringGeom::line(v3(1, 0, 0), v3(1, 0, 1)),
        StringGeom::line(v3(0, 1, 0), v3(0, 1, 1)),
    };
    return m;
}

inline Motif make_Bcu() {
    Motif m;
    m.name = "Bcu";
    m.dim = 3;
    m.node_reps = {v3(0, 0, 0), v3(1, 1, 1)};
    m.periods = {v3(2, 0, 0), v3(0, 2, 0), v3(0, 0, 2)};
    m.string_reps = {
        StringGeom::line(v3(0, 0, 0), v3(1, 1, 1)),
        StringGeom::line(v3(0, 0, 0), v3(1, 1, -1)),
        StringGeom::line(v3(0, 0, 0), v3(1, -1, 1)),
        StringGeom::line(v3(0, 0, 0), v3(1, -1, -1)),
    };
    return m;
}

// Face-centred cubic lines: nodes are the odd-coordinate-sum integer points,
// strings run in the six (110) directions, two translation classes each.
inline Motif make_Fcu() {
    Motif m;
    m.name = "Fcu";
    m.dim = 3;
    m.node_reps = {v3(1, 1, 1), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)};
    m.periods = {v3(2, 0, 0), v3(0, 2, 0), v3(0, 0, 2)};
    auto L = [](Vec a, Vec d) { return StringGeom::line(a, a + d); };
    m.string_reps = {
        L(v3(1, 0, 0), v3(1, 1, 0)), L(v3(0, 0, 1), v3(1, 1, 0)),
        L(v3(1, 0, 0), v3(1, -1, 0)), L(v3(0, 0, 1), v3(1, -1, 0)),
        L(v3(1, 0, 0), v3(1, 0, 1)), L(v3(0, 1, 0), v3(1, 0, 1)),
        L(v3(1, 0, 0), v3(1, 0, -1)), L(v3(0, 1, 0), v3(1, 0, -1)),
        L(v3(0, 1, 0), v3(0, 1, 1)), L(v3(1, 0, 0), v3(0, 1, 1)),
        L(v3(0, 1, 0), v3(0, 1, -1)), L(v3(1, 0, 0), v3(0, 1, -1)),
    };
    return m;
}

// Hexagonally coordinated depletion of Fcu: per node class the three lines
// orthogonal to that class's hexagon normal; normals are
// (1,1,1)-class -> (1,-1,1), (1,0,0) -> (-1,-1,1), (0,1,0) -> (1,1,1),
// (0,0,1) -> (-1,1,1).
inline Motif make_Hxg() {
    Motif m;
    m.name = "Hxg";
    m.dim = 3;
    m.node_reps = {v3(1, 1, 1), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)};
    m.periods = {v3(2, 0, 0), v3(0, 2, 0), v3(0, 0, 2)};
    auto L = [](Vec a, Vec d) { return StringGeom::line(a, a + d); };
    m.string_reps = {
        L(v3(1, 1, 1), v3(1, 1, 0)),
        L(v3(1, 1, 1), v3(0, 1, 1)),
        L(v3(1, 1, 1), v3(1, 0, -1)),
        L(v3(1, 0, 0), v3(1, -1, 0)),
        L(v3(1, 0, 0), v3(1, 0, 1)),
        L(v3(0, 1, 0), v3(0, 1, -1)),
    };
    return m;
}

inline Motif make_Dia() {
    Motif m;
    m.name = "Dia";
    m.dim = 3;
    m.periods = {v3(4, 0, 0), v3(0, 4, 0), v3(0, 0, 4)};
    std::vector<Vec> a_sites = {v3(0, 0, 0), v3(0, 2, 2), v3(2, 0, 2), v3(2, 2, 0)};
    std::vector<Vec> b_sites;
    for (const auto& a : a_sites) b_sites.push_back(a + v3(1, 1, 1));
    m.node_reps = a_sites;
    m.node_reps.insert(m.node_reps.end(), b_sites.begin(), b_sites.end());
    const std::vector<Vec> deltas = {v3(-1, -1, -1), v3(-1, 1, 1), v3(1, -1, 1), v3(1, 1, -1)};
    for (const auto& b : b_sites)
        for (const auto& d : deltas) m.string_reps.push_back(StringGeom::segment(b, b + d));
    return m;
}

// --- K4 net ---------------------------------------------------------------
//
// Built inside Hxg by the triangle-triple propagation: start at the node
// with coordinates (-1,-1,1), keep one of its two alternating ray triples
// (the positively oriented one with respect to the hexagon normal), and let
// each kept edge force the triple at the far node (the unique alternating
// triple containing the reverse direction). The propagation closes up on
// 8 node classes and 12 edge classes modulo the (4,0,0),(0,4,0),(0,0,4)
// lattice.

struct IVec3 {
    long long x = 0, y = 0, z = 0;
    friend IVec3 operator+(IVec3 a, IVec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend IVec3 operator-(IVec3 a, IVec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    IVec3 operator-() const { return {-x, -y, -z}; }
    long long dot(IVec3 o) const { return x * o.x + y * o.y + z * o.z; }
    IVec3 cross(IVec3 o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    friend bool operator==(IVec3 a, IVec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
    friend bool operator<(IVec3 a, IVec3 b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    }
};

inline IVec3 mod4(IVec3 p) {
    auto m = [](long long v) { return ((v % 4) + 4) % 4; };
    return {m(p.x), m(p.y), m(p.z)};
}

inline IVec3 hxg_normal(IVec3 p) {
    auto m2 = [](long long v) { return ((v % 2) + 2) % 2; };
    IVec3 r{m2(p.x), m2(p.y), m2(p.z)};
    if (r == IVec3{1, 1, 1}) return {1, -1, 1};
    if (r == IVec3{1, 0, 0}) return {-1, -1, 1};
    if (r == IVec3{0, 1, 0}) return {1, 1, 1};
    if (r == IVec3{0, 0, 1}) return {-1, 1, 1};
    throw Error("K4: point is not an Fcu node class");
}

inline std::vector<IVec3> hxg_ray_dirs(IVec3 p) {
    static const IVec3 all[12] = {
        {1, 1, 0},  {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0}, {1, 0, 1},  {-1, 0, -1},
        {1, 0, -1}, {-1, 0, 1},  {0, 1, 1},  {0, -1, -1}, {0, 1, -1}, {0, -1, 1},
    };
    IVec3 n = hxg_normal(p);
    std::vector<IVec3> out;
    for (const auto& d : all)
        if (d.dot(n) == 0) out.push_back(d);
    return out;  // six rays, three lines
}

// alternating triple at p containing v: v plus the two rays at 120 degrees
inline std::vector<IVec3> k4_triple(IVec3 p, IVec3 v) {
    std::vector<IVec3> t = {v};
    for (const auto& d : hxg_ray_dirs(p))
        if (d.dot(v) == -1) t.push_back(d);
    if (t.size() != 3) throw Error("K4: triple propagation failed");
    std::sort(t.begin(), t.end());
    return t;
}

inline std::vector<IVec3> k4_seed_triple(IVec3 p) {
    auto rays = hxg_ray_dirs(p);
    std::sort(rays.begin(), rays.end());
    IVec3 n = hxg_normal(p);
    for (const auto& v : rays) {
        auto t = k4_triple(p, v);
        if (t[0].cross(t[1]).dot(n) > 0) return t;
    }
    throw Error("K4: no oriented seed triple");
}

inline Motif make_K4() {
    Motif m;
    m.name = "K4";
    m.dim = 3;
    m.periods = {v3(4, 0, 0), v3(0, 4, 0), v3(0, 0, 4)};

    IVec3 seed{-1, -1, 1};
    std::map<IVec3, std::pair<IVec3, std::vector<IVec3>>> classes;  // residue -> (rep, triple)
    std::vector<IVec3> frontier = {seed};
    classes[mod4(seed)] = {seed, k4_seed_triple(seed)};
    while (!frontier.empty()) {
        IVec3 p = frontier.back();
        frontier.pop_back();
        auto triple = classes.at(mod4(p)).second;
        for (const auto& u : triple) {
            IVec3 q = p + u;
            auto tq = k4_triple(q, -u);
            auto it = classes.find(mod4(q));
            if (it == classes.end()) {
                classes[mod4(q)] = {q, tq};
                frontier.push_back(q);
            } else if (it->second.second != tq) {
                throw Error("K4: inconsistent edge-triple propagation");
            }
        }
    }
    if (classes.size() != 8) throw Error("K4: expected 8 node classes");

    std::set<std::pair<IVec3, IVec3>> edge_classes;  // (residue, dir), canonical end
    for (const auto& [res, entry] : classes) {
        const auto& [rep, triple] = entry;
        for (const auto& u : triple) {
            IVec3 other = mod4(rep + u);
            std::pair<IVec3, IVec3> fwd{res, u}, bwd{other, -u};
            edge_classes.insert(std::min(fwd, bwd));
        }
        m.node_reps.push_back(v3(rep.x, rep.y, rep.z));
    }
    if (edge_classes.size() != 12) throw Error("K4: expected 12 edge classes");
    for (const auto& [res, u] : edge_classes) {
        IVec3 rep = classes.at(res).first;
        m.string_reps.push_back(
            StringGeom::segment(v3(rep.x, rep.y, rep.z), v3(rep.x + u.x, rep.y + u.y, rep.z + u.z)));
    }
    return m;
}

}  // namespace detail

inline const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {"tri", "Z2",  "kag", "hex", "K4", "Scaff",
                                                   "Dia", "Bcu", "Z3",  "Fcu", "Hxg"};
    return names;
}

inline Motif catalog(const std::string& name) {
    std::string key;
    for (char c : name) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    Motif m;
    if (key == "tri") m = detail::make_tri();
    else if (key == "z2") m = detail::make_Z2();
    else if (key == "kag") m = detail::make_kag();
    else if (key == "hex") m = detail::make_hex();
    else if (key == "k4") m = detail::make_K4();
    else if (key == "scaff") m = detail::make_Scaff();
    else if (key == "dia") m = detail::make_Dia();
    else if (key == "bcu") m = detail::make_Bcu();
    else if (key == "z3") m = detail::make_Z3();
    else if (key == "fcu") m = detail::make_Fcu();
    else if (key == "hxg") m = detail::make_Hxg();
    else throw Error("unknown catalog net: '" + name + "'");
    m.validate();
    return m;
}

// RCSR-style three-letter names.
inline std::string catalog_abc(const std::string& name) {
    static const std::map<std::string, std::string> abc = {
        {"hex", "hcb"}, {"Z2", "sql"},  {"tri", "hxl"}, {"kag", "kgm"},
        {"K4", "srs"},  {"Scaff", "nbo"}, {"Dia", "dia"}, {"Z3", "pcu"},
        {"Bcu", "bcu"}, {"Fcu", "fcu"}, {"Hxg", "hxg"},
    };
    auto it = abc.find(name);
    return it == abc.end() ? "-" : it->second;
}

// Internodal unit-edge representatives per translation class (for segment
// nets these are the string reps themselves; for linear nets each line class
// carries as many edge classes as lattice steps along the line).
inline std::vector<StringGeom> edge_reps(const Motif& m) {
    if (!m.is_linear()) return m.string_reps;
    std::vector<StringGeom> out;
    Mat Pinv = m.period_matrix().inverse();
    for (const auto& s : m.string_reps) {
        Vec step = s.direction();
        // smallest L >= 1 with L*step in the period lattice
        long long L = 1;
        for (;; ++L) {
            Vec k = Pinv.apply(ExactScalar(L) * step);
            bool integral = true;
            for (int c = 0; c < m.dim; ++c)
                if (!k[c].root_part().is_zero() ||
                    boost::multiprecision::denominator(k[c].rational_part()) != 1)
                    integral = false;
            if (integral) break;
            if (L > 64) throw Error(m.name + ": no lattice period along string");
        }
        for (long long t = 0; t < L; ++t) {
            Point a = s.a + ExactScalar(t) * step;
            out.push_back(StringGeom::segment(a, a + step));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// NetTruncation
// ---------------------------------------------------------------------------

struct TruncString {
    StringKind source_kind = StringKind::Line;
    int class_tag = 0;
    LineKey key;
    ExactScalar lo, hi;            // clipped param interval on the canonical line, lo < hi
    bool lo_clipped = false;       // cut produced by the window, not the string itself
    bool hi_clipped = false;
    Vec step;                      // internodal step vector along the string
    std::vector<int> node_ids;     // ascending param order
    std::vector<ExactScalar> node_params;

    Point point_lo() const { return key.point_at(lo); }
    Point point_hi() const { return key.point_at(hi); }
};

struct TruncNode {
    Point p;
    int class_tag = 0;
    std::vector<std::pair<int, int>> incident;  // (string id, index into node_ids)
};

struct Ray {
    int string_id = 0;
    Vec dir;  // internodal step vector, oriented outward
};

struct NetTruncation {
    std::string name;
    int dim = 2;
    ExactScalar window;
    std::vector<Vec> periods;  // empty for aperiodic constructions
    // true when nodes and strings are exactly the lattice translates of one
    // representative per class (generate() output); dense meshes and
    // extensions clear it
    bool lattice_complete = false;
    std::vector<TruncNode> nodes;
    std::vector<TruncString> strings;
    std::unordered_map<Point, int, VecHash> node_index;
    std::unordered_map<LineKey, std::vector<int>, LineKeyHash> lines;  // sorted by lo

    bool has_node(const Point& p) const { return node_index.count(p) > 0; }
    int node_at(const Point& p) const {
        auto it = node_index.find(p);
        return it == node_index.end() ? -1 : it->second;
    }

    bool covers_point(const Point& p) const {
        for (const auto& [key, ids] : lines) {
            if (!key.contains_point(p)) continue;
            ExactScalar t = key.param_of(p);
            for (int id : ids) {
                const auto& s = strings[static_cast<std::size_t>(id)];
                if (t >= s.lo && t <= s.hi) return true;
            }
        }
        return false;
    }

    // segment [a,b] inside the union of collinear truncation strings; since
    // collinear strings are pairwise disjoint the union covering a connected
    // segment must be a single string
    bool covers_segment(const Point& a, const Point& b) const {
        if (a == b) {
            return covers_point(a);
        }
        LineKey key = exact::line_key_of(a, b);
        auto it = lines.find(key);
        if (it == lines.end()) return false;
        ExactScalar ta = key.param_of(a), tb = key.param_of(b);
        if (tb < ta) std::swap(ta, tb);
        for (int id : it->second) {
            const auto& s = strings[static_cast<std::size_t>(id)];
            if (s.lo <= ta && tb <= s.hi) return true;
        }
        return false;
    }

    bool is_interior(int node_id, const ExactScalar& margin) const {
        return nodes[static_cast<std::size_t>(node_id)].p.norm_box() + margin <= window;
    }

    // nodes within this radius of the window edge may have been dropped for
    // losing incident strings to clipping; certificates must stay inside
    ExactScalar boundary_margin() const {
        ExactScalar m;
        for (const auto& s : strings) m = exact::max(m, s.step.norm_box());
        return m;
    }

    ExactScalar max_period_box() const {
        ExactScalar m;
        for (const auto& p : periods) m = exact::max(m, p.norm_box());
        return m;
    }

    // outward offsets to the adjacent node on each side (falling back to the
    // internodal step when the neighbour was clipped away); their count is
    // the node degree
    std::vector<Ray> rays_at(int node_id) const {
        const auto& nd = nodes[static_cast<std::size_t>(node_id)];
        std::vector<Ray> rays;
        for (auto [sid, pos] : nd.incident) {
            const auto& s = strings[static_cast<std::size_t>(sid)];
            const ExactScalar& t = s.node_params[static_cast<std::size_t>(pos)];
            // step oriented with increasing canonical parameter
            Vec up = s.step[s.key.pivot].sign() > 0 ? s.step : -s.step;
            if (t > s.lo) {
                if (pos > 0)
                    rays.push_back({sid, nodes[static_cast<std::size_t>(
                                             s.node_ids[static_cast<std::size_t>(pos - 1)])].p -
                                             nd.p});
                else
                    rays.push_back({sid, -up});
            }
            if (t < s.hi) {
                if (pos + 1 < static_cast<int>(s.node_ids.size()))
                    rays.push_back({sid, nodes[static_cast<std::size_t>(
                                             s.node_ids[static_cast<std::size_t>(pos + 1)])].p -
                                             nd.p});
                else
                    rays.push_back({sid, up});
            }
        }
        return rays;
    }

    int degree(int node_id) const { return static_cast<int>(rays_at(node_id).size()); }

    void index();
};

inline void NetTruncation::index() {
    node_index.clear();
    lines.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i].p] = static_cast<int>(i);
    for (std::size_t i = 0; i < strings.size(); ++i) lines[strings[i].key].push_back(static_cast<int>(i));
    for (auto& [key, ids] : lines) {
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            return strings[static_cast<std::size_t>(a)].lo < strings[static_cast<std::size_t>(b)].lo;
        });
        // Def 2.1(a): collinear strings are disjoint
        for (std::size_t j = 1; j < ids.size(); ++j) {
            const auto& prev = strings[static_cast<std::size_t>(ids[j - 1])];
            const auto& cur = strings[static_cast<std::size_t>(ids[j])];
            if (!(prev.hi < cur.lo))
                throw Error(name + ": overlapping or touching collinear strings");
        }
    }
    // wire node incidences from string node lists
    for (auto& n : nodes) n.incident.clear();
    for (std::size_t sid = 0; sid < strings.size(); ++sid) {
        auto& s = strings[sid];
        for (std::size_t pos = 0; pos < s.node_ids.size(); ++pos)
            nodes[static_cast<std::size_t>(s.node_ids[pos])].incident.push_back(
                {static_cast<int>(sid), static_cast<int>(pos)});
    }
}

// ---------------------------------------------------------------------------
// generate: all lattice translates of the motif reps meeting the window box
// [-R, R]^d, with deterministic ordering.
// ---------------------------------------------------------------------------

namespace detail {

// clip the line {base + t*dir} (canonical key params) to the window box;
// returns the closed param interval, empty -> nullopt
inline std::optional<std::pair<ExactScalar, ExactScalar>> clip_line_to_box(const LineKey& key,
                                                                           const ExactScalar& R) {
    ParamInterval iv = ParamInterval::all();
    for (int i = 0; i < key.dir.dim; ++i) {
        const ExactScalar& a = key.base[i];
        const ExactScalar& d = key.dir[i];
        if (d.is_zero()) {
            if (a.abs() > R) return std::nullopt;
            continue;
        }
        ExactScalar t1 = (-R - a) / d;
        ExactScalar t2 = (R - a) / d;
        ParamInterval c;
        c.lo = exact::min(t1, t2);
        c.hi = exact::max(t1, t2);
        iv = ParamInterval::intersect(iv, c);
        if (iv.empty()) return std::nullopt;
    }
    if (iv.lo_unbounded || iv.hi_unbounded) throw Error("clip: direction is zero");
    if (iv.empty()) return std::nullopt;
    return std::make_pair(iv.lo, iv.hi);
}

}  // namespace detail

inline NetTruncation generate(const Motif& motif, const ExactScalar& R, bool with_nodes = true) {
    motif.validate();
    ExactScalar max_period;
    for (const auto& p : motif.periods) max_period = exact::max(max_period, p.norm_box());
    if (R < ExactScalar(2) * max_period)
        throw Error(motif.name + ": window radius below 2 x max period length");

    const int d = motif.dim;
    Mat P = motif.period_matrix();
    Mat Pinv = P.inverse();

    // conservative translate range: |k_i| <= sum_j |Pinv_ij| * (R + margin)
    ExactScalar reach;
    for (const auto& p : motif.node_reps) reach = exact::max(reach, p.norm_box());
    for (const auto& s : motif.string_reps) {
        reach = exact::max(reach, s.a.norm_box());
        reach = exact::max(reach, s.b.norm_box());
    }
    ExactScalar margin = R + reach + ExactScalar(2) * max_period + ExactScalar(1);
    std::array<long long, 3> K{};
    for (int i = 0; i < d; ++i) {
        ExactScalar row;
        for (int j = 0; j < d; ++j) row += Pinv.at(i, j).abs();
        K[static_cast<std::size_t>(i)] = to_ll(exact_floor(row * margin)) + 1;
    }

    NetTruncation out;
    out.name = motif.name;
    out.dim = d;
    out.window = R;
    out.periods = motif.periods;

    // Double-precision coarse filter: the exact predicates stay authoritative,
    // the float pass only skips translates that are far outside the window.
    // Coordinates at desk scale are tiny, so a 0.5 slack is a safe bound on
    // the rounding error.
    const double Rd = R.to_double();
    std::array<std::array<double, 3>, 3> period_d{};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            period_d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                motif.periods[static_cast<std::size_t>(j)][i].to_double();

    auto for_each_translate = [&](const std::array<double, 3>& seed, double pad, auto&& fn) {
        std::array<long long, 3> k{};
        long long kz_lo = d == 3 ? -K[2] : 0, kz_hi = d == 3 ? K[2] : 0;
        for (k[0] = -K[0]; k[0] <= K[0]; ++k[0])
            for (k[1] = -K[1]; k[1] <= K[1]; ++k[1])
                for (k[2] = kz_lo; k[2] <= kz_hi; ++k[2]) {
                    bool near = true;
                    for (int i = 0; i < d; ++i) {
                        double x = seed[static_cast<std::size_t>(i)];
                        for (int j = 0; j < d; ++j)
                            x += static_cast<double>(k[static_cast<std::size_t>(j)]) *
                                 period_d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                        if (x > Rd + pad || x < -Rd - pad) {
                            near = false;
                            break;
                        }
                    }
                    if (!near) continue;
                    Vec shift = Vec::zero(d);
                    for (int j = 0; j < d; ++j)
                        shift = shift + ExactScalar(k[static_cast<std::size_t>(j)]) *
                                            motif.periods[static_cast<std::size_t>(j)];
                    fn(shift);
                }
    };
    auto to_d3 = [&](const Point& p) {
        std::array<double, 3> a{};
        for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i)] = p[i].to_double();
        return a;
    };

    // nodes
    std::vector<TruncNode> nodes;
    for (std::size_t c = 0; with_nodes && c < motif.node_reps.size(); ++c) {
        for_each_translate(to_d3(motif.node_reps[c]), 0.5, [&](const Vec& shift) {
            Point p = motif.node_reps[c] + shift;
            if (p.norm_box() <= R) nodes.push_back({p, static_cast<int>(c), {}});
        });
    }
    std::sort(nodes.begin(), nodes.end(), [](const TruncNode& a, const TruncNode& b) { return a.p < b.p; });
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](const TruncNode& a, const TruncNode& b) { return a.p == b.p; }),
                nodes.end());

    std::unordered_map<Point, int, VecHash> node_idx;
    for (std::size_t i = 0; i < nodes.size(); ++i) node_idx[nodes[i].p] = static_cast<int>(i);

    // strings
    struct PendingString {
        TruncString s;
        Point anchor;  // a node on the supporting line (lattice of nodes along it)
    };
    std::vector<PendingString> pending;
    std::set<std::pair<LineKey, std::pair<ExactScalar, ExactScalar>>> seen_keyed;
    std::unordered_set<LineKey, LineKeyHash> seen_lines;
    // Strings get their own translate loop: the cheap filter clips the
    // translated string (not just its anchor) against the padded box in
    // doubles, which discards the vast majority of lattice translates
    // before any exact arithmetic runs.
    // For a full line the translates along the line's own lattice direction
    // reproduce the same line; restricting one k coordinate to a transversal
    // of that step removes the redundancy exactly.
    auto line_transversal = [&](const Vec& dir) -> std::optional<std::pair<int, long long>> {
        Vec v = Pinv.apply(dir);
        BigInt lcm_den = 1;
        for (int i = 0; i < d; ++i) {
            if (!v[i].root_part().is_zero()) return std::nullopt;
            BigInt den = boost::multiprecision::denominator(v[i].rational_part());
            lcm_den = boost::multiprecision::lcm(lcm_den, den);
        }
        std::array<BigInt, 3> g{};
        BigInt common = 0;
        for (int i = 0; i < d; ++i) {
            g[static_cast<std::size_t>(i)] =
                boost::multiprecision::numerator(v[i].rational_part()) * lcm_den /
                boost::multiprecision::denominator(v[i].rational_part());
            common = boost::multiprecision::gcd(common, g[static_cast<std::size_t>(i)]);
        }
        if (common == 0) return std::nullopt;
        int best = -1;
        BigInt best_abs;
        for (int i = 0; i < d; ++i) {
            BigInt a = boost::multiprecision::abs(g[static_cast<std::size_t>(i)] / common);
            if (a != 0 && (best < 0 || a < best_abs)) {
                best = i;
                best_abs = a;
            }
        }
        if (best < 0) return std::nullopt;
        return std::make_pair(best, to_ll(best_abs));
    };

    auto rowsum = [&](int i) {
        ExactScalar s;
        for (int j = 0; j < d; ++j) s += Pinv.at(i, j).abs();
        return s;
    };
    auto for_each_string_translate = [&](const StringGeom& rep, auto&& fn) {
        std::array<double, 3> ad = to_d3(rep.a);
        std::array<double, 3> dd = to_d3(rep.direction());
        const bool is_line = rep.kind == StringKind::Line;
        const bool is_ray = rep.kind == StringKind::Ray;
        std::array<long long, 3> lo{-K[0], -K[1], d == 3 ? -K[2] : 0};
        std::array<long long, 3> hi{K[0], K[1], d == 3 ? K[2] : 0};
        if (is_line) {
            if (auto tv = line_transversal(rep.direction())) {
                // Restricting the pivot coordinate pins the anchor to one
                // lattice sheet; the anchor of a window-crossing line may
                // then sit at parameter distance up to
                //   |s| <= (|g_pivot| + rowsum_pivot (R + reach)) / |v_pivot|
                // from the window, so the other k ranges must widen.
                const int ip = tv->first;
                Vec v = Pinv.apply(rep.direction());
                ExactScalar vp = v[ip].abs();
                ExactScalar smax =
                    (ExactScalar(tv->second) + rowsum(ip) * (R + reach)) / vp;
                ExactScalar anchor_bound =
                    R + smax * rep.direction().norm_box() + reach + ExactScalar(2);
                for (int i = 0; i < d; ++i) {
                    long long Ki = to_ll(exact_floor(rowsum(i) * anchor_bound)) + 1;
                    lo[static_cast<std::size_t>(i)] = -Ki;
                    hi[static_cast<std::size_t>(i)] = Ki;
                }
                lo[static_cast<std::size_t>(ip)] = 0;
                hi[static_cast<std::size_t>(ip)] = tv->second - 1;
            }
        }
        std::array<long long, 3> k{};
        const double inf = std::numeric_limits<double>::infinity();
        for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
            for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
                for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
                    double tlo = is_line ? -inf : 0.0;
                    double thi = is_line || is_ray ? inf : 1.0;
                    bool empty = false;
                    for (int i = 0; i < d && !empty; ++i) {
                        double a = ad[static_cast<std::size_t>(i)];
                        for (int j = 0; j < d; ++j)
                            a += static_cast<double>(k[static_cast<std::size_t>(j)]) *
                                 period_d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                        double dv = dd[static_cast<std::size_t>(i)];
                        if (std::abs(dv) < 1e-9) {
                            if (std::abs(a) > Rd + 0.5) empty = true;
                            continue;
                        }
                        double t1 = (-Rd - 0.5 - a) / dv, t2 = (Rd + 0.5 - a) / dv;
                        if (t1 > t2) std::swap(t1, t2);
                        tlo = std::max(tlo, t1);
                        thi = std::min(thi, t2);
                        if (tlo > thi) empty = true;
                    }
                    if (empty) continue;
                    Vec shift = Vec::zero(d);
                    for (int j = 0; j < d; ++j)
                        shift = shift + ExactScalar(k[static_cast<std::size_t>(j)]) *
                                            motif.periods[static_cast<std::size_t>(j)];
                    fn(shift);
                }
    };
    for (std::size_t c = 0; c < motif.string_reps.size(); ++c) {
        const StringGeom& rep = motif.string_reps[c];
        for_each_string_translate(rep, [&](const Vec& shift) {
            Point a = rep.a + shift;
            Point b = rep.b + shift;
            LineKey key = exact::line_key_of(a, b);
            ExactScalar lo, hi;
            bool lo_clip = false, hi_clip = false;
            auto box = detail::clip_line_to_box(key, R);
            if (!box) return;
            if (rep.kind == StringKind::Line) {
                if (seen_lines.count(key)) return;
                seen_lines.insert(key);
                lo = box->first;
                hi = box->second;
                lo_clip = hi_clip = true;
            } else {
                ExactScalar ta = key.param_of(a), tb = key.param_of(b);
                ExactScalar slo = exact::min(ta, tb), shi = exact::max(ta, tb);
                lo = exact::max(slo, box->first);
                hi = exact::min(shi, box->second);
                if (!(lo < hi)) return;  // outside or degenerate after clipping
                lo_clip = lo > slo;
                hi_clip = hi < shi;
                if (seen_keyed.count({key, {lo, hi}})) return;
                seen_keyed.insert({key, {lo, hi}});
            }
            TruncString ts;
            ts.source_kind = rep.kind;
            ts.class_tag = static_cast<int>(c);
            ts.key = key;
            ts.lo = lo;
            ts.hi = hi;
            ts.lo_clipped = lo_clip;
            ts.hi_clipped = hi_clip;
            ts.step = rep.direction();
            pending.push_back({std::move(ts), a});
        });
    }
    std::sort(pending.begin(), pending.end(), [](const PendingString& x, const PendingString& y) {
        if (x.s.key != y.s.key) return x.s.key < y.s.key;
        return x.s.lo < y.s.lo;
    });

    // nodes on strings: the motif convention puts nodes at the integer
    // multiples of the step from the anchor
    for (auto& ps : pending) {
        if (!with_nodes) break;
        TruncString& s = ps.s;
        ExactScalar t0 = s.key.param_of(ps.anchor);
        ExactScalar dstep = s.step[s.key.pivot];  // param advance per internodal step
        ExactScalar m_lo = (s.lo - t0) / dstep;
        ExactScalar m_hi = (s.hi - t0) / dstep;
        if (m_hi < m_lo) std::swap(m_lo, m_hi);
        BigInt m0 = exact_ceil(m_lo), m1 = exact_floor(m_hi);
        struct Entry {
            ExactScalar t;
            int node;
        };
        std::vector<Entry> entries;
        for (BigInt mm = m0; mm <= m1; ++mm) {
            Point q = ps.anchor + ExactScalar(Rational(mm)) * s.step;
            auto it = node_idx.find(q);
            if (it == node_idx.end())
                throw Error(motif.name + ": integer-parameter string point is not a node");
            entries.push_back({s.key.param_of(q), it->second});
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.t < b.t; });
        for (auto& e : entries) {
            s.node_ids.push_back(e.node);
            s.node_params.push_back(e.t);
        }
    }

    if (!with_nodes) {
        for (auto& ps : pending) out.strings.push_back(std::move(ps.s));
        out.lattice_complete = true;
        out.index();
        return out;
    }

    // drop boundary nodes that ended up on fewer than two strings
    std::vector<int> incident_count(nodes.size(), 0);
    for (const auto& ps : pending) {
        std::unordered_set<int> seen;
        for (int id : ps.s.node_ids)
            if (seen.insert(id).second) ++incident_count[static_cast<std::size_t>(id)];
    }
    std::vector<int> remap(nodes.size(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (incident_count[i] >= 2) {
            remap[i] = static_cast<int>(out.nodes.size());
            out.nodes.push_back(nodes[i]);
        }
    }
    for (auto& ps : pending) {
        TruncString s = std::move(ps.s);
        std::vector<int> ids;
        std::vector<ExactScalar> params;
        for (std::size_t j = 0; j < s.node_ids.size(); ++j) {
            int nid = remap[static_cast<std::size_t>(s.node_ids[j])];
            if (nid >= 0) {
                ids.push_back(nid);
                params.push_back(s.node_params[j]);
            }
        }
        s.node_ids = std::move(ids);
        s.node_params = std::move(params);
        out.strings.push_back(std::move(s));
    }

    out.lattice_complete = true;
    out.index();
    return out;
}

// ---------------------------------------------------------------------------
// ray figure / degree
// ---------------------------------------------------------------------------

struct RayFigure {
    int degree = 0;
    std::vector<Vec> directions;  // internodal step vectors, equal norms for catalog nets
    FigureClass figure = FigureClass::Other;
};

inline RayFigure ray_figure(const NetTruncation& net, int node_id, const ExactScalar& r) {
    const auto& nd = net.nodes[static_cast<std::size_t>(node_id)];
    if (nd.p.norm_box() + r > net.window)
        throw Error(net.name + ": ray-figure ball exits the window (insufficient truncation)");
    RayFigure rf;
    for (const auto& ray : net.rays_at(node_id)) rf.directions.push_back(ray.dir);
    rf.degree = static_cast<int>(rf.directions.size());
    rf.figure = classify_figure(rf.directions);
    return rf;
}

inline RayFigure ray_figure(const NetTruncation& net, const Point& p, const ExactScalar& r) {
    int id = net.node_at(p);
    if (id < 0) throw Error(net.name + ": not a node");
    return ray_figure(net, id, r);
}

// ---------------------------------------------------------------------------
// scaling inclusion:  m * |N| inside |N|, checked on windows
// ---------------------------------------------------------------------------

struct ScalingInclusionResult {
    bool included = true;
    std::optional<StringGeom> witness;  // scaled string missing from the body
};

inline ScalingInclusionResult scaling_inclusion(const Motif& motif, long long m, const ExactScalar& R) {
    if (m <= 0) throw Error("scaling_inclusion: m must be positive");
    NetTruncation small = generate(motif, R, /*with_nodes=*/false);
    NetTruncation big = generate(motif, R * ExactScalar(1 + m), /*with_nodes=*/false);
    ScalingInclusionResult res;
    const ExactScalar em{m};
    for (const auto& s : small.strings) {
        Point a = em * s.point_lo();
        Point b = em * s.point_hi();
        if (!big.covers_segment(a, b)) {
            res.included = false;
            res.witness = StringGeom(s.source_kind == StringKind::Line ? StringKind::Segment : s.source_kind,
                                     a, b);
            return res;
        }
    }
    return res;
}

inline ScalingInclusionResult scaling_inclusion(const std::string& name, long long m, const ExactScalar& R) {
    return scaling_inclusion(catalog(name), m, R);
}

// ---------------------------------------------------------------------------
// Sierpinski segment net
// ---------------------------------------------------------------------------

namespace detail {

inline void sierpinski_medials(const Point& A, const Point& B, const Point& C, int depth,
                               std::vector<StringGeom>& out) {
    if (depth <= 0) return;
    const ExactScalar h = ExactScalar::of(1, 2);
    Point ab = h * (A + B), bc = h * (B + C), ca = h * (C + A);
    out.push_back(StringGeom::segment(ab, bc));
    out.push_back(StringGeom::segment(bc, ca));
    out.push_back(StringGeom::segment(ca, ab));
    sierpinski_medials(A, ab, ca, depth - 1, out);
    sierpinski_medials(ab, B, bc, depth - 1, out);
    sierpinski_medials(ca, bc, C, depth - 1, out);
}

}  // namespace detail

inline NetTruncation sierpinski(int depth) {
    if (depth < 1) throw Error("sierpinski: depth must be >= 1");
    Point A = Vec::of2(0, 0), B = Vec::of2(1, 0);
    Point C(ExactScalar::of(1, 2), ExactScalar::rt3(1, 2));
    std::vector<StringGeom> segs = {StringGeom::segment(A, B), StringGeom::segment(B, C),
                                    StringGeom::segment(C, A)};
    detail::sierpinski_medials(A, B, C, depth, segs);

    // merge collinear touching pieces into maximal segments
    std::map<LineKey, std::vector<std::pair<ExactScalar, ExactScalar>>> per_line;
    for (const auto& s : segs) {
        LineKey key = exact::line_key(s);
        ExactScalar ta = key.param_of(s.a), tb = key.param_of(s.b);
        per_line[key].push_back({exact::min(ta, tb), exact::max(ta, tb)});
    }
    NetTruncation out;
    out.name = "sierpinski";
    out.dim = 2;
    out.window = ExactScalar(1);
    for (auto& [key, ivs] : per_line) {
        std::sort(ivs.begin(), ivs.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        std::size_t i = 0;
        while (i < ivs.size()) {
            ExactScalar lo = ivs[i].first, hi = ivs[i].second;
            std::size_t j = i + 1;
            while (j < ivs.size() && ivs[j].first <= hi) {
                hi = exact::max(hi, ivs[j].second);
                ++j;
            }
            TruncString ts;
            ts.source_kind = StringKind::Segment;
            ts.class_tag = 0;
            ts.key = key;
            ts.lo = lo;
            ts.hi = hi;
            ts.step = key.dir;
            out.strings.push_back(std::move(ts));
            i = j;
        }
    }

    // nodes are the pairwise intersection points
    std::unordered_map<Point, int, VecHash> node_idx;
    std::vector<std::vector<std::pair<ExactScalar, int>>> on_string(out.strings.size());
    auto geom_of = [&](const TruncString& s) {
        return StringGeom::segment(s.point_lo(), s.point_hi());
    };
    for (std::size_t i = 0; i < out.strings.size(); ++i)
        for (std::size_t j = i + 1; j < out.strings.size(); ++j) {
            if (out.strings[i].key == out.strings[j].key) continue;  // disjoint by construction
            auto r = exact::intersect(geom_of(out.strings[i]), geom_of(out.strings[j]));
            if (r.kind != exact::IntersectResult::Kind::Point) continue;
            int id;
            auto it = node_idx.find(r.at);
            if (it == node_idx.end()) {
                id = static_cast<int>(out.nodes.size());
                node_idx[r.at] = id;
                out.nodes.push_back({r.at, 0, {}});
            } else {
                id = it->second;
            }
            on_string[i].push_back({out.strings[i].key.param_of(r.at), id});
            on_string[j].push_back({out.strings[j].key.param_of(r.at), id});
        }
    for (std::size_t i = 0; i < out.strings.size(); ++i) {
        auto& lst = on_string[i];
        std::sort(lst.begin(), lst.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        lst.erase(std::unique(lst.begin(), lst.end(),
                              [](const auto& x, const auto& y) { return x.second == y.second; }),
                  lst.end());
        for (auto& [t, id] : lst) {
            out.strings[i].node_ids.push_back(id);
            out.strings[i].node_params.push_back(t);
        }
    }
    out.index();
    return out;
}

// ---------------------------------------------------------------------------
// node recovery for truncations assembled from raw strings (meshes,
// extensions): nodes are the pairwise intersection points. Non-parallel
// 3D pairs are bucketed by the coplanarity invariant base . (d1 x d2) so
// only candidate pairs are intersected.
// ---------------------------------------------------------------------------

inline void populate_nodes_by_intersection(NetTruncation& net) {
    net.nodes.clear();
    for (auto& s : net.strings) {
        s.node_ids.clear();
        s.node_params.clear();
    }
    std::unordered_map<Point, int, VecHash> node_idx;
    std::vector<std::vector<std::pair<ExactScalar, int>>> on_string(net.strings.size());
    auto record = [&](std::size_t sid, const Point& p) {
        int id;
        auto it = node_idx.find(p);
        if (it == node_idx.end()) {
            id = static_cast<int>(net.nodes.size());
            node_idx[p] = id;
            net.nodes.push_back({p, 0, {}});
        } else {
            id = it->second;
        }
        on_string[sid].push_back({net.strings[sid].key.param_of(p), id});
    };
    auto seg_of = [&](const TruncString& s) {
        return StringGeom::segment(s.point_lo(), s.point_hi());
    };
    if (net.dim == 2) {
        for (std::size_t i = 0; i < net.strings.size(); ++i)
            for (std::size_t j = i + 1; j < net.strings.size(); ++j) {
                if (net.strings[i].key.dir.parallel(net.strings[j].key.dir)) continue;
                auto r = exact::intersect(seg_of(net.strings[i]), seg_of(net.strings[j]));
                if (r.kind == exact::IntersectResult::Kind::Point) {
                    record(i, r.at);
                    record(j, r.at);
                }
            }
    } else {
        // group by direction, bucket cross-direction pairs by the common
        // plane invariant
        std::map<Vec, std::vector<int>> by_dir;
        for (std::size_t i = 0; i < net.strings.size(); ++i)
            by_dir[net.strings[i].key.dir].push_back(static_cast<int>(i));
        std::vector<std::pair<Vec, std::vector<int>>> families(by_dir.begin(), by_dir.end());
        for (std::size_t f1 = 0; f1 < families.size(); ++f1)
            for (std::size_t f2 = f1 + 1; f2 < families.size(); ++f2) {
                Vec n = families[f1].first.cross3(families[f2].first);
                if (n.is_zero()) continue;
                std::map<ExactScalar, std::pair<std::vector<int>, std::vector<int>>> buckets;
                for (int i : families[f1].second)
                    buckets[net.strings[static_cast<std::size_t>(i)].key.base.dot(n)].first.push_back(i);
                for (int j : families[f2].second)
                    buckets[net.strings[static_cast<std::size_t>(j)].key.base.dot(n)].second.push_back(j);
                for (auto& [lvl, pair] : buckets)
                    for (int i : pair.first)
                        for (int j : pair.second) {
                            auto r = exact::intersect(seg_of(net.strings[static_cast<std::size_t>(i)]),
                                                      seg_of(net.strings[static_cast<std::size_t>(j)]));
                            if (r.kind == exact::IntersectResult::Kind::Point) {
                                record(static_cast<std::size_t>(i), r.at);
                                record(static_cast<std::size_t>(j), r.at);
                            }
                        }
            }
    }
    for (std::size_t i = 0; i < net.strings.size(); ++i) {
        auto& lst = on_string[i];
        std::sort(lst.begin(), lst.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        lst.erase(std::unique(lst.begin(), lst.end(),
                              [](const auto& x, const auto& y) { return x.second == y.second; }),
                  lst.end());
        for (auto& [t, id] : lst) {
            net.strings[i].node_ids.push_back(id);
            net.strings[i].node_params.push_back(t);
        }
    }
    net.index();
}

// ---------------------------------------------------------------------------
// string graph: nodes plus consecutive-on-string edges with exact lengths
// ---------------------------------------------------------------------------

struct StringGraphEdge {
    int from = 0, to = 0;
    ExactScalar length_sq;
    double length = 0.0;
};

struct StringGraph {
    int node_count = 0;
    std::vector<StringGraphEdge> edges;
    std::vector<std::vector<std::pair<int, double>>> adjacency;  // (neighbor, length)
};

inline StringGraph string_graph(const NetTruncation& net) {
    StringGraph g;
    g.node_count = static_cast<int>(net.nodes.size());
    g.adjacency.resize(net.nodes.size());
    for (const auto& s : net.strings) {
        for (std::size_t i = 1; i < s.node_ids.size(); ++i) {
            int u = s.node_ids[i - 1], v = s.node_ids[i];
            Vec diff = net.nodes[static_cast<std::size_t>(v)].p - net.nodes[static_cast<std::size_t>(u)].p;
            StringGraphEdge e;
            e.from = u;
            e.to = v;
            e.length_sq = diff.norm_sq();
            e.length = std::sqrt(e.length_sq.to_double());
            g.adjacency[static_cast<std::size_t>(u)].push_back({v, e.length});
            g.adjacency[static_cast<std::size_t>(v)].push_back({u, e.length});
            g.edges.push_back(std::move(e));
        }
    }
    return g;
}

}  // namespace meshforge::netlib
