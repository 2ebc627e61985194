#pragma once

// Exact arithmetic over the real quadratic field Q(sqrt(3)) and the exact
// geometric kernel built on it: points/vectors in dimension 2 or 3, lines,
// rays and closed segments with canonical line keys, exact intersection,
// and conformal (scaled-orthogonal) transforms.
//
// Everything here is immutable after construction and safe to share across
// threads. No floating point enters any predicate; doubles appear only in
// the to_double() exporters.

#include <array>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "meshforge/common.hpp"

namespace meshforge::exact {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline int sign_of(const Rational& r) { return r.sign(); }

inline std::size_t hash_rational(const Rational& r) {
    std::size_t h1 = hash_value(boost::multiprecision::numerator(r));
    std::size_t h2 = hash_value(boost::multiprecision::denominator(r));
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

// Exact square root of a nonnegative rational, when it is rational.
inline std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r.sign() < 0) return std::nullopt;
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt sn = boost::multiprecision::sqrt(num);
    BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rational(sn, sd);
}

// ---------------------------------------------------------------------------
// ExactScalar: an element a + b*sqrt(3) with a, b arbitrary-precision
// rationals. Field arithmetic is closed; comparison is exact (sqrt(3) is
// irrational, so a + b*sqrt(3) = 0 iff a = b = 0).
// ---------------------------------------------------------------------------

class ExactScalar {
public:
    ExactScalar() : a_(0), b_(0) {}
    ExactScalar(int v) : a_(v), b_(0) {}                  // NOLINT(implicit)
    ExactScalar(long long v) : a_(v), b_(0) {}            // NOLINT(implicit)
    explicit ExactScalar(Rational a) : a_(std::move(a)), b_(0) {}
    ExactScalar(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

    static ExactScalar of(long long num, long long den) {
        if (den == 0) throw Error("ExactScalar: zero denominator");
        return ExactScalar(Rational(num, den));
    }
    // (num/den) * sqrt(3)
    static ExactScalar rt3(long long num = 1, long long den = 1) {
        if (den == 0) throw Error("ExactScalar: zero denominator");
        return ExactScalar(Rational(0), Rational(num, den));
    }

    const Rational& rational_part() const { return a_; }
    const Rational& root_part() const { return b_; }
    bool is_rational() const { return b_.is_zero(); }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

    // Exact sign: for a, b of opposite sign compare a^2 against 3 b^2.
    int sign() const {
        int sa = sign_of(a_), sb = sign_of(b_);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        Rational lhs = a_ * a_;
        Rational rhs = 3 * b_ * b_;
        if (lhs == rhs) throw Error("ExactScalar: sqrt(3) rational?");
        return lhs > rhs ? sa : sb;
    }

    ExactScalar operator-() const { return ExactScalar(-a_, -b_); }

    friend ExactScalar operator+(const ExactScalar& x, const ExactScalar& y) {
        return ExactScalar(x.a_ + y.a_, x.b_ + y.b_);
    }
    friend ExactScalar operator-(const ExactScalar& x, const ExactScalar& y) {
        return ExactScalar(x.a_ - y.a_, x.b_ - y.b_);
    }
    friend ExactScalar operator*(const ExactScalar& x, const ExactScalar& y) {
        return ExactScalar(x.a_ * y.a_ + 3 * x.b_ * y.b_,
                           x.a_ * y.b_ + x.b_ * y.a_);
    }
    friend ExactScalar operator/(const ExactScalar& x, const ExactScalar& y) {
        if (y.is_zero()) throw Error("ExactScalar: division by zero");
        // 1/(a + b r3) = (a - b r3) / (a^2 - 3 b^2)
        Rational n = y.a_ * y.a_ - 3 * y.b_ * y.b_;
        ExactScalar conj(y.a_ / n, -y.b_ / n);
        return x * conj;
    }

    ExactScalar& operator+=(const ExactScalar& y) { return *this = *this + y; }
    ExactScalar& operator-=(const ExactScalar& y) { return *this = *this - y; }
    ExactScalar& operator*=(const ExactScalar& y) { return *this = *this * y; }
    ExactScalar& operator/=(const ExactScalar& y) { return *this = *this / y; }

    friend bool operator==(const ExactScalar& x, const ExactScalar& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const ExactScalar& x, const ExactScalar& y) { return !(x == y); }
    friend bool operator<(const ExactScalar& x, const ExactScalar& y) { return (x - y).sign() < 0; }
    friend bool operator>(const ExactScalar& x, const ExactScalar& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const ExactScalar& x, const ExactScalar& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const ExactScalar& x, const ExactScalar& y) { return (x - y).sign() >= 0; }

    ExactScalar abs() const { return sign() < 0 ? -*this : *this; }

    // Exact square root within the field, when representable.
    std::optional<ExactScalar> sqrt_in_field() const {
        if (sign() < 0) return std::nullopt;
        if (b_.is_zero()) {
            if (auto p = rational_sqrt(a_)) return ExactScalar(*p);
            if (auto q = rational_sqrt(a_ / 3)) return ExactScalar(Rational(0), *q);
            return std::nullopt;
        }
        // (p + q r3)^2 = p^2 + 3 q^2 + 2 p q r3:  p^2 is a root of
        // 4 t^2 - 4 a t + 3 b^2 = 0, i.e. t = (a ± sqrt(a^2 - 3 b^2)) / 2.
        Rational disc = a_ * a_ - 3 * b_ * b_;
        auto sd = rational_sqrt(disc);
        if (!sd) return std::nullopt;
        for (int pm = 0; pm < 2; ++pm) {
            Rational t = (a_ + (pm == 0 ? *sd : -*sd)) / 2;
            auto p = rational_sqrt(t);
            if (!p || p->is_zero()) continue;
            Rational q = b_ / (2 * *p);
            ExactScalar cand(*p, q);
            if (cand * cand == *this && cand.sign() >= 0) return cand;
            cand = -cand;
            if (cand * cand == *this && cand.sign() >= 0) return cand;
        }
        return std::nullopt;
    }

    double to_double() const {
        return static_cast<double>(a_) + static_cast<double>(b_) * 1.7320508075688772935;
    }

    std::size_t hash() const {
        std::size_t h = hash_rational(a_);
        return h ^ (hash_rational(b_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }

    std::string str() const;

private:
    Rational a_, b_;
};

inline int compare(const ExactScalar& x, const ExactScalar& y) { return (x - y).sign(); }
inline const ExactScalar& min(const ExactScalar& x, const ExactScalar& y) { return y < x ? y : x; }
inline const ExactScalar& max(const ExactScalar& x, const ExactScalar& y) { return x < y ? y : x; }

inline std::string rational_str(const Rational& r) {
    std::string s = boost::multiprecision::numerator(r).str();
    s += "/";
    s += boost::multiprecision::denominator(r).str();
    return s;
}

// Wire format "a/b+c/d r3" (second sign always explicit, e.g. "1/2-3/4 r3").
inline std::string ExactScalar::str() const {
    std::string s = rational_str(a_);
    s += (sign_of(b_) < 0) ? "-" : "+";
    Rational babs = b_ < 0 ? Rational(-b_) : b_;
    s += rational_str(babs);
    s += " r3";
    return s;
}

inline ExactScalar parse_scalar(const std::string& text) {
    auto bad = [&]() -> Error { return Error("bad ExactScalar literal: '" + text + "'"); };
    std::string s = text;
    if (s.size() < 3 || s.substr(s.size() - 3) != " r3") throw bad();
    s = s.substr(0, s.size() - 3);
    // split at the sign that starts the root part: the last '+' or '-' that
    // is not a numerator sign (position > 0 and preceded by a digit)
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && std::isdigit(static_cast<unsigned char>(s[i - 1]))) {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) throw bad();
    auto parse_rat = [&](const std::string& t) {
        auto slash = t.find('/');
        if (slash == std::string::npos) throw bad();
        try {
            BigInt num(t.substr(0, slash));
            BigInt den(t.substr(slash + 1));
            if (den.is_zero()) throw bad();
            return Rational(num, den);
        } catch (const std::exception&) {
            throw bad();
        }
    };
    Rational a = parse_rat(s.substr(0, split));
    Rational b = parse_rat(s.substr(split + 1));
    if (s[split] == '-') b = -b;
    return ExactScalar(a, b);
}

inline std::ostream& operator<<(std::ostream& os, const ExactScalar& x) { return os << x.str(); }

// ---------------------------------------------------------------------------
// Vec: point or vector in dimension 2 or 3 with ExactScalar coordinates.
// ---------------------------------------------------------------------------

struct Vec {
    int dim = 0;
    std::array<ExactScalar, 3> c{};

    Vec() = default;
    Vec(ExactScalar x, ExactScalar y) : dim(2), c{std::move(x), std::move(y), ExactScalar()} {}
    Vec(ExactScalar x, ExactScalar y, ExactScalar z) : dim(3), c{std::move(x), std::move(y), std::move(z)} {}

    static Vec zero(int d) {
        Vec v;
        v.dim = d;
        return v;
    }
    static Vec of2(long long x, long long y) { return Vec(ExactScalar(x), ExactScalar(y)); }
    static Vec of3(long long x, long long y, long long z) {
        return Vec(ExactScalar(x), ExactScalar(y), ExactScalar(z));
    }

    const ExactScalar& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    ExactScalar& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

    friend Vec operator+(const Vec& u, const Vec& v) {
        check_dims(u, v);
        Vec w = Vec::zero(u.dim);
        for (int i = 0; i < u.dim; ++i) w[i] = u[i] + v[i];
        return w;
    }
    friend Vec operator-(const Vec& u, const Vec& v) {
        check_dims(u, v);
        Vec w = Vec::zero(u.dim);
        for (int i = 0; i < u.dim; ++i) w[i] = u[i] - v[i];
        return w;
    }
    Vec operator-() const {
        Vec w = Vec::zero(dim);
        for (int i = 0; i < dim; ++i) w[i] = -c[static_cast<std::size_t>(i)];
        return w;
    }
    friend Vec operator*(const ExactScalar& s, const Vec& v) {
        Vec w = Vec::zero(v.dim);
        for (int i = 0; i < v.dim; ++i) w[i] = s * v[i];
        return w;
    }

    ExactScalar dot(const Vec& v) const {
        check_dims(*this, v);
        ExactScalar s;
        for (int i = 0; i < dim; ++i) s += c[static_cast<std::size_t>(i)] * v[i];
        return s;
    }
    ExactScalar norm_sq() const { return dot(*this); }
    // max |coordinate|: the exact box norm used for window bookkeeping
    ExactScalar norm_box() const {
        ExactScalar m;
        for (int i = 0; i < dim; ++i) m = max(m, c[static_cast<std::size_t>(i)].abs());
        return m;
    }
    bool is_zero() const {
        for (int i = 0; i < dim; ++i)
            if (!c[static_cast<std::size_t>(i)].is_zero()) return false;
        return true;
    }

    // 2D scalar cross product
    ExactScalar cross2(const Vec& v) const {
        check_dims(*this, v);
        return c[0] * v[1] - c[1] * v[0];
    }
    Vec cross3(const Vec& v) const {
        check_dims(*this, v);
        return Vec(c[1] * v[2] - c[2] * v[1], c[2] * v[0] - c[0] * v[2], c[0] * v[1] - c[1] * v[0]);
    }
    bool parallel(const Vec& v) const {
        if (dim == 2) return cross2(v).is_zero();
        return cross3(v).is_zero();
    }

    friend bool operator==(const Vec& u, const Vec& v) {
        if (u.dim != v.dim) return false;
        for (int i = 0; i < u.dim; ++i)
            if (!(u[i] == v[i])) return false;
        return true;
    }
    friend bool operator!=(const Vec& u, const Vec& v) { return !(u == v); }
    friend bool operator<(const Vec& u, const Vec& v) {  // lexicographic; dims first
        if (u.dim != v.dim) return u.dim < v.dim;
        for (int i = 0; i < u.dim; ++i) {
            int s = compare(u[i], v[i]);
            if (s != 0) return s < 0;
        }
        return false;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(dim);
        for (int i = 0; i < dim; ++i) {
            std::size_t hi = c[static_cast<std::size_t>(i)].hash();
            h ^= hi + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < dim; ++i) {
            if (i) s += ", ";
            s += c[static_cast<std::size_t>(i)].str();
        }
        return s + ")";
    }

private:
    static void check_dims(const Vec& u, const Vec& v) {
        if (u.dim != v.dim) throw Error("Vec: dimension mismatch");
    }
};

using Point = Vec;

struct VecHash {
    std::size_t operator()(const Vec& v) const { return v.hash(); }
};

// ---------------------------------------------------------------------------
// Mat: d x d matrix over Q(sqrt(3)).
// ---------------------------------------------------------------------------

struct Mat {
    int dim = 0;
    std::array<std::array<ExactScalar, 3>, 3> m{};

    static Mat identity(int d) {
        Mat r;
        r.dim = d;
        for (int i = 0; i < d; ++i) r.m[i][i] = ExactScalar(1);
        return r;
    }
    static Mat zero(int d) {
        Mat r;
        r.dim = d;
        return r;
    }
    static Mat scale(int d, const ExactScalar& s) {
        Mat r = zero(d);
        for (int i = 0; i < d; ++i) r.m[i][i] = s;
        return r;
    }
    static Mat from_cols(const std::vector<Vec>& cols) {
        Mat r;
        r.dim = static_cast<int>(cols.size());
        for (int j = 0; j < r.dim; ++j)
            for (int i = 0; i < r.dim; ++i) r.m[i][j] = cols[static_cast<std::size_t>(j)][i];
        return r;
    }

    const ExactScalar& at(int i, int j) const { return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    ExactScalar& at(int i, int j) { return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

    Vec apply(const Vec& v) const {
        if (v.dim != dim) throw Error("Mat: dimension mismatch");
        Vec w = Vec::zero(dim);
        for (int i = 0; i < dim; ++i) {
            ExactScalar s;
            for (int j = 0; j < dim; ++j) s += at(i, j) * v[j];
            w[i] = s;
        }
        return w;
    }

    friend Mat operator*(const Mat& A, const Mat& B) {
        if (A.dim != B.dim) throw Error("Mat: dimension mismatch");
        Mat C = zero(A.dim);
        for (int i = 0; i < A.dim; ++i)
            for (int j = 0; j < A.dim; ++j) {
                ExactScalar s;
                for (int k = 0; k < A.dim; ++k) s += A.at(i, k) * B.at(k, j);
                C.at(i, j) = s;
            }
        return C;
    }

    Mat transpose() const {
        Mat T = zero(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) T.at(j, i) = at(i, j);
        return T;
    }

    ExactScalar det() const {
        if (dim == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
        return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
               at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
               at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    }

    Mat inverse() const {
        ExactScalar d = det();
        if (d.is_zero()) throw Error("Mat: singular");
        Mat adj = zero(dim);
        if (dim == 2) {
            adj.at(0, 0) = at(1, 1);
            adj.at(0, 1) = -at(0, 1);
            adj.at(1, 0) = -at(1, 0);
            adj.at(1, 1) = at(0, 0);
        } else {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    int r1 = (i + 1) % 3, r2 = (i + 2) % 3;
                    int c1 = (j + 1) % 3, c2 = (j + 2) % 3;
                    adj.at(j, i) = at(r1, c1) * at(r2, c2) - at(r1, c2) * at(r2, c1);
                }
        }
        Mat inv = zero(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) inv.at(i, j) = adj.at(i, j) / d;
        return inv;
    }

    // max row sum of |entries|: exact operator norm for the box norm
    ExactScalar opnorm_box() const {
        ExactScalar best;
        for (int i = 0; i < dim; ++i) {
            ExactScalar row;
            for (int j = 0; j < dim; ++j) row += at(i, j).abs();
            best = max(best, row);
        }
        return best;
    }

    friend bool operator==(const Mat& A, const Mat& B) {
        if (A.dim != B.dim) return false;
        for (int i = 0; i < A.dim; ++i)
            for (int j = 0; j < A.dim; ++j)
                if (!(A.at(i, j) == B.at(i, j))) return false;
        return true;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                std::size_t hij = at(i, j).hash();
                h ^= hij + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            }
        return h;
    }
};

// ---------------------------------------------------------------------------
// StringGeom: a full line, a closed ray, or a closed segment, held as two
// distinct points. The parametrization is x(t) = a + t (b - a): a segment
// covers t in [0,1], a ray t in [0, inf), a line all of R.
// ---------------------------------------------------------------------------

enum class StringKind { Segment, Ray, Line };

inline const char* kind_name(StringKind k) {
    switch (k) {
        case StringKind::Segment: return "segment";
        case StringKind::Ray: return "ray";
        default: return "line";
    }
}

struct StringGeom {
    StringKind kind = StringKind::Segment;
    Point a, b;

    StringGeom() = default;
    StringGeom(StringKind k, Point a_, Point b_) : kind(k), a(std::move(a_)), b(std::move(b_)) {
        if (a == b) throw Error("StringGeom: degenerate (a == b)");
        if (a.dim != b.dim) throw Error("StringGeom: dimension mismatch");
    }

    static StringGeom segment(Point p, Point q) { return StringGeom(StringKind::Segment, std::move(p), std::move(q)); }
    static StringGeom ray(Point origin, Point through) { return StringGeom(StringKind::Ray, std::move(origin), std::move(through)); }
    static StringGeom line(Point p, Point q) { return StringGeom(StringKind::Line, std::move(p), std::move(q)); }

    int dim() const { return a.dim; }
    Vec direction() const { return b - a; }
};

// Canonical (direction, offset) key: equal keys iff same affine line.
// The direction is scaled so its first nonzero coordinate is 1 (every
// nonzero field element is invertible, so the pivot rule is total), and the
// base point is the unique point on the line with zero pivot coordinate.
// The canonical parameter of a point on the line is its pivot coordinate.
struct LineKey {
    int pivot = 0;
    Vec dir;    // dir[pivot] == 1
    Point base; // base[pivot] == 0

    friend bool operator==(const LineKey& x, const LineKey& y) {
        return x.pivot == y.pivot && x.dir == y.dir && x.base == y.base;
    }
    friend bool operator!=(const LineKey& x, const LineKey& y) { return !(x == y); }
    friend bool operator<(const LineKey& x, const LineKey& y) {
        if (x.pivot != y.pivot) return x.pivot < y.pivot;
        if (x.dir != y.dir) return x.dir < y.dir;
        return x.base < y.base;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(pivot);
        std::size_t h1 = dir.hash(), h2 = base.hash();
        h ^= h1 + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= h2 + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

    ExactScalar param_of(const Point& p) const { return p[pivot]; }
    Point point_at(const ExactScalar& t) const { return base + t * dir; }
    bool contains_point(const Point& p) const { return point_at(param_of(p)) == p; }
};

struct LineKeyHash {
    std::size_t operator()(const LineKey& k) const { return k.hash(); }
};

inline LineKey line_key_of(const Point& a, const Point& b) {
    Vec d = b - a;
    int pivot = -1;
    for (int i = 0; i < d.dim; ++i)
        if (!d[i].is_zero()) {
            pivot = i;
            break;
        }
    if (pivot < 0) throw Error("line_key: degenerate direction");
    LineKey k;
    k.pivot = pivot;
    ExactScalar inv = ExactScalar(1) / d[pivot];
    k.dir = inv * d;
    k.base = a - a[pivot] * k.dir;
    return k;
}

inline LineKey line_key(const StringGeom& s) { return line_key_of(s.a, s.b); }

// Closed param interval on a canonical line, possibly unbounded on a side.
struct ParamInterval {
    ExactScalar lo, hi;
    bool lo_unbounded = false, hi_unbounded = false;

    static ParamInterval all() { return {ExactScalar(), ExactScalar(), true, true}; }
    bool empty() const {
        return !lo_unbounded && !hi_unbounded && lo > hi;
    }
    bool is_point() const { return !lo_unbounded && !hi_unbounded && lo == hi; }
    bool contains(const ExactScalar& t) const {
        if (!lo_unbounded && t < lo) return false;
        if (!hi_unbounded && t > hi) return false;
        return true;
    }
    static ParamInterval intersect(const ParamInterval& x, const ParamInterval& y) {
        ParamInterval r;
        r.lo_unbounded = x.lo_unbounded && y.lo_unbounded;
        r.hi_unbounded = x.hi_unbounded && y.hi_unbounded;
        if (!r.lo_unbounded) {
            if (x.lo_unbounded) r.lo = y.lo;
            else if (y.lo_unbounded) r.lo = x.lo;
            else r.lo = max(x.lo, y.lo);
        }
        if (!r.hi_unbounded) {
            if (x.hi_unbounded) r.hi = y.hi;
            else if (y.hi_unbounded) r.hi = x.hi;
            else r.hi = min(x.hi, y.hi);
        }
        return r;
    }
};

// Param interval of a string on its own canonical line.
inline ParamInterval param_interval(const StringGeom& s, const LineKey& key) {
    ExactScalar ta = key.param_of(s.a);
    ExactScalar tb = key.param_of(s.b);
    switch (s.kind) {
        case StringKind::Line: return ParamInterval::all();
        case StringKind::Segment: {
            ParamInterval r;
            r.lo = min(ta, tb);
            r.hi = max(ta, tb);
            return r;
        }
        default: {  // Ray from a toward b
            ParamInterval r;
            if (tb > ta) {
                r.lo = ta;
                r.hi_unbounded = true;
            } else {
                r.hi = ta;
                r.lo_unbounded = true;
            }
            return r;
        }
    }
}

// ---------------------------------------------------------------------------
// Exact intersection. Colinear strings with a nondegenerate common interval
// yield an overlap report (invalid as net input, but a value here).
// ---------------------------------------------------------------------------

struct IntersectResult {
    enum class Kind { Empty, Point, Overlap };
    Kind kind = Kind::Empty;
    Point at;            // valid when kind == Point
    LineKey line;        // valid when kind == Overlap
    ParamInterval span;  // valid when kind == Overlap
};

inline IntersectResult intersect(const StringGeom& s1, const StringGeom& s2) {
    if (s1.dim() != s2.dim()) throw Error("intersect: dimension mismatch");
    IntersectResult res;
    LineKey k1 = line_key(s1);
    LineKey k2 = line_key(s2);
    if (k1 == k2) {
        ParamInterval common = ParamInterval::intersect(param_interval(s1, k1), param_interval(s2, k1));
        if (common.empty()) return res;
        if (common.is_point()) {
            res.kind = IntersectResult::Kind::Point;
            res.at = k1.point_at(common.lo);
            return res;
        }
        res.kind = IntersectResult::Kind::Overlap;
        res.line = k1;
        res.span = common;
        return res;
    }
    Vec d1 = s1.direction(), d2 = s2.direction();
    if (d1.parallel(d2)) return res;  // distinct parallel lines
    // solve a1 + t d1 = a2 + s d2
    Vec rhs = s2.a - s1.a;
    ExactScalar t, s;
    if (s1.dim() == 2) {
        ExactScalar den = d1.cross2(-d2);
        // den = -d1 x d2, nonzero since not parallel
        t = rhs.cross2(-d2) / den;
        s = d1.cross2(rhs) / den;
    } else {
        int r1 = -1, r2 = -1;
        ExactScalar den;
        for (int i = 0; i < 3 && r1 < 0; ++i)
            for (int j = i + 1; j < 3; ++j) {
                ExactScalar d = d1[i] * (-d2[j]) - (-d2[i]) * d1[j];
                if (!d.is_zero()) {
                    r1 = i;
                    r2 = j;
                    den = d;
                    break;
                }
            }
        if (r1 < 0) return res;
        t = (rhs[r1] * (-d2[r2]) - (-d2[r1]) * rhs[r2]) / den;
        s = (d1[r1] * rhs[r2] - rhs[r1] * d1[r2]) / den;
        // verify the remaining equation (skew lines otherwise)
        int r3 = 3 - r1 - r2;
        if (!(s1.a[r3] + t * d1[r3] == s2.a[r3] + s * d2[r3])) return res;
    }
    auto in_range = [](const StringGeom& g, const ExactScalar& u) {
        switch (g.kind) {
            case StringKind::Line: return true;
            case StringKind::Ray: return u.sign() >= 0;
            default: return u.sign() >= 0 && u <= ExactScalar(1);
        }
    };
    if (!in_range(s1, t) || !in_range(s2, s)) return res;
    res.kind = IntersectResult::Kind::Point;
    res.at = s1.a + t * d1;
    return res;
}

// ---------------------------------------------------------------------------
// ScaledIsometry: x -> M x + shift with M^T M = ratio_sq * I (ratio_sq > 0).
// ratio_sq == 1 gives an isometry; orientation is the sign of det M.
// ---------------------------------------------------------------------------

struct ScaledIsometry {
    int dim = 0;
    Mat linear;
    Vec shift;
    ExactScalar ratio_sq;
    int orientation = 1;

    static ScaledIsometry from_linear(Mat M, Vec t) {
        if (M.dim != t.dim) throw Error("ScaledIsometry: dimension mismatch");
        Mat G = M.transpose() * M;
        ExactScalar rho = G.at(0, 0);
        if (rho.sign() <= 0) throw Error("ScaledIsometry: singular linear part");
        for (int i = 0; i < M.dim; ++i)
            for (int j = 0; j < M.dim; ++j) {
                const ExactScalar expect = (i == j) ? rho : ExactScalar();
                if (!(G.at(i, j) == expect)) throw Error("ScaledIsometry: linear part is not scaled-orthogonal");
            }
        ScaledIsometry T;
        T.dim = M.dim;
        T.linear = std::move(M);
        T.shift = std::move(t);
        T.ratio_sq = rho;
        T.orientation = T.linear.det().sign();
        return T;
    }

    // Returns nullopt when M is not scaled-orthogonal (candidate filtering).
    static std::optional<ScaledIsometry> try_from_linear(Mat M, Vec t) {
        if (M.dim != t.dim) return std::nullopt;
        Mat G = M.transpose() * M;
        ExactScalar rho = G.at(0, 0);
        if (rho.sign() <= 0) return std::nullopt;
        for (int i = 0; i < M.dim; ++i)
            for (int j = 0; j < M.dim; ++j) {
                const ExactScalar expect = (i == j) ? rho : ExactScalar();
                if (!(G.at(i, j) == expect)) return std::nullopt;
            }
        ScaledIsometry T;
        T.dim = M.dim;
        T.linear = std::move(M);
        T.shift = std::move(t);
        T.ratio_sq = rho;
        T.orientation = T.linear.det().sign();
        return T;
    }

    static ScaledIsometry identity(int d) { return from_linear(Mat::identity(d), Vec::zero(d)); }
    static ScaledIsometry translation(Vec v) {
        int d = v.dim;
        return from_linear(Mat::identity(d), std::move(v));
    }
    static ScaledIsometry dilation(int d, const ExactScalar& r) {
        if (r.sign() <= 0) throw Error("ScaledIsometry: dilation ratio must be positive");
        return from_linear(Mat::scale(d, r), Vec::zero(d));
    }
    // 2D rotation from an exact (cos, sin) pair on the unit circle
    static ScaledIsometry rotation2(const ExactScalar& c, const ExactScalar& s) {
        if (!(c * c + s * s == ExactScalar(1))) throw Error("rotation2: (c, s) not on the unit circle");
        Mat M = Mat::zero(2);
        M.at(0, 0) = c;
        M.at(0, 1) = -s;
        M.at(1, 0) = s;
        M.at(1, 1) = c;
        return from_linear(M, Vec::zero(2));
    }
    static ScaledIsometry mirror_x(int d) {
        Mat M = Mat::identity(d);
        M.at(0, 0) = ExactScalar(-1);
        return from_linear(M, Vec::zero(d));
    }

    bool is_isometry() const { return ratio_sq == ExactScalar(1); }
    // exact ratio when representable in the field (e.g. 3 for D_3)
    std::optional<ExactScalar> ratio() const { return ratio_sq.sqrt_in_field(); }

    Point apply(const Point& p) const { return linear.apply(p) + shift; }
    StringGeom apply(const StringGeom& s) const {
        return StringGeom(s.kind, apply(s.a), apply(s.b));
    }

    // this ∘ other
    ScaledIsometry compose(const ScaledIsometry& other) const {
        if (dim != other.dim) throw Error("ScaledIsometry: dimension mismatch");
        return from_linear(linear * other.linear, linear.apply(other.shift) + shift);
    }

    ScaledIsometry inverse() const {
        Mat Minv = Mat::zero(dim);
        Mat Mt = linear.transpose();
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) Minv.at(i, j) = Mt.at(i, j) / ratio_sq;
        return from_linear(Minv, -Minv.apply(shift));
    }

    friend bool operator==(const ScaledIsometry& x, const ScaledIsometry& y) {
        return x.dim == y.dim && x.linear == y.linear && x.shift == y.shift;
    }

    std::size_t hash() const {
        std::size_t h = linear.hash();
        return h ^ (shift.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

struct ScaledIsometryHash {
    std::size_t operator()(const ScaledIsometry& t) const { return t.hash(); }
};

}  // namespace meshforge::exact
