#include "tequiv/divisor_lattice.hpp"

#include <algorithm>

namespace tequiv {

namespace {

void require_same_size(const DivClass& x, const DivClass& y) {
    if (x.n() != y.n())
        throw InvalidArgument("divisor classes from lattices of different size (" + std::to_string(x.n()) +
                              " vs " + std::to_string(y.n()) + ")");
}

}  // namespace

DivClass DivClass::of(long long r, long long s, std::initializer_list<long long> as) {
    DivClass c(as.size());
    c.r = r;
    c.s = s;
    std::size_t i = 0;
    for (auto v : as) c.a[i++] = v;
    return c;
}

bool DivClass::is_zero() const {
    if (r != 0 || s != 0) return false;
    return std::all_of(a.begin(), a.end(), [](const Int& v) { return v == 0; });
}

DivClass& DivClass::operator+=(const DivClass& o) {
    require_same_size(*this, o);
    r += o.r;
    s += o.s;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
}

DivClass& DivClass::operator-=(const DivClass& o) {
    require_same_size(*this, o);
    r -= o.r;
    s -= o.s;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
    return *this;
}

DivClass& DivClass::operator*=(const Int& k) {
    r *= k;
    s *= k;
    for (auto& v : a) v *= k;
    return *this;
}

DivClass DivClass::operator-() const {
    DivClass c = *this;
    c *= Int(-1);
    return c;
}

std::strong_ordering operator<=>(const DivClass& x, const DivClass& y) {
    if (x.a.size() != y.a.size()) return x.a.size() <=> y.a.size();
    auto cmp = [](const Int& u, const Int& v) {
        return u < v ? std::strong_ordering::less : (u > v ? std::strong_ordering::greater : std::strong_ordering::equal);
    };
    if (auto c = cmp(x.r, y.r); c != 0) return c;
    if (auto c = cmp(x.s, y.s); c != 0) return c;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        if (auto c = cmp(x.a[i], y.a[i]); c != 0) return c;
    return std::strong_ordering::equal;
}

std::string DivClass::to_string() const {
    std::string out = "(" + r.str() + "," + s.str();
    for (std::size_t i = 0; i < a.size(); ++i) out += (i == 0 ? ";" : ",") + a[i].str();
    return out + ")";
}

std::vector<std::string> DivClass::odd_coordinates() const {
    std::vector<std::string> odd;
    if (!tequiv::is_even(r)) odd.emplace_back("r");
    if (!tequiv::is_even(s)) odd.emplace_back("s");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!tequiv::is_even(a[i])) odd.push_back("a" + std::to_string(i + 1));
    return odd;
}

DivClass DivClass::halved() const {
    if (!is_even()) throw InvalidArgument("class " + to_string() + " is not divisible by 2");
    DivClass c(a.size());
    c.r = r / 2;
    c.s = s / 2;
    for (std::size_t i = 0; i < a.size(); ++i) c.a[i] = a[i] / 2;
    return c;
}

DivClass DivClass::truncated(std::size_t n) const {
    if (n > a.size()) throw InvalidArgument("truncation would grow the class");
    DivClass c = *this;
    c.a.resize(n);
    return c;
}

DivClass DivClass::extended(std::size_t n) const {
    if (n < a.size()) throw InvalidArgument("extension would shrink the class");
    DivClass c = *this;
    c.a.resize(n);
    return c;
}

DivClass BlownQuadricLattice::fibre1() const {
    DivClass c(n_);
    c.r = 1;
    return c;
}

DivClass BlownQuadricLattice::fibre2() const {
    DivClass c(n_);
    c.s = 1;
    return c;
}

DivClass BlownQuadricLattice::exceptional(std::size_t i) const {
    if (i >= n_) throw InvalidArgument("exceptional index out of range");
    DivClass c(n_);
    c.a[i] = -1;
    return c;
}

DivClass BlownQuadricLattice::canonical_class() const { return tequiv::canonical_class(n_); }

void BlownQuadricLattice::require_member(const DivClass& c) const {
    if (c.n() != n_)
        throw InvalidArgument("class has " + std::to_string(c.n()) + " exceptional entries, lattice has " +
                              std::to_string(n_));
}

std::vector<std::vector<long long>> BlownQuadricLattice::gram() const {
    std::vector<std::vector<long long>> g(rank(), std::vector<long long>(rank(), 0));
    g[0][1] = g[1][0] = 1;
    for (std::size_t i = 0; i < n_; ++i) g[i + 2][i + 2] = -1;
    return g;
}

Int intersect(const DivClass& x, const DivClass& y) {
    require_same_size(x, y);
    Int v = x.r * y.s + y.r * x.s;
    for (std::size_t i = 0; i < x.a.size(); ++i) v -= x.a[i] * y.a[i];
    return v;
}

Int intersect_times4(const HalfClass& x, const HalfClass& y) { return intersect(x.twice(), y.twice()); }

DivClass canonical_class(std::size_t n) {
    DivClass k(n);
    k.r = -2;
    k.s = -2;
    for (auto& v : k.a) v = -1;
    return k;
}

bool is_comb_ample(const DivClass& c) {
    Int bound = 0;
    for (const auto& v : c.a) {
        if (v < 2) return false;
        bound += v + 1;
    }
    return c.r > bound && c.s > bound;
}

Int rr_chi(const DivClass& c) {
    const Int twice = intersect(c, c - canonical_class(c.n()));
    if (!is_even(twice)) throw ConsistencyError("L.(L-K) is odd for " + c.to_string());
    return 1 + twice / 2;
}

std::string to_string(AmpleFact f) {
    switch (f) {
        case AmpleFact::ample: return "ample";
        case AmpleFact::base_point_free: return "base_point_free";
        case AmpleFact::h1_vanishes: return "H1(L)=0";
        case AmpleFact::h1_of_dual_vanishes: return "H1(-L)=0";
        case AmpleFact::h0_theta_twist_vanishes: return "H0(theta(-L))=0";
        case AmpleFact::h1_theta_twist_vanishes: return "H1(theta(-L))=0";
    }
    return "?";
}

std::vector<AmpleFact> comb_ample_certificate(const DivClass& c) {
    if (!is_comb_ample(c)) throw InvalidArgument("class " + c.to_string() + " is not combinatorially ample");
    return {AmpleFact::ample,
            AmpleFact::base_point_free,
            AmpleFact::h1_vanishes,
            AmpleFact::h1_of_dual_vanishes,
            AmpleFact::h0_theta_twist_vanishes,
            AmpleFact::h1_theta_twist_vanishes};
}

Int ample_escalation(const DivClass& d, const DivClass& l, const Int& cap) {
    if (!is_comb_ample(l)) throw InvalidArgument("escalation direction must be combinatorially ample");
    DivClass cur = d;
    for (Int alpha = 0; alpha <= cap; ++alpha) {
        if (is_comb_ample(cur)) return alpha;
        cur += l;
    }
    throw SearchCapExceeded("no multiple up to " + cap.str() + " makes the class combinatorially ample");
}

}  // namespace tequiv
