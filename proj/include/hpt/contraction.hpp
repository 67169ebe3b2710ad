#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpt/graded.hpp"
#include "hpt/tensor.hpp"

namespace hpt {

/// A contraction (M ⇄ N, h): chain maps ι: M→N, π: N→M of degree 0 and a
/// homotopy h: N→N of degree -1 with
///   πι = Id,  ιπ - Id = dh + hd,  πh = hι = h² = 0.
struct Contraction {
    DGModule big;    // N
    DGModule small;  // M
    GradedMap incl;      // ι: M -> N, degree 0
    GradedMap proj;      // π: N -> M, degree 0
    GradedMap homotopy;  // h: N -> N, degree -1
};

inline Contraction identity_contraction(const DGModule& m) {
    return {m, m, GradedMap::identity(m.space), GradedMap::identity(m.space),
            GradedMap::zero(m.space, m.space, -1)};
}

namespace detail {

inline void check_contraction_wiring(const Contraction& c) {
    if (!same_space(c.incl.source(), c.small.space) || !same_space(c.incl.target(), c.big.space))
        throw SpaceMismatch("contraction: inclusion endpoints");
    if (!same_space(c.proj.source(), c.big.space) || !same_space(c.proj.target(), c.small.space))
        throw SpaceMismatch("contraction: projection endpoints");
    if (!same_space(c.homotopy.source(), c.big.space) ||
        !same_space(c.homotopy.target(), c.big.space))
        throw SpaceMismatch("contraction: homotopy endpoints");
    if (c.incl.degree() != 0 || c.proj.degree() != 0) throw DegreeError("ι, π must have degree 0");
    if (c.homotopy.degree() != -1) throw DegreeError("h must have degree -1");
}

}  // namespace detail

/// Checks the two chain-map conditions and the five contraction axioms,
/// exactly. Violations are reported with a witnessing basis vector.
inline ValidationReport validate_contraction(const Contraction& c) {
    detail::check_contraction_wiring(c);
    ValidationReport report;
    const GradedMap& dN = c.big.differential;
    const GradedMap& dM = c.small.differential;
    const GradedMap idN = GradedMap::identity(c.big.space);
    const GradedMap idM = GradedMap::identity(c.small.space);

    auto merge = [&report](ValidationReport r) {
        for (auto& item : r.items) report.items.push_back(std::move(item));
    };
    merge(maps_equal_report("iota is a chain map", compose(dN, c.incl), compose(c.incl, dM)));
    merge(maps_equal_report("pi is a chain map", compose(dM, c.proj), compose(c.proj, dN)));
    merge(maps_equal_report("pi.iota = id", compose(c.proj, c.incl), idM));
    merge(maps_equal_report("iota.pi - id = dh + hd", compose(c.incl, c.proj) - idN,
                            compose(dN, c.homotopy) + compose(c.homotopy, dN)));
    merge(maps_equal_report("pi.h = 0", compose(c.proj, c.homotopy),
                            GradedMap::zero(c.big.space, c.small.space, -1)));
    merge(maps_equal_report("h.iota = 0", compose(c.homotopy, c.incl),
                            GradedMap::zero(c.small.space, c.big.space, -1)));
    merge(maps_equal_report("h.h = 0", compose(c.homotopy, c.homotopy),
                            GradedMap::zero(c.big.space, c.big.space, -2)));
    return report;
}

/// Side-condition repair: given a bundle satisfying everything except
/// possibly h² = 0, replaces h by h' = -h·d·h, which satisfies all five
/// axioms. (With the sign convention ιπ - Id = dh + hd the classical
/// replacement needs this minus sign; hdh flips the retraction identity.)
/// Inputs violating one of the other four conditions are rejected.
inline Contraction repair_homotopy_square(const Contraction& c) {
    detail::check_contraction_wiring(c);
    const GradedMap& dN = c.big.differential;
    const GradedMap idN = GradedMap::identity(c.big.space);
    const GradedMap idM = GradedMap::identity(c.small.space);
    auto demand = [](ValidationReport r, const std::string& name) {
        if (!r.passed()) throw PreconditionFailed("repair requires " + name + "; " + r.str());
    };
    demand(maps_equal_report("chain", compose(dN, c.incl), compose(c.incl, c.small.differential)),
           "iota to be a chain map");
    demand(maps_equal_report("chain", compose(c.small.differential, c.proj),
                             compose(c.proj, dN)),
           "pi to be a chain map");
    demand(maps_equal_report("retract", compose(c.proj, c.incl), idM), "pi.iota = id");
    demand(maps_equal_report("homotopy", compose(c.incl, c.proj) - idN,
                             compose(dN, c.homotopy) + compose(c.homotopy, dN)),
           "iota.pi - id = dh + hd");
    demand(maps_equal_report("annihilation", compose(c.proj, c.homotopy),
                             GradedMap::zero(c.big.space, c.small.space, -1)),
           "pi.h = 0");
    demand(maps_equal_report("annihilation", compose(c.homotopy, c.incl),
                             GradedMap::zero(c.small.space, c.big.space, -1)),
           "h.iota = 0");
    Contraction out = c;
    out.homotopy = -compose(c.homotopy, compose(dN, c.homotopy));
    return out;
}

/// (M ⇄ N, h) ∘ (N ⇄ P, k) = (M ⇄ P, k + i h p), where i, p are the
/// inclusion and projection of the inner contraction.
inline Contraction compose_contractions(const Contraction& outer, const Contraction& inner) {
    if (!same_space(outer.big.space, inner.small.space))
        throw SpaceMismatch("compose_contractions: outer.big must equal inner.small");
    Contraction out;
    out.big = inner.big;
    out.small = outer.small;
    out.incl = compose(inner.incl, outer.incl);
    out.proj = compose(outer.proj, inner.proj);
    out.homotopy = inner.homotopy + compose(inner.incl, compose(outer.homotopy, inner.proj));
    return out;
}

/// Tensor product of contractions: (M⊗A ⇄ N⊗B, h*k) with
/// h*k = ιπ⊗k + h⊗Id.
inline Contraction tensor_contractions(const Contraction& a, const Contraction& b) {
    TensorSpace bigT(a.big.space, b.big.space);
    TensorSpace smallT(a.small.space, b.small.space);
    const GradedMap idA = GradedMap::identity(a.big.space);
    const GradedMap idB = GradedMap::identity(b.big.space);
    const GradedMap idSa = GradedMap::identity(a.small.space);
    const GradedMap idSb = GradedMap::identity(b.small.space);

    GradedMap dBig = tensor_maps(a.big.differential, idB, bigT, bigT) +
                     tensor_maps(idA, b.big.differential, bigT, bigT);
    GradedMap dSmall = tensor_maps(a.small.differential, idSb, smallT, smallT) +
                       tensor_maps(idSa, b.small.differential, smallT, smallT);

    Contraction out;
    out.big = DGModule(bigT.space(), dBig);
    out.small = DGModule(smallT.space(), dSmall);
    out.incl = tensor_maps(a.incl, b.incl, smallT, bigT);
    out.proj = tensor_maps(a.proj, b.proj, bigT, smallT);
    out.homotopy = tensor_maps(compose(a.incl, a.proj), b.homotopy, bigT, bigT) +
                   tensor_maps(a.homotopy, idB, bigT, bigT);
    return out;
}

/// T^n h = Σ_{i=1}^{n} (ιπ)^{⊗ i-1} ⊗ h ⊗ Id^{⊗ n-i} on the n-th power
/// word space of N.
inline GradedMap tensor_power_homotopy(const Contraction& c, const WordSpace& wsBig) {
    if (!same_space(wsBig.generators(), c.big.space))
        throw SpaceMismatch("tensor_power_homotopy: word space is not a power of N");
    const int n = wsBig.length();
    const GradedMap idN = GradedMap::identity(c.big.space);
    const GradedMap retr = compose(c.incl, c.proj);
    GradedMap out = GradedMap::zero(wsBig.space(), wsBig.space(), -1);
    for (int i = 0; i < n; ++i) {
        std::vector<const GradedMap*> factors;
        factors.reserve(static_cast<size_t>(n));
        for (int j = 0; j < i; ++j) factors.push_back(&retr);
        factors.push_back(&c.homotopy);
        for (int j = i + 1; j < n; ++j) factors.push_back(&idN);
        out += tensor_factor_map(wsBig, wsBig, factors);
    }
    return out;
}

inline GradedMap tensor_power_homotopy(const Contraction& c, int n) {
    WordSpace ws(c.big.space, n);
    return tensor_power_homotopy(c, ws);
}

/// The n-th tensor power contraction (M^{⊗n} ⇄ N^{⊗n}, T^n h) on word spaces.
inline Contraction tensor_power_contraction(const Contraction& c, const WordSpace& wsSmall,
                                            const WordSpace& wsBig) {
    const int n = wsBig.length();
    if (wsSmall.length() != n) throw LengthMismatch("tensor powers of different length");
    GradedMap dBig = letterwise_extension(wsBig, c.big.differential);
    GradedMap dSmall = letterwise_extension(wsSmall, c.small.differential);
    std::vector<const GradedMap*> incls(static_cast<size_t>(n), &c.incl);
    std::vector<const GradedMap*> projs(static_cast<size_t>(n), &c.proj);
    Contraction out;
    out.big = DGModule(wsBig.space(), dBig);
    out.small = DGModule(wsSmall.space(), dSmall);
    out.incl = tensor_factor_map(wsSmall, wsBig, incls);
    out.proj = tensor_factor_map(wsBig, wsSmall, projs);
    out.homotopy = tensor_power_homotopy(c, wsBig);
    return out;
}

inline Contraction tensor_power_contraction(const Contraction& c, int n) {
    WordSpace wsSmall(c.small.space, n);
    WordSpace wsBig(c.big.space, n);
    return tensor_power_contraction(c, wsSmall, wsBig);
}

namespace detail {

/// One Gaussian reduction step: cancels the pair x -> y where λ = <dx, y> is
/// the pivot, producing a contraction of m onto the remaining basis vectors.
inline Contraction reduce_pair(const DGModule& m, BasisRef x, BasisRef y, const Rational& lambda) {
    const SpacePtr& n = m.space;
    const GradedMap& d = m.differential;
    Rational linv = lambda.inverse();

    // Remaining basis, with its embedding back into N.
    std::map<int, std::vector<std::string>> smallComponents;
    std::map<BasisRef, BasisRef> toSmall;  // N position -> M position
    std::map<BasisRef, BasisRef> toBig;
    for (const auto& [deg, basis] : n->components) {
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            BasisRef b{deg, i};
            if (b == x || b == y) continue;
            BasisRef s{deg, static_cast<int>(smallComponents[deg].size())};
            smallComponents[deg].push_back(basis[static_cast<size_t>(i)]);
            toSmall[b] = s;
            toBig[s] = b;
        }
    }
    SpacePtr smallSpace = make_space(std::move(smallComponents));

    // r = dx - λy has no y component and lives away from x by degree.
    Element r = d.apply(x);
    r.add(y, -lambda);

    GradedMap incl(smallSpace, n, 0);
    for (const auto& [s, b] : toBig) {
        incl.add_entry(s, b, 1);
        Rational nu = d.apply(b).coeff(y);
        if (!nu.is_zero()) incl.add_entry(s, x, -(linv * nu));
    }

    GradedMap proj(n, smallSpace, 0);
    for (const auto& [b, s] : toSmall) proj.add_entry(b, s, 1);
    for (const auto& [b, cr] : r.terms()) proj.add_entry(y, toSmall.at(b), -(linv * cr));

    GradedMap homotopy(n, n, -1);
    homotopy.add_entry(y, x, -linv);

    GradedMap dSmall = compose(proj, compose(d, incl));
    Contraction out;
    out.big = m;
    out.small = DGModule(smallSpace, dSmall);
    out.incl = std::move(incl);
    out.proj = std::move(proj);
    out.homotopy = std::move(homotopy);
    return out;
}

inline std::optional<std::tuple<BasisRef, BasisRef, Rational>> first_pivot(const GradedMap& d) {
    // Lexicographic scan: source degree, source index, target index.
    for (const auto& [src, tgt, c] : d.entries()) return std::make_tuple(src, tgt, c);
    return std::nullopt;
}

}  // namespace detail

/// Contracts a complex onto a module with zero differential by repeated
/// cancellation of differential pivots, chosen in lexicographic
/// (degree, basis index) order. With max_steps < 0 runs to completion, so the
/// small side has the homology of m as its graded dimension; a bounded step
/// count yields a partial contraction whose small side keeps a differential.
inline Contraction homology_contraction(const DGModule& m, int max_steps = -1) {
    Contraction acc = identity_contraction(m);
    int steps = 0;
    while (max_steps < 0 || steps < max_steps) {
        auto pivot = detail::first_pivot(acc.small.differential);
        if (!pivot) break;
        auto [x, y, lambda] = *pivot;
        Contraction step = detail::reduce_pair(acc.small, x, y, lambda);
        acc = compose_contractions(step, acc);
        ++steps;
    }
    return acc;
}

/// A morphism of contractions: a chain map f: N -> B with fh = kf.
struct ContractionMorphism {
    Contraction from;
    Contraction to;
    GradedMap map;  // f: from.big -> to.big, degree 0
};

inline ValidationReport validate_morphism(const ContractionMorphism& phi) {
    ValidationReport report;
    if (!same_space(phi.map.source(), phi.from.big.space) ||
        !same_space(phi.map.target(), phi.to.big.space) || phi.map.degree() != 0) {
        report.fail("morphism wiring", "f must be a degree-0 map N -> B");
        return report;
    }
    auto merge = [&report](ValidationReport r) {
        for (auto& item : r.items) report.items.push_back(std::move(item));
    };
    merge(maps_equal_report("f is a chain map",
                            compose(phi.to.big.differential, phi.map),
                            compose(phi.map, phi.from.big.differential)));
    merge(maps_equal_report("f.h = k.f", compose(phi.map, phi.from.homotopy),
                            compose(phi.to.homotopy, phi.map)));
    return report;
}

/// The induced map on the small sides, f̂ = p f ι. Verifies that both
/// squares commute exactly: i f̂ = f ι and f̂ π = p f.
inline GradedMap induced_small_map(const ContractionMorphism& phi) {
    ValidationReport v = validate_morphism(phi);
    if (!v.passed()) throw MorphismInvalid("invalid contraction morphism; " + v.str());
    GradedMap fhat = compose(phi.to.proj, compose(phi.map, phi.from.incl));
    ValidationReport sq1 = maps_equal_report("i.fhat = f.iota", compose(phi.to.incl, fhat),
                                             compose(phi.map, phi.from.incl));
    ValidationReport sq2 = maps_equal_report("fhat.pi = p.f", compose(fhat, phi.from.proj),
                                             compose(phi.to.proj, phi.map));
    if (!sq1.passed() || !sq2.passed())
        throw InternalAssertion("induced map squares failed; " + sq1.str() + sq2.str());
    return fhat;
}

}  // namespace hpt
