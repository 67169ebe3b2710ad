#pragma once

// Shared fixtures: a graded Lie bracket holder with the shift-convention
// encoding of its codifferential family, and concrete DGLA instances whose
// transfers carry genuinely higher structure. The sign convention
// (q1(sx) = -s(dx), q2(sx⊗sy) = 1/2 (-1)^{deg x} s[x,y]) is never trusted
// blindly: every use passes the symmetric pQ² = 0 gate first.

#include <map>
#include <utility>

#include "hpt/perturbation.hpp"
#include "support.hpp"

namespace hpttest {

using hpt::CoderivationSpec;
using hpt::GradedMap;
using hpt::SpacePtr;
using hpt::TensorCoalgebraPtr;

struct GradedBracket {
    SpacePtr L;
    GradedMap d;                                            // degree +1 on L
    std::map<std::pair<BasisRef, BasisRef>, Element> table;  // [e_i, e_j]

    Element bracket(BasisRef x, BasisRef y) const {
        auto it = table.find({x, y});
        return it == table.end() ? Element{} : it->second;
    }
};

/// Corestriction family on T̄(L[1]) encoding the bracket and differential.
inline CoderivationSpec dgla_spec(const GradedBracket& g, int max_weight) {
    SpacePtr V = hpt::shift_space(g.L);
    TensorCoalgebraPtr T = hpt::make_tensor_coalgebra(V, max_weight);
    CoderivationSpec spec = CoderivationSpec::zero(T, 1);
    // q1(s x) = -s(d x)
    for (const auto& [src, tgt, c] : g.d.entries())
        spec.family[0].add_entry({src.degree - 1, src.index}, {tgt.degree - 1, tgt.index}, -c);
    if (max_weight >= 2) {
        const hpt::WordSpace& ws2 = T->weight(2);
        for (const auto& [deg, basis] : ws2.space()->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                const auto& w = ws2.word_at({deg, i});
                const hpt::Letter& lu = ws2.letter(w[0]);
                const hpt::Letter& lv = ws2.letter(w[1]);
                BasisRef x{lu.degree + 1, lu.index};  // back in L
                BasisRef y{lv.degree + 1, lv.index};
                Element b = g.bracket(x, y);
                if (b.is_zero()) continue;
                Rational c(1, 2);
                if (x.degree % 2 != 0) c = -c;  // (-1)^{deg_L x}
                for (const auto& [t, v] : b.terms())
                    spec.family[1].add_entry({deg, i}, {t.degree - 1, t.index}, c * v);
            }
    }
    return spec;
}

/// DGLA with an acyclic summand whose homotopy transfer has a nonzero
/// triple bracket: L = <a, b, s : degree 1; m, y : degree 2>, d(s) = m,
/// [a,b] = m, [s,a] = y (graded-symmetric in both cases), everything else 0.
/// H(L) = <a, b, y> and the binary bracket on it transfers to zero, so the
/// whole transferred structure sits in weight >= 3.
inline GradedBracket massey_dgla(const Rational& alpha = Rational(1),
                                 const Rational& beta = Rational(1),
                                 const Rational& gamma = Rational(0),
                                 const Rational& deltaCoeff = Rational(0)) {
    GradedBracket g;
    g.L = hpt::make_space({{1, {"a", "b", "s"}}, {2, {"m", "y"}}});
    GradedMap d(g.L, g.L, 1);
    d.add_entry({1, 2}, {2, 0}, 1);  // d(s) = m
    g.d = d;
    const BasisRef a{1, 0}, b{1, 1}, s{1, 2};
    auto put = [&](BasisRef x, BasisRef y, BasisRef value, const Rational& c) {
        if (c.is_zero()) return;
        Element e;
        e.add(value, c);
        g.table[{x, y}] = e;
        g.table[{y, x}] = e;  // [x,y] = [y,x] for odd-degree x, y
    };
    put(a, b, {2, 0}, alpha);        // [a,b] = alpha m
    put(s, a, {2, 1}, beta);         // [s,a] = beta y
    put(s, b, {2, 1}, gamma);        // [s,b] = gamma y
    if (!deltaCoeff.is_zero()) {
        Element e;
        e.add({2, 0}, deltaCoeff);
        g.table[{s, s}] = e;         // [s,s] = delta m
    }
    return g;
}

/// The generator contraction (W ⇄ V, k) for the Massey DGLA: W = H(L)[1]
/// spanned by sa, sb, sy; k(sm) = ss.
inline Contraction massey_contraction(const CoderivationSpec& spec) {
    const SpacePtr& V = spec.ambient->generators();
    SpacePtr W = hpt::make_space({{0, {"a", "b"}}, {1, {"y"}}});
    GradedMap dV = spec.family[0];
    GradedMap d1(V, V, 1);
    for (const auto& [src, tgt, c] : dV.entries()) d1.add_entry(src, tgt, c);
    hpt::DGModule big(V, d1);
    hpt::DGModule small(W, GradedMap::zero(W, W, 1));
    GradedMap iota(W, V, 0);
    iota.add_entry({0, 0}, {0, 0}, 1);  // a -> sa
    iota.add_entry({0, 1}, {0, 1}, 1);  // b -> sb
    iota.add_entry({1, 0}, {1, 1}, 1);  // y -> sy
    GradedMap pi(V, W, 0);
    pi.add_entry({0, 0}, {0, 0}, 1);
    pi.add_entry({0, 1}, {0, 1}, 1);
    pi.add_entry({1, 1}, {1, 0}, 1);
    GradedMap k(V, V, -1);
    k.add_entry({1, 0}, {0, 2}, 1);  // k(sm) = ss
    Contraction out;
    out.big = big;
    out.small = small;
    out.incl = std::move(iota);
    out.proj = std::move(pi);
    out.homotopy = std::move(k);
    return out;
}

/// Variant with two acyclic pairs and [a,b] = m + m₂: the tensor-power
/// homotopy Tk then moves invariant words like m∧m₂ off the invariant
/// subspace, so the transfer genuinely runs on the weak hypothesis
/// ι_∂(A∩M) ⊆ A rather than h(A) ⊆ A.
inline GradedBracket massey_dgla_two_pairs() {
    GradedBracket g;
    g.L = hpt::make_space({{1, {"a", "b", "s", "s2"}}, {2, {"m", "y", "m2"}}});
    GradedMap d(g.L, g.L, 1);
    d.add_entry({1, 2}, {2, 0}, 1);  // d(s) = m
    d.add_entry({1, 3}, {2, 2}, 1);  // d(s2) = m2
    g.d = d;
    const BasisRef a{1, 0}, b{1, 1}, s{1, 2};
    Element mm2;
    mm2.add({2, 0}, 1);
    mm2.add({2, 2}, 1);
    g.table[{a, b}] = mm2;
    g.table[{b, a}] = mm2;
    Element y;
    y.add({2, 1}, 1);
    g.table[{s, a}] = y;
    g.table[{a, s}] = y;
    return g;
}

inline Contraction two_pairs_contraction(const CoderivationSpec& spec) {
    const SpacePtr& V = spec.ambient->generators();
    SpacePtr W = hpt::make_space({{0, {"a", "b"}}, {1, {"y"}}});
    GradedMap d1(V, V, 1);
    for (const auto& [src, tgt, c] : spec.family[0].entries()) d1.add_entry(src, tgt, c);
    hpt::DGModule big(V, d1);
    hpt::DGModule small(W, GradedMap::zero(W, W, 1));
    GradedMap iota(W, V, 0);
    iota.add_entry({0, 0}, {0, 0}, 1);  // a
    iota.add_entry({0, 1}, {0, 1}, 1);  // b
    iota.add_entry({1, 0}, {1, 1}, 1);  // y
    GradedMap pi(V, W, 0);
    pi.add_entry({0, 0}, {0, 0}, 1);
    pi.add_entry({0, 1}, {0, 1}, 1);
    pi.add_entry({1, 1}, {1, 0}, 1);
    GradedMap k(V, V, -1);
    k.add_entry({1, 0}, {0, 2}, 1);  // k(m) = s
    k.add_entry({1, 2}, {0, 3}, 1);  // k(m2) = s2
    Contraction out;
    out.big = big;
    out.small = small;
    out.incl = std::move(iota);
    out.proj = std::move(pi);
    out.homotopy = std::move(k);
    return out;
}

/// sl₂ (degree 0) ⊕ the massey DGLA (degrees 1, 2), with no cross brackets:
/// the lift of the sl₂ bracket makes the perturbation genuinely relative
/// (ψ ≠ 0 on tensor words) while the massey part contributes a nonzero
/// triple bracket after transfer.
inline GradedBracket sl2_massey_dgla() {
    GradedBracket g;
    g.L = hpt::make_space({{0, {"A", "B", "H"}}, {1, {"a", "b", "s"}}, {2, {"m", "y"}}});
    GradedMap d(g.L, g.L, 1);
    d.add_entry({1, 2}, {2, 0}, 1);  // d(s) = m
    g.d = d;
    const BasisRef A{0, 0}, B{0, 1}, H{0, 2};
    auto anti = [&](BasisRef x, BasisRef y, BasisRef value, long c) {
        Element e;
        e.add(value, Rational(c));
        g.table[{x, y}] = e;
        Element m = e;
        m *= Rational(-1);
        g.table[{y, x}] = m;
    };
    anti(A, B, H, 1);
    anti(H, A, A, 2);
    anti(H, B, B, -2);
    const BasisRef a{1, 0}, b{1, 1}, s{1, 2};
    auto sym = [&](BasisRef x, BasisRef y, BasisRef value, long c) {
        Element e;
        e.add(value, Rational(c));
        g.table[{x, y}] = e;
        g.table[{y, x}] = e;
    };
    sym(a, b, {2, 0}, 1);  // [a,b] = m
    sym(s, a, {2, 1}, 1);  // [s,a] = y
    return g;
}

/// Generator contraction for sl2_massey_dgla: W keeps the sl₂ letters and
/// the massey homology letters; k(sm) = ss.
inline Contraction sl2_massey_contraction(const CoderivationSpec& spec) {
    const SpacePtr& V = spec.ambient->generators();
    SpacePtr W = hpt::make_space({{-1, {"A", "B", "H"}}, {0, {"a", "b"}}, {1, {"y"}}});
    GradedMap d1(V, V, 1);
    for (const auto& [src, tgt, c] : spec.family[0].entries()) d1.add_entry(src, tgt, c);
    hpt::DGModule big(V, d1);
    hpt::DGModule small(W, GradedMap::zero(W, W, 1));
    GradedMap iota(W, V, 0);
    GradedMap pi(V, W, 0);
    for (int i = 0; i < 3; ++i) {
        iota.add_entry({-1, i}, {-1, i}, 1);
        pi.add_entry({-1, i}, {-1, i}, 1);
    }
    iota.add_entry({0, 0}, {0, 0}, 1);
    iota.add_entry({0, 1}, {0, 1}, 1);
    iota.add_entry({1, 0}, {1, 1}, 1);
    pi.add_entry({0, 0}, {0, 0}, 1);
    pi.add_entry({0, 1}, {0, 1}, 1);
    pi.add_entry({1, 1}, {1, 0}, 1);
    GradedMap k(V, V, -1);
    k.add_entry({1, 0}, {0, 2}, 1);  // k(sm) = ss
    Contraction out;
    out.big = big;
    out.small = small;
    out.incl = std::move(iota);
    out.proj = std::move(pi);
    out.homotopy = std::move(k);
    return out;
}

/// Draws global perturbations until one is locally nilpotent for the
/// contraction. Deterministic for a fixed seed; returns nullopt when the
/// family keeps failing (callers treat that as a skipped draw).
inline std::optional<GradedMap> random_nilpotent_perturbation(Rng& rng, const Contraction& c,
                                                              int maxIter, int tries = 60) {
    for (int t = 0; t < tries; ++t) {
        GradedMap delta = random_global_perturbation(rng, c.big);
        if (delta.is_zero()) continue;
        try {
            hpt::check_nilpotency(c, delta, maxIter);
            return delta;
        } catch (const hpt::NotLocallyNilpotent&) {
            continue;
        }
    }
    return std::nullopt;
}

}  // namespace hpttest
