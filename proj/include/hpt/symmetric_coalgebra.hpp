#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hpt/tensor_coalgebra.hpp"

namespace hpt {

inline std::vector<Permutation> all_permutations(int n) {
    Permutation p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<Permutation> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// e_n = (1/n!) Σ_σ σ_tw, the projector onto the invariant tensors ⊙ⁿV.
inline GradedMap symmetrizer(const WordSpace& ws) {
    const auto perms = all_permutations(ws.length());
    const Rational weight = Rational::inverse_factorial(ws.length());
    GradedMap out = GradedMap::zero(ws.space(), ws.space(), 0);
    for (const auto& sigma : perms) {
        GradedMap t = ws.twist_map(sigma);
        t *= weight;
        out += t;
    }
    return out;
}

inline GradedMap symmetrizer(const SpacePtr& generators, int n) {
    WordSpace ws(generators, n);
    return symmetrizer(ws);
}

/// The reduced symmetric coalgebra S̄(V) realized as the Σₙ-invariant
/// tensors inside the truncated T̄(V). The basis at weight n consists of one
/// signed orbit sum per multiset of letters, normalized so the sorted
/// representative word carries coefficient 1; multisets with a repeated
/// odd-degree letter produce zero and are omitted.
class SymmetricCoalgebra {
public:
    using Word = WordSpace::Word;

    explicit SymmetricCoalgebra(TensorCoalgebraPtr ambient) : ambient_(std::move(ambient)) {
        std::map<int, std::vector<std::string>> components;
        for (int n = 1; n <= ambient_->max_weight(); ++n) {
            const WordSpace& ws = ambient_->weight(n);
            const auto perms = all_permutations(n);
            Word rep(static_cast<size_t>(n), 0);
            enumerate_multisets(ws, perms, rep, 0, 0, components);
        }
        space_ = make_space(std::move(components));
        for (int i = 0; i < static_cast<int>(orbits_.size()); ++i)
            orbit_by_spos_[orbits_[static_cast<size_t>(i)].spos] = i;
    }

    const TensorCoalgebraPtr& ambient_coalgebra() const { return ambient_; }
    const SpacePtr& space() const { return space_; }

    struct Orbit {
        int weight = 0;
        Word rep;         // sorted letter ids
        Element vector;   // ambient T̄ coordinates, rep coefficient 1
        BasisRef spos;    // position in the S̄ space
    };

    const std::vector<Orbit>& orbits() const { return orbits_; }
    const Orbit& orbit_at(BasisRef spos) const {
        return orbits_.at(static_cast<size_t>(orbit_by_spos_.at(spos)));
    }

    /// Orbit-sum vectors of one weight, in ambient coordinates.
    std::vector<Element> invariant_basis(int n) const {
        std::vector<Element> out;
        for (const auto& o : orbits_)
            if (o.weight == n) out.push_back(o.vector);
        return out;
    }

    /// ι_S: S̄ -> T̄, columns the orbit-sum vectors.
    GradedMap inclusion() const {
        GradedMap out(space_, ambient_->space(), 0);
        for (const auto& o : orbits_)
            for (const auto& [b, c] : o.vector.terms()) out.add_entry(o.spos, b, c);
        return out;
    }

    /// Weightwise symmetrization of an ambient element: Σₙ e_n on each
    /// weight component, exact.
    Element symmetrize(const Element& x) const {
        Element out;
        for (const auto& [b, c] : x.terms()) {
            auto [n, p] = ambient_->slot(b);
            const WordSpace& ws = ambient_->weight(n);
            const Word& w = ws.word_at(p);
            const auto degrees = ws.letter_degrees(w);
            const Rational scale = c * Rational::inverse_factorial(n);
            for (const auto& sigma : all_permutations(n)) {
                auto [permuted, sign] = twist_apply(sigma, w, degrees);
                out.add(ambient_->position(permuted), scale * Rational(sign));
            }
        }
        return out;
    }

    bool is_invariant(const Element& x) const { return symmetrize(x) == x; }

    /// Coordinates of an invariant ambient element in the orbit basis.
    /// The coefficient of each orbit is the coefficient of its sorted
    /// representative word. Throws if the element is not invariant.
    Element coordinates(const Element& x) const {
        Element out;
        for (const auto& [b, c] : x.terms()) {
            const Word& w = ambient_->word_at(b);
            if (!std::is_sorted(w.begin(), w.end())) continue;
            auto it = orbit_by_rep_.find(w);
            if (it == orbit_by_rep_.end())
                throw SemanticError("element is not in the invariant subspace");
            out.add(orbits_[static_cast<size_t>(it->second)].spos, c);
        }
        Element back;
        for (const auto& [s, c] : out.terms()) {
            Element v = orbit_at(s).vector;
            v *= c;
            back += v;
        }
        if (!(back == x)) throw SemanticError("element is not in the invariant subspace");
        return out;
    }

    /// r_S(w) for a single ambient word: the S̄ coordinates of e(w).
    /// At most one orbit (the one with the same multiset) can appear.
    Element retract_word(BasisRef ambientWord) const {
        auto [n, p] = ambient_->slot(ambientWord);
        const WordSpace& ws = ambient_->weight(n);
        const Word& w = ws.word_at(p);
        Word rep = w;
        std::sort(rep.begin(), rep.end());
        auto it = orbit_by_rep_.find(rep);
        Element out;
        if (it == orbit_by_rep_.end()) return out;
        const auto degrees = ws.letter_degrees(w);
        Rational total(0);
        for (const auto& sigma : all_permutations(n)) {
            auto [permuted, sign] = twist_apply(sigma, w, degrees);
            if (permuted == rep) total += Rational(sign);
        }
        total *= Rational::inverse_factorial(n);
        out.add(orbits_[static_cast<size_t>(it->second)].spos, total);
        return out;
    }

    /// r_S: T̄ -> S̄ with r_S∘ι_S = Id and ι_S∘r_S = e.
    GradedMap retraction() const {
        GradedMap out(ambient_->space(), space_, 0);
        for (const auto& [d, basis] : ambient_->space()->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                Element r = retract_word({d, i});
                for (const auto& [s, c] : r.terms()) out.add_entry({d, i}, s, c);
            }
        return out;
    }

    /// Coproduct in S̄ coordinates: deconcatenate the orbit vector in T̄ and
    /// retract both tensor legs (exact, since 𝔞 maps S̄ into S̄⊗S̄).
    PairElement coproduct(BasisRef spos) const {
        const Orbit& o = orbit_at(spos);
        PairElement out;
        PairElement raw = ambient_->coproduct(o.vector);
        for (const auto& [k, c] : raw.terms()) {
            Element left = retract_word(k.first);
            Element right = retract_word(k.second);
            for (const auto& [bl, cl] : left.terms())
                for (const auto& [br, cr] : right.terms()) out.add(bl, br, c * cl * cr);
        }
        return out;
    }

private:
    void enumerate_multisets(const WordSpace& ws, const std::vector<Permutation>& perms,
                             Word& rep, int slot, int min_id,
                             std::map<int, std::vector<std::string>>& components) {
        const int n = ws.length();
        if (slot == n) {
            Element u;
            const auto degrees = ws.letter_degrees(rep);
            for (const auto& sigma : perms) {
                auto [permuted, sign] = twist_apply(sigma, rep, degrees);
                u.add(ambient_->position(permuted), sign);
            }
            if (u.is_zero()) return;  // repeated odd-degree letter
            Rational lead = u.coeff(ambient_->position(rep));
            u *= lead.inverse();
            int degree = ws.word_degree(rep);
            auto& labels = components[degree];
            std::string label;
            for (size_t i = 0; i < rep.size(); ++i) {
                const Letter& l = ws.letter(rep[i]);
                if (i) label += "⊙";  // ⊙
                label += ws.generators()->label(l.degree, l.index);
            }
            BasisRef spos{degree, static_cast<int>(labels.size())};
            labels.push_back(std::move(label));
            orbit_by_rep_[rep] = static_cast<int>(orbits_.size());
            orbits_.push_back({n, rep, std::move(u), spos});
            return;
        }
        for (int id = min_id; id < ws.letter_count(); ++id) {
            rep[static_cast<size_t>(slot)] = id;
            enumerate_multisets(ws, perms, rep, slot + 1, id, components);
        }
    }

    TensorCoalgebraPtr ambient_;
    SpacePtr space_;
    std::vector<Orbit> orbits_;
    std::map<Word, int> orbit_by_rep_;
    std::map<BasisRef, int> orbit_by_spos_;
};

struct WitnessResult {
    bool ok = true;
    std::string witness;
};

/// True iff the endomorphism maps every orbit-sum vector back into the
/// invariant subspace; on failure names the offending orbit.
inline WitnessResult preserves_symmetric(const GradedMap& Q, const SymmetricCoalgebra& sym) {
    for (const auto& o : sym.orbits()) {
        Element image = Q.apply(o.vector);
        if (!sym.is_invariant(image))
            return {false, "image of " + describe(sym.space(), o.spos) +
                               " is not invariant: " +
                               image.str(sym.ambient_coalgebra()->space())};
    }
    return {};
}

/// pQ² on every basis word of weight ≤ W (the codifferential criterion on
/// the tensor coalgebra).
inline WitnessResult is_codifferential_tensor(const CoderivationSpec& spec) {
    if (spec.degree != 1) throw DegreeError("codifferential test needs degree +1");
    const TensorCoalgebra& T = *spec.ambient;
    GradedMap Q = extend_coderivation(spec);
    for (const auto& [d, basis] : T.space()->components)
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            Element v = T.corestriction(Q.apply(Q.apply(BasisRef{d, i})));
            if (!v.is_zero())
                return {false, "pQ²(" + T.space()->label(d, i) +
                                   ") = " + v.str(T.generators())};
        }
    return {};
}

/// pQ² on every orbit-sum vector (the criterion on the symmetric part).
inline WitnessResult is_codifferential_symmetric(const CoderivationSpec& spec,
                                                 const SymmetricCoalgebra& sym) {
    if (spec.degree != 1) throw DegreeError("codifferential test needs degree +1");
    const TensorCoalgebra& T = *spec.ambient;
    GradedMap Q = extend_coderivation(spec);
    for (const auto& o : sym.orbits()) {
        Element v = T.corestriction(Q.apply(Q.apply(o.vector)));
        if (!v.is_zero())
            return {false, "pQ²(" + describe(sym.space(), o.spos) +
                               ") = " + v.str(T.generators())};
    }
    return {};
}

/// A bilinear product on a space concentrated in degree 0, given by its
/// structure constants on basis pairs.
struct ProductTable {
    SpacePtr algebra;  // L
    std::map<std::pair<int, int>, Element> entries;

    Element product(int i, int j) const {
        auto it = entries.find({i, j});
        return it == entries.end() ? Element{} : it->second;
    }

    Element product(const Element& x, const Element& y) const {
        Element out;
        for (const auto& [bx, cx] : x.terms())
            for (const auto& [by, cy] : y.terms()) {
                Element p = product(bx.index, by.index);
                p *= cx * cy;
                out += p;
            }
        return out;
    }

    int dim() const { return algebra->dim(0); }
};

inline ValidationReport check_antisymmetry(const ProductTable& t) {
    ValidationReport report;
    const int n = t.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Element sum = t.product(i, j) + t.product(j, i);
            if (!sum.is_zero())
                report.fail("antisymmetry",
                            "[" + t.algebra->label(0, i) + "," + t.algebra->label(0, j) +
                                "] + [" + t.algebra->label(0, j) + "," + t.algebra->label(0, i) +
                                "] = " + sum.str(t.algebra));
        }
    return report;
}

inline ValidationReport check_jacobi(const ProductTable& t) {
    ValidationReport report;
    const int n = t.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Element ei = Element::basis({0, i});
                Element ej = Element::basis({0, j});
                Element ek = Element::basis({0, k});
                Element jac = t.product(t.product(ei, ej), ek) +
                              t.product(t.product(ej, ek), ei) +
                              t.product(t.product(ek, ei), ej);
                if (!jac.is_zero()) {
                    report.fail("jacobi", "jacobiator(" + t.algebra->label(0, i) + "," +
                                              t.algebra->label(0, j) + "," +
                                              t.algebra->label(0, k) +
                                              ") = " + jac.str(t.algebra));
                    return report;
                }
            }
    return report;
}

/// The sl₂ bracket table: [A,B] = H, [H,A] = 2A, [H,B] = -2B.
inline ProductTable sl2_table() {
    ProductTable t;
    t.algebra = make_space({{0, {"A", "B", "H"}}});
    auto E = [](int i, long c) {
        Element e;
        e.add({0, i}, Rational(c));
        return e;
    };
    const int A = 0, B = 1, H = 2;
    t.entries[{A, B}] = E(H, 1);
    t.entries[{B, A}] = E(H, -1);
    t.entries[{H, A}] = E(A, 2);
    t.entries[{A, H}] = E(A, -2);
    t.entries[{H, B}] = E(B, -2);
    t.entries[{B, H}] = E(B, 2);
    return t;
}

enum class EncodeMode { associative, lie };

/// Encodes a bilinear product on L (concentrated in degree 0) as a
/// corestriction family on T̄(L[1]): q₂(x⊗y) = xy in associative mode, and
/// the averaged lift q₂(x⊗y) = ½[x,y] in lie mode; every other q_n is zero.
inline CoderivationSpec encode_bilinear(const ProductTable& table, EncodeMode mode,
                                        int max_weight) {
    for (const auto& [d, basis] : table.algebra->components)
        if (d != 0) throw DegreeError("encode_bilinear needs L concentrated in degree 0");
    SpacePtr V = shift_space(table.algebra);  // concentrated in degree -1
    TensorCoalgebraPtr coalg = make_tensor_coalgebra(V, max_weight);
    CoderivationSpec spec = CoderivationSpec::zero(coalg, 1);
    if (max_weight < 2) return spec;
    const WordSpace& ws2 = coalg->weight(2);
    GradedMap q2(ws2.space(), V, 1);
    for (const auto& [d, basis] : ws2.space()->components)
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            const auto& w = ws2.word_at({d, i});
            int x = ws2.letter(w[0]).index;
            int y = ws2.letter(w[1]).index;
            Element value;  // in L coordinates, degree 0
            if (mode == EncodeMode::associative) {
                value = table.product(x, y);
            } else {
                // Averaged lift: q₂(x⊗y) = ½[x,y], so q₂(x⊗y - y⊗x) = [x,y]
                // for an antisymmetric table.
                value = table.product(x, y);
                value *= Rational(1, 2);
            }
            for (const auto& [b, c] : value.terms()) q2.add_entry({d, i}, {-1, b.index}, c);
        }
    spec.family[1] = std::move(q2);
    return spec;
}

/// S^n k = (1/n!) Σ_σ σ_tw ∘ T^n k ∘ σ_tw⁻¹, the symmetrization of the
/// tensor-power homotopy on the n-th power word space.
inline GradedMap symmetrized_homotopy(const Contraction& gen, const WordSpace& wsBig) {
    GradedMap tk = tensor_power_homotopy(gen, wsBig);
    const int n = wsBig.length();
    const Rational weight = Rational::inverse_factorial(n);
    GradedMap out = GradedMap::zero(wsBig.space(), wsBig.space(), -1);
    for (const auto& sigma : all_permutations(n)) {
        Permutation inverse(sigma.size());
        for (size_t i = 0; i < sigma.size(); ++i) inverse[static_cast<size_t>(sigma[i])] = static_cast<int>(i);
        GradedMap term = compose(wsBig.twist_map(sigma), compose(tk, wsBig.twist_map(inverse)));
        term *= weight;
        out += term;
    }
    return out;
}

inline GradedMap symmetrized_homotopy(const Contraction& gen, int n) {
    WordSpace ws(gen.big.space, n);
    return symmetrized_homotopy(gen, ws);
}

/// Restriction of an invariance-preserving ambient map to S̄ coordinates.
/// Throws if some orbit image leaves the invariant subspace.
inline GradedMap symmetric_restriction(const SymmetricCoalgebra& symSrc,
                                       const SymmetricCoalgebra& symTgt, const GradedMap& f) {
    GradedMap out(symSrc.space(), symTgt.space(), f.degree());
    for (const auto& o : symSrc.orbits()) {
        Element image = f.apply(o.vector);
        Element coords = symTgt.coordinates(image);  // throws when not invariant
        for (const auto& [s, c] : coords.terms()) out.add_entry(o.spos, s, c);
    }
    return out;
}

/// The contraction (S̄(M) ⇄ S̄(N), Sk): all maps of the tensor-trick
/// contraction restrict to the invariants, with the homotopy replaced by the
/// weightwise symmetrization of Th. A contraction, though in general not a
/// coalgebra contraction.
inline Contraction symmetric_power_contraction(const Contraction& gen,
                                               const CoalgebraContraction& trick,
                                               const SymmetricCoalgebra& symBig,
                                               const SymmetricCoalgebra& symSmall) {
    std::vector<GradedMap> sk;
    for (int n = 1; n <= trick.big->max_weight(); ++n)
        sk.push_back(symmetrized_homotopy(gen, trick.big->weight(n)));
    GradedMap skFull = TensorCoalgebra::weightwise(*trick.big, *trick.big, sk);

    Contraction out;
    out.big = DGModule(symBig.space(),
                       symmetric_restriction(symBig, symBig, trick.contraction.big.differential));
    out.small = DGModule(
        symSmall.space(),
        symmetric_restriction(symSmall, symSmall, trick.contraction.small.differential));
    out.incl = symmetric_restriction(symSmall, symBig, trick.contraction.incl);
    out.proj = symmetric_restriction(symBig, symSmall, trick.contraction.proj);
    out.homotopy = symmetric_restriction(symBig, symBig, skFull);
    return out;
}

}  // namespace hpt
