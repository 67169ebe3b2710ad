#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hpt/contraction.hpp"
#include "hpt/graded.hpp"
#include "hpt/tensor.hpp"

namespace hpt {

/// Sparse element of X⊗Y for graded spaces X, Y, kept as coefficient-indexed
/// pairs of basis positions. Used for coproduct values, where materializing
/// the product space would be wasteful.
class PairElement {
public:
    void add(BasisRef a, BasisRef b, const Rational& c) {
        if (c.is_zero()) return;
        auto key = std::make_pair(a, b);
        auto [it, inserted] = terms_.emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<std::pair<BasisRef, BasisRef>, Rational>& terms() const { return terms_; }

    PairElement& operator+=(const PairElement& o) {
        for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
        return *this;
    }

    PairElement& operator-=(const PairElement& o) {
        for (const auto& [k, c] : o.terms_) add(k.first, k.second, -c);
        return *this;
    }

    friend PairElement operator-(PairElement a, const PairElement& b) { return a -= b; }
    friend bool operator==(const PairElement&, const PairElement&) = default;

    std::string str(const SpacePtr& left, const SpacePtr& right) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) out += " + ";
            out += c.str() + " (" + left->label(k.first.degree, k.first.index) + ")⊗(" +
                   right->label(k.second.degree, k.second.index) + ")";
            first = false;
        }
        return out;
    }

private:
    std::map<std::pair<BasisRef, BasisRef>, Rational> terms_;
};

/// (f⊗g) applied to a pair element, with the Koszul sign
/// (-1)^{deg(g)·deg(first factor)}.
inline PairElement apply_pair(const GradedMap& f, const GradedMap& g, const PairElement& x) {
    PairElement out;
    for (const auto& [k, c] : x.terms()) {
        Element fa = f.apply(k.first);
        Element gb = g.apply(k.second);
        if (fa.is_zero() || gb.is_zero()) continue;
        Rational coeff = c;
        if ((g.degree() % 2 != 0) && (k.first.degree % 2 != 0)) coeff = -coeff;
        for (const auto& [ba, ca] : fa.terms())
            for (const auto& [bb, cb] : gb.terms()) out.add(ba, bb, coeff * ca * cb);
    }
    return out;
}

/// The reduced tensor coalgebra T̄(V) truncated at a maximal weight W: the
/// direct sum of the word spaces ⊗ⁿV for 1 ≤ n ≤ W, with the deconcatenation
/// coproduct. Every identity handled downstream is weight-filtered, so the
/// truncation is exact for statements about words of weight ≤ W.
class TensorCoalgebra {
public:
    using Word = WordSpace::Word;

    TensorCoalgebra(SpacePtr generators, int max_weight)
        : generators_(std::move(generators)), max_weight_(max_weight) {
        if (max_weight < 1) throw LengthMismatch("max weight must be >= 1");
        std::map<int, std::vector<std::string>> components;
        for (int n = 1; n <= max_weight_; ++n) {
            weights_.push_back(std::make_shared<const WordSpace>(generators_, n));
            const WordSpace& ws = *weights_.back();
            for (const auto& [d, basis] : ws.space()->components) {
                auto& labels = components[d];
                for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                    BasisRef ambient{d, static_cast<int>(labels.size())};
                    labels.push_back(basis[static_cast<size_t>(i)]);
                    slot_of_[ambient] = {n, BasisRef{d, i}};
                    ambient_of_[{n, BasisRef{d, i}}] = ambient;
                }
            }
        }
        space_ = make_space(std::move(components));
    }

    const SpacePtr& generators() const { return generators_; }
    int max_weight() const { return max_weight_; }
    const SpacePtr& space() const { return space_; }
    const WordSpace& weight(int n) const { return *weights_.at(static_cast<size_t>(n - 1)); }

    std::pair<int, BasisRef> slot(BasisRef ambient) const {
        auto it = slot_of_.find(ambient);
        if (it == slot_of_.end()) throw SemanticError("position not in the truncated coalgebra");
        return it->second;
    }

    BasisRef ambient(int n, BasisRef inWeight) const { return ambient_of_.at({n, inWeight}); }

    const Word& word_at(BasisRef ambientPos) const {
        auto [n, p] = slot(ambientPos);
        return weight(n).word_at(p);
    }

    BasisRef position(const Word& w) const {
        const int n = static_cast<int>(w.size());
        if (n < 1 || n > max_weight_) throw LengthMismatch("word weight outside truncation");
        return ambient(n, weight(n).position(w));
    }

    /// Element of ⊗ⁿV (word-space coordinates) into ambient coordinates.
    Element inject(int n, const Element& x) const {
        Element out;
        for (const auto& [b, c] : x.terms()) out.add(ambient(n, b), c);
        return out;
    }

    /// Weight-n component of an ambient element, in word-space coordinates.
    Element weight_component(int n, const Element& x) const {
        Element out;
        for (const auto& [b, c] : x.terms()) {
            auto [m, p] = slot(b);
            if (m == n) out.add(p, c);
        }
        return out;
    }

    /// Deconcatenation of a basis word:
    ///   𝔞(x₁⊗...⊗xₙ) = Σ_{i=1}^{n-1} (x₁⊗...⊗xᵢ)⊗(x_{i+1}⊗...⊗xₙ).
    /// Single letters map to zero.
    PairElement coproduct(BasisRef ambientPos) const {
        PairElement out;
        const Word& w = word_at(ambientPos);
        for (size_t i = 1; i < w.size(); ++i) {
            Word left(w.begin(), w.begin() + static_cast<long>(i));
            Word right(w.begin() + static_cast<long>(i), w.end());
            out.add(position(left), position(right), 1);
        }
        return out;
    }

    PairElement coproduct(const Element& x) const {
        PairElement out;
        for (const auto& [b, c] : x.terms()) {
            PairElement piece = coproduct(b);
            for (const auto& [k, v] : piece.terms()) out.add(k.first, k.second, c * v);
        }
        return out;
    }

    /// The projection p: T̄(V) -> V onto the weight-1 component.
    Element corestriction(const Element& x) const {
        Element out;
        for (const auto& [b, c] : x.terms()) {
            auto [n, p] = slot(b);
            if (n == 1) {
                const Word& w = weight(1).word_at(p);
                const Letter& l = weight(1).letter(w[0]);
                out.add({l.degree, l.index}, c);
            }
        }
        return out;
    }

    GradedMap corestriction_map() const {
        GradedMap out(space_, generators_, 0);
        const WordSpace& ws = weight(1);
        for (const auto& [d, basis] : ws.space()->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                const Letter& l = ws.letter(ws.word_at({d, i})[0]);
                out.add_entry(ambient(1, {d, i}), {l.degree, l.index}, 1);
            }
        return out;
    }

    /// Assembles an endomorphism-like map of the truncated coalgebra from a
    /// per-basis-word evaluator producing ambient-coordinate elements.
    template <typename F>
    GradedMap assemble(const SpacePtr& targetSpace, int degree, F&& eval) const {
        GradedMap out(space_, targetSpace, degree);
        for (const auto& [d, basis] : space_->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                Element img = eval(BasisRef{d, i});
                for (const auto& [b, c] : img.terms()) out.add_entry({d, i}, b, c);
            }
        return out;
    }

    /// Direct sum over weights of maps ⊗ⁿ(src) -> ⊗ⁿ(tgt).
    static GradedMap weightwise(const TensorCoalgebra& src, const TensorCoalgebra& tgt,
                                const std::vector<GradedMap>& perWeight) {
        if (static_cast<int>(perWeight.size()) != src.max_weight_ ||
            src.max_weight_ != tgt.max_weight_)
            throw LengthMismatch("weightwise: need one map per weight");
        int degree = perWeight.front().degree();
        GradedMap out(src.space(), tgt.space(), degree);
        for (int n = 1; n <= src.max_weight_; ++n) {
            const GradedMap& f = perWeight[static_cast<size_t>(n - 1)];
            if (f.degree() != degree) throw DegreeError("weightwise: mixed degrees");
            for (const auto& [s, t, c] : f.entries())
                out.add_entry(src.ambient(n, s), tgt.ambient(n, t), c);
        }
        return out;
    }

private:
    SpacePtr generators_;
    int max_weight_;
    std::vector<std::shared_ptr<const WordSpace>> weights_;
    SpacePtr space_;
    std::map<BasisRef, std::pair<int, BasisRef>> slot_of_;
    std::map<std::pair<int, BasisRef>, BasisRef> ambient_of_;
};

using TensorCoalgebraPtr = std::shared_ptr<const TensorCoalgebra>;

inline TensorCoalgebraPtr make_tensor_coalgebra(SpacePtr generators, int max_weight) {
    return std::make_shared<const TensorCoalgebra>(std::move(generators), max_weight);
}

/// A family of corestrictions q_n: ⊗ⁿV -> V of one homogeneous degree,
/// determining a coderivation of the truncated coalgebra.
struct CoderivationSpec {
    TensorCoalgebraPtr ambient;
    int degree = 0;
    std::vector<GradedMap> family;  // family[n-1]: weight(n).space() -> V

    static CoderivationSpec zero(TensorCoalgebraPtr coalg, int degree) {
        CoderivationSpec spec;
        spec.ambient = std::move(coalg);
        spec.degree = degree;
        for (int n = 1; n <= spec.ambient->max_weight(); ++n)
            spec.family.push_back(GradedMap::zero(spec.ambient->weight(n).space(),
                                                  spec.ambient->generators(), degree));
        return spec;
    }

    void validate() const {
        if (static_cast<int>(family.size()) != ambient->max_weight())
            throw LengthMismatch("corestriction family must have one entry per weight");
        for (int n = 1; n <= ambient->max_weight(); ++n) {
            const GradedMap& q = family[static_cast<size_t>(n - 1)];
            if (q.degree() != degree) throw DegreeError("corestriction of wrong degree");
            if (!same_space(q.source(), ambient->weight(n).space()) ||
                !same_space(q.target(), ambient->generators()))
                throw SpaceMismatch("corestriction endpoints");
        }
    }
};

/// The unique coderivation with the given corestrictions:
///   Q(a₁⊗...⊗aₙ) = Σ_{l=1}^{n} Σ_{i=0}^{n-l} (-1)^{k(deg a₁+...+deg aᵢ)}
///                  a₁⊗...⊗aᵢ⊗q_l(a_{i+1}⊗...⊗a_{i+l})⊗...⊗aₙ.
inline GradedMap extend_coderivation(const CoderivationSpec& spec) {
    spec.validate();
    const TensorCoalgebra& T = *spec.ambient;
    const bool odd = spec.degree % 2 != 0;
    return T.assemble(T.space(), spec.degree, [&](BasisRef pos) {
        const auto& w = T.word_at(pos);
        const int n = static_cast<int>(w.size());
        Element out;
        for (int l = 1; l <= n; ++l) {
            const GradedMap& q = spec.family[static_cast<size_t>(l - 1)];
            if (q.is_zero()) continue;
            const WordSpace& wsl = T.weight(l);
            int prefix_degree = 0;
            for (int i = 0; i + l <= n; ++i) {
                if (i > 0) prefix_degree += T.weight(n).letter(w[static_cast<size_t>(i - 1)]).degree;
                TensorCoalgebra::Word sub(w.begin() + i, w.begin() + i + l);
                Element img = q.apply(wsl.position(sub));
                if (img.is_zero()) continue;
                int sign = (odd && prefix_degree % 2 != 0) ? -1 : 1;
                for (const auto& [b, c] : img.terms()) {
                    TensorCoalgebra::Word spliced(w.begin(), w.begin() + i);
                    spliced.push_back(T.weight(n).letter_id(b));
                    spliced.insert(spliced.end(), w.begin() + i + l, w.end());
                    out.add(T.position(spliced), c * Rational(sign));
                }
            }
        }
        return out;
    });
}

/// Corestriction family of an endomorphism-like map F on the truncated
/// coalgebra: q_n = p∘F restricted to weight n, with values in the target
/// generator space.
inline std::vector<GradedMap> corestriction_family(const TensorCoalgebra& src,
                                                   const TensorCoalgebra& tgt,
                                                   const GradedMap& F) {
    std::vector<GradedMap> out;
    for (int n = 1; n <= src.max_weight(); ++n) {
        const WordSpace& ws = src.weight(n);
        GradedMap q(ws.space(), tgt.generators(), F.degree());
        for (const auto& [d, basis] : ws.space()->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                Element img = F.apply(src.ambient(n, {d, i}));
                Element letters = tgt.corestriction(img);
                for (const auto& [b, c] : letters.terms()) q.add_entry({d, i}, b, c);
            }
        out.push_back(std::move(q));
    }
    return out;
}

/// The unique morphism of graded coalgebras F: T̄(V) -> T̄(V') with
/// corestriction p∘F = f. All f_n must have degree 0; the weight-(n -> m)
/// component sums f_{k₁}⊗...⊗f_{k_m} over ordered partitions n = k₁+...+k_m.
inline GradedMap extend_coalgebra_morphism(const TensorCoalgebra& src, const TensorCoalgebra& tgt,
                                           const std::vector<GradedMap>& family) {
    if (static_cast<int>(family.size()) != src.max_weight())
        throw LengthMismatch("morphism corestriction family must have one entry per weight");
    for (int n = 1; n <= src.max_weight(); ++n) {
        const GradedMap& f = family[static_cast<size_t>(n - 1)];
        if (f.degree() != 0) throw DegreeError("coalgebra morphism corestrictions must have degree 0");
        if (!same_space(f.source(), src.weight(n).space()) ||
            !same_space(f.target(), tgt.generators()))
            throw SpaceMismatch("morphism corestriction endpoints");
    }
    return src.assemble(tgt.space(), 0, [&](BasisRef pos) {
        const auto& w = src.word_at(pos);
        const int n = static_cast<int>(w.size());
        Element out;
        // Blockwise expansion: terms carry (target word so far, coefficient).
        std::vector<std::pair<TensorCoalgebra::Word, Rational>> partial = {{{}, Rational(1)}};
        std::function<void(int, std::vector<std::pair<TensorCoalgebra::Word, Rational>>&)> walk =
            [&](int start, std::vector<std::pair<TensorCoalgebra::Word, Rational>>& terms) {
                if (terms.empty()) return;
                if (start == n) {
                    for (auto& [word, c] : terms) out.add(tgt.position(word), c);
                    return;
                }
                for (int k = 1; start + k <= n; ++k) {
                    const GradedMap& f = family[static_cast<size_t>(k - 1)];
                    if (f.is_zero()) continue;
                    TensorCoalgebra::Word sub(w.begin() + start, w.begin() + start + k);
                    Element img = f.apply(src.weight(k).position(sub));
                    if (img.is_zero()) continue;
                    std::vector<std::pair<TensorCoalgebra::Word, Rational>> next;
                    for (const auto& [word, c] : terms)
                        for (const auto& [b, v] : img.terms()) {
                            auto extended = word;
                            extended.push_back(tgt.weight(1).letter_id(b));
                            next.emplace_back(std::move(extended), c * v);
                        }
                    walk(start + k, next);
                }
            };
        walk(0, partial);
        return out;
    });
}

/// Result of the tensor trick: the contraction (T̄(M) ⇄ T̄(N), Th) together
/// with both truncated coalgebras.
struct CoalgebraContraction {
    TensorCoalgebraPtr big;    // T̄(N)
    TensorCoalgebraPtr small;  // T̄(M)
    Contraction contraction;
};

/// Extends a contraction of generators to the truncated reduced tensor
/// coalgebras: inclusion ⊕ι^{⊗n}, projection ⊕π^{⊗n}, homotopy Th = ⊕Tⁿh,
/// differentials extended letterwise.
inline CoalgebraContraction tensor_trick(const Contraction& gen, int max_weight) {
    CoalgebraContraction out;
    out.big = make_tensor_coalgebra(gen.big.space, max_weight);
    out.small = make_tensor_coalgebra(gen.small.space, max_weight);
    std::vector<GradedMap> dBig, dSmall, incl, proj, homotopy;
    for (int n = 1; n <= max_weight; ++n) {
        const WordSpace& wb = out.big->weight(n);
        const WordSpace& ws = out.small->weight(n);
        dBig.push_back(letterwise_extension(wb, gen.big.differential));
        dSmall.push_back(letterwise_extension(ws, gen.small.differential));
        std::vector<const GradedMap*> incls(static_cast<size_t>(n), &gen.incl);
        std::vector<const GradedMap*> projs(static_cast<size_t>(n), &gen.proj);
        incl.push_back(tensor_factor_map(ws, wb, incls));
        proj.push_back(tensor_factor_map(wb, ws, projs));
        homotopy.push_back(tensor_power_homotopy(gen, wb));
    }
    out.contraction.big =
        DGModule(out.big->space(), TensorCoalgebra::weightwise(*out.big, *out.big, dBig));
    out.contraction.small =
        DGModule(out.small->space(), TensorCoalgebra::weightwise(*out.small, *out.small, dSmall));
    out.contraction.incl = TensorCoalgebra::weightwise(*out.small, *out.big, incl);
    out.contraction.proj = TensorCoalgebra::weightwise(*out.big, *out.small, proj);
    out.contraction.homotopy = TensorCoalgebra::weightwise(*out.big, *out.big, homotopy);
    return out;
}

template <typename Coalg>
PairElement coproduct_of(const Coalg& c, const Element& x) {
    PairElement out;
    for (const auto& [b, v] : x.terms()) {
        PairElement piece = c.coproduct(b);
        for (const auto& [k, w] : piece.terms()) out.add(k.first, k.second, v * w);
    }
    return out;
}

/// Coalgebra-contraction test: ι and π must be morphisms of graded
/// coalgebras and the homotopy must satisfy
///   (ιπ⊗h + h⊗Id)∘Δ = Δ∘h
/// on every basis vector. The big and small providers supply the coproducts.
template <typename BigCoalg, typename SmallCoalg>
ValidationReport is_coalgebra_contraction(const Contraction& c, const BigCoalg& big,
                                          const SmallCoalg& small) {
    if (!same_space(big.space(), c.big.space) || !same_space(small.space(), c.small.space))
        throw SpaceMismatch("is_coalgebra_contraction: providers do not match the contraction");
    ValidationReport report;
    const GradedMap retr = compose(c.incl, c.proj);
    const GradedMap idBig = GradedMap::identity(c.big.space);
    for (const auto& [d, basis] : c.small.space->components)
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            BasisRef s{d, i};
            PairElement lhs = coproduct_of(big, c.incl.apply(s));
            PairElement rhs = apply_pair(c.incl, c.incl, small.coproduct(s));
            if (!(lhs == rhs)) {
                report.fail("iota is a coalgebra morphism", describe(c.small.space, s));
                break;
            }
        }
    for (const auto& [d, basis] : c.big.space->components)
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            BasisRef b{d, i};
            PairElement lhs = coproduct_of(small, c.proj.apply(b));
            PairElement rhs = apply_pair(c.proj, c.proj, big.coproduct(b));
            if (!(lhs == rhs)) {
                report.fail("pi is a coalgebra morphism", describe(c.big.space, b));
                break;
            }
        }
    for (const auto& [d, basis] : c.big.space->components)
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            BasisRef b{d, i};
            PairElement lhs = coproduct_of(big, c.homotopy.apply(b));
            PairElement delta = big.coproduct(b);
            PairElement rhs = apply_pair(retr, c.homotopy, delta);
            rhs += apply_pair(c.homotopy, idBig, delta);
            if (!(lhs == rhs)) {
                report.fail("(iota.pi ⊗ h + h ⊗ id).coproduct = coproduct.h",
                            describe(c.big.space, b));
                break;
            }
        }
    return report;
}

}  // namespace hpt
