#pragma once

#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hpt/graded.hpp"

namespace hpt {

inline std::string tensor_label(const std::string& a, const std::string& b) {
    // Factors that are themselves tensor words get parenthesized, so labels
    // of iterated products stay unique.
    auto wrap = [](const std::string& s) {
        return s.find("⊗") != std::string::npos ? "(" + s + ")" : s;
    };
    return wrap(a) + "⊗" + wrap(b);  // ⊗
}

/// The tensor product A⊗B of two graded spaces, with both directions of the
/// index translation. Basis order at degree d: source degrees of A ascending,
/// then A-index, then B-index. Construction is deterministic, so two
/// independently built products of equal factors compare equal.
class TensorSpace {
public:
    TensorSpace(SpacePtr a, SpacePtr b) : a_(std::move(a)), b_(std::move(b)) {
        std::map<int, std::vector<std::string>> components;
        for (const auto& [da, basisA] : a_->components) {
            for (const auto& [db, basisB] : b_->components) {
                int d = da + db;
                auto& labels = components[d];
                auto& pairs = pairs_[d];
                for (int i = 0; i < static_cast<int>(basisA.size()); ++i) {
                    for (int j = 0; j < static_cast<int>(basisB.size()); ++j) {
                        position_[{{da, i}, {db, j}}] = BasisRef{d, static_cast<int>(labels.size())};
                        labels.push_back(tensor_label(basisA[i], basisB[j]));
                        pairs.emplace_back(BasisRef{da, i}, BasisRef{db, j});
                    }
                }
            }
        }
        space_ = make_space(std::move(components));
    }

    const SpacePtr& space() const { return space_; }
    const SpacePtr& left() const { return a_; }
    const SpacePtr& right() const { return b_; }

    std::pair<BasisRef, BasisRef> factors(BasisRef p) const {
        return pairs_.at(p.degree).at(static_cast<size_t>(p.index));
    }

    BasisRef position(BasisRef a, BasisRef b) const {
        auto it = position_.find({a, b});
        if (it == position_.end()) throw SemanticError("tensor position out of range");
        return it->second;
    }

    /// x⊗y for sparse elements of the factors.
    Element combine(const Element& x, const Element& y) const {
        Element out;
        for (const auto& [bx, cx] : x.terms())
            for (const auto& [by, cy] : y.terms()) out.add(position(bx, by), cx * cy);
        return out;
    }

private:
    SpacePtr a_, b_;
    SpacePtr space_;
    std::map<int, std::vector<std::pair<BasisRef, BasisRef>>> pairs_;
    std::map<std::pair<BasisRef, BasisRef>, BasisRef> position_;
};

using TensorSpacePtr = std::shared_ptr<const TensorSpace>;

inline TensorSpacePtr tensor_space(SpacePtr a, SpacePtr b) {
    return std::make_shared<const TensorSpace>(std::move(a), std::move(b));
}

/// f⊗g with the Koszul evaluation rule
///   (f⊗g)(x⊗y) = (-1)^{deg(g)·deg(x)} f(x)⊗g(y).
/// Composing two such maps reproduces the interchange sign
///   (f⊗g)∘(f'⊗g') = (-1)^{deg(g)·deg(f')} (ff')⊗(gg').
inline GradedMap tensor_maps(const GradedMap& f, const GradedMap& g,
                             const TensorSpace& src, const TensorSpace& tgt) {
    if (!same_space(src.left(), f.source()) || !same_space(src.right(), g.source()) ||
        !same_space(tgt.left(), f.target()) || !same_space(tgt.right(), g.target()))
        throw SpaceMismatch("tensor_maps: factor spaces do not match the given products");
    GradedMap out(src.space(), tgt.space(), f.degree() + g.degree());
    for (const auto& [d, basis] : src.space()->components) {
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            auto [xa, xb] = src.factors({d, i});
            Element fx = f.apply(xa);
            Element gy = g.apply(xb);
            if (fx.is_zero() || gy.is_zero()) continue;
            bool flip = (g.degree() % 2 != 0) && (xa.degree % 2 != 0);
            Element val = tgt.combine(fx, gy);
            if (flip) val *= Rational(-1);
            for (const auto& [b, c] : val.terms()) out.add_entry({d, i}, b, c);
        }
    }
    return out;
}

inline GradedMap tensor_maps(const GradedMap& f, const GradedMap& g) {
    TensorSpace src(f.source(), g.source());
    TensorSpace tgt(f.target(), g.target());
    return tensor_maps(f, g, src, tgt);
}

/// A permutation of {0,..,n-1}, stored as the image list: p[i] is where
/// position i is sent.
using Permutation = std::vector<int>;

inline Permutation compose_permutations(const Permutation& s, const Permutation& t) {
    // (s∘t)(i) = s(t(i))
    Permutation out(t.size());
    for (size_t i = 0; i < t.size(); ++i) out[i] = s.at(static_cast<size_t>(t[i]));
    return out;
}

/// Koszul-signed action of a permutation on a list of homogeneous letters:
/// letter i moves to position sigma[i], and each transposition of adjacent
/// letters of degrees p, q contributes (-1)^{pq}. Returns the reordered index
/// list and the accumulated sign.
template <typename T>
std::pair<std::vector<T>, int> twist_apply(const Permutation& sigma,
                                           const std::vector<T>& letters,
                                           const std::vector<int>& degrees) {
    if (sigma.size() != letters.size() || degrees.size() != letters.size())
        throw LengthMismatch("twist: permutation and word lengths differ");
    const size_t n = letters.size();
    // Bubble each letter to its destination, counting signed swaps.
    std::vector<int> pos(n);     // current arrangement: pos[slot] = original letter id
    std::iota(pos.begin(), pos.end(), 0);
    int sign = 1;
    // Selection by destination slot: place into slot j the letter i with sigma[i] == j.
    for (size_t j = 0; j < n; ++j) {
        size_t k = j;
        while (sigma[static_cast<size_t>(pos[k])] != static_cast<int>(j)) ++k;
        while (k > j) {
            int a = pos[k - 1], b = pos[k];
            if ((degrees[static_cast<size_t>(a)] % 2 != 0) &&
                (degrees[static_cast<size_t>(b)] % 2 != 0))
                sign = -sign;
            std::swap(pos[k - 1], pos[k]);
            --k;
        }
    }
    std::vector<T> out;
    out.reserve(n);
    for (size_t j = 0; j < n; ++j) out.push_back(letters[static_cast<size_t>(pos[j])]);
    return {std::move(out), sign};
}

/// One homogeneous basis vector of a generator space, in the canonical flat
/// order (degree ascending, then index).
struct Letter {
    int degree = 0;
    int index = 0;  // index within its degree
};

/// The n-th tensor power of a generator space, with words of letters as its
/// basis. Words at a fixed total degree are ordered lexicographically by
/// letter id; labels join the letter labels with ⊗.
class WordSpace {
public:
    using Word = std::vector<int>;  // letter ids

    WordSpace(SpacePtr generators, int n) : generators_(std::move(generators)), n_(n) {
        if (n < 1) throw LengthMismatch("word space needs n >= 1");
        for (const auto& [d, basis] : generators_->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i)
                letters_.push_back({d, i});
        std::map<int, std::vector<std::string>> components;
        Word word(static_cast<size_t>(n), 0);
        if (!letters_.empty()) enumerate(word, 0, 0, components);
        space_ = make_space(std::move(components));
    }

    const SpacePtr& space() const { return space_; }
    const SpacePtr& generators() const { return generators_; }
    int length() const { return n_; }
    int letter_count() const { return static_cast<int>(letters_.size()); }
    const Letter& letter(int id) const { return letters_.at(static_cast<size_t>(id)); }

    int letter_id(BasisRef b) const {
        for (int id = 0; id < letter_count(); ++id)
            if (letters_[static_cast<size_t>(id)].degree == b.degree &&
                letters_[static_cast<size_t>(id)].index == b.index)
                return id;
        throw SemanticError("letter not found in generator space");
    }

    const Word& word_at(BasisRef p) const {
        return words_.at(p.degree).at(static_cast<size_t>(p.index));
    }

    BasisRef position(const Word& w) const {
        auto it = index_.find(w);
        if (it == index_.end()) throw SemanticError("word not found in word space");
        return it->second;
    }

    int word_degree(const Word& w) const {
        int d = 0;
        for (int id : w) d += letter(id).degree;
        return d;
    }

    std::vector<int> letter_degrees(const Word& w) const {
        std::vector<int> out;
        out.reserve(w.size());
        for (int id : w) out.push_back(letter(id).degree);
        return out;
    }

    /// The Koszul-signed permutation matrix of sigma on this power.
    GradedMap twist_map(const Permutation& sigma) const {
        GradedMap out(space_, space_, 0);
        for (const auto& [d, list] : words_) {
            for (int i = 0; i < static_cast<int>(list.size()); ++i) {
                const Word& w = list[static_cast<size_t>(i)];
                auto [permuted, sign] = twist_apply(sigma, w, letter_degrees(w));
                out.add_entry({d, i}, position(permuted), sign);
            }
        }
        return out;
    }

private:
    void enumerate(Word& word, int slot, int degree_so_far,
                   std::map<int, std::vector<std::string>>& components) {
        if (slot == n_) {
            auto& labels = components[degree_so_far];
            index_[word] = BasisRef{degree_so_far, static_cast<int>(labels.size())};
            words_[degree_so_far].push_back(word);
            std::string label;
            for (size_t i = 0; i < word.size(); ++i) {
                const Letter& l = letters_[static_cast<size_t>(word[i])];
                if (i) label += "⊗";
                label += generators_->label(l.degree, l.index);
            }
            labels.push_back(std::move(label));
            return;
        }
        for (int id = 0; id < letter_count(); ++id) {
            word[static_cast<size_t>(slot)] = id;
            enumerate(word, slot + 1, degree_so_far + letter(id).degree, components);
        }
    }

    SpacePtr generators_;
    int n_;
    std::vector<Letter> letters_;
    SpacePtr space_;
    std::map<int, std::vector<Word>> words_;
    std::map<Word, BasisRef> index_;
};

using WordSpacePtr = std::shared_ptr<const WordSpace>;

/// f_1⊗...⊗f_n acting between word spaces, all factors mapping the source
/// generator space to the target generator space. Koszul signs: factor i
/// moves past the first i-1 input letters, contributing
/// (-1)^{deg(f_i)·(deg a_1+...+deg a_{i-1})}.
inline GradedMap tensor_factor_map(const WordSpace& src, const WordSpace& tgt,
                                   const std::vector<const GradedMap*>& factors) {
    if (static_cast<int>(factors.size()) != src.length() || src.length() != tgt.length())
        throw LengthMismatch("tensor_factor_map: factor count must equal word length");
    int degree = 0;
    for (const GradedMap* f : factors) {
        if (!same_space(f->source(), src.generators()) ||
            !same_space(f->target(), tgt.generators()))
            throw SpaceMismatch("tensor_factor_map: factor endpoints do not match word spaces");
        degree += f->degree();
    }
    GradedMap out(src.space(), tgt.space(), degree);
    for (const auto& [d, basis] : src.space()->components) {
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            const auto& w = src.word_at({d, i});
            // terms: partial words in target letters with coefficients
            std::vector<std::pair<std::vector<int>, Rational>> terms = {{{}, Rational(1)}};
            int prefix_degree = 0;
            bool dead = false;
            for (size_t slot = 0; slot < w.size() && !dead; ++slot) {
                const Letter& l = src.letter(w[slot]);
                Element img = factors[slot]->apply(BasisRef{l.degree, l.index});
                int sign = ((factors[slot]->degree() % 2 != 0) && (prefix_degree % 2 != 0)) ? -1 : 1;
                std::vector<std::pair<std::vector<int>, Rational>> next;
                for (const auto& [partial, coeff] : terms) {
                    for (const auto& [b, c] : img.terms()) {
                        auto extended = partial;
                        extended.push_back(tgt.letter_id(b));
                        next.emplace_back(std::move(extended), coeff * c * Rational(sign));
                    }
                }
                terms = std::move(next);
                dead = terms.empty();
                prefix_degree += l.degree;
            }
            for (const auto& [word, coeff] : terms)
                out.add_entry({d, i}, tgt.position(word), coeff);
        }
    }
    return out;
}

/// The letterwise degree-+1 extension of a map on generators:
///   d(a_1⊗...⊗a_n) = Σ_i (-1)^{deg a_1+...+deg a_{i-1}} a_1⊗...⊗d(a_i)⊗...⊗a_n.
inline GradedMap letterwise_extension(const WordSpace& ws, const GradedMap& d1) {
    GradedMap identity = GradedMap::identity(ws.generators());
    GradedMap out = GradedMap::zero(ws.space(), ws.space(), d1.degree());
    for (int i = 0; i < ws.length(); ++i) {
        std::vector<const GradedMap*> factors(static_cast<size_t>(ws.length()), &identity);
        factors[static_cast<size_t>(i)] = &d1;
        out += tensor_factor_map(ws, ws, factors);
    }
    return out;
}

}  // namespace hpt
