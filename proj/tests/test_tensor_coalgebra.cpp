#include <map>
#include <tuple>

#include "doctest.h"
#include "hpt/tensor_coalgebra.hpp"
#include "support.hpp"

using namespace hpt;
using hpttest::Rng;

namespace {

using Triple = std::map<std::tuple<BasisRef, BasisRef, BasisRef>, Rational>;

void add_triple(Triple& t, BasisRef a, BasisRef b, BasisRef c, const Rational& v) {
    if (v.is_zero()) return;
    auto key = std::make_tuple(a, b, c);
    auto [it, inserted] = t.emplace(key, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) t.erase(it);
    }
}

/// (𝔞⊗Id)𝔞 and (Id⊗𝔞)𝔞 on one basis word, expanded into word triples.
std::pair<Triple, Triple> coassociativity_sides(const TensorCoalgebra& T, BasisRef w) {
    Triple lhs, rhs;
    PairElement once = T.coproduct(w);
    for (const auto& [k, c] : once.terms()) {
        PairElement left = T.coproduct(k.first);
        for (const auto& [k2, c2] : left.terms()) add_triple(lhs, k2.first, k2.second, k.second, c * c2);
        PairElement right = T.coproduct(k.second);
        for (const auto& [k2, c2] : right.terms()) add_triple(rhs, k.first, k2.first, k2.second, c * c2);
    }
    return {lhs, rhs};
}

CoderivationSpec random_coderivation(Rng& rng, const TensorCoalgebraPtr& T, int degree,
                                     int maxWeightUsed) {
    CoderivationSpec spec = CoderivationSpec::zero(T, degree);
    for (int n = 1; n <= std::min(maxWeightUsed, T->max_weight()); ++n)
        spec.family[static_cast<size_t>(n - 1)] =
            hpttest::random_map(rng, T->weight(n).space(), T->generators(), degree, 3);
    return spec;
}

std::vector<GradedMap> random_morphism_family(Rng& rng, const TensorCoalgebraPtr& src,
                                              const SpacePtr& tgtGens, int maxWeightUsed) {
    std::vector<GradedMap> family;
    for (int n = 1; n <= src->max_weight(); ++n) {
        if (n <= maxWeightUsed)
            family.push_back(hpttest::random_map(rng, src->weight(n).space(), tgtGens, 0, 2));
        else
            family.push_back(GradedMap::zero(src->weight(n).space(), tgtGens, 0));
    }
    return family;
}

}  // namespace

TEST_CASE("reduced coproduct") {
    auto V = make_space({{-1, {"x", "y"}}, {1, {"z"}}});
    auto T = make_tensor_coalgebra(V, 4);
    SUBCASE("single letters map to zero") {
        for (const auto& [d, basis] : T->weight(1).space()->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i)
                CHECK(T->coproduct(T->ambient(1, {d, i})).is_zero());
    }
    SUBCASE("two-letter words deconcatenate into a single pair") {
        BasisRef xy = T->position({0, 1});
        PairElement out = T->coproduct(xy);
        CHECK(out.terms().size() == 1);
        BasisRef x = T->position({0});
        BasisRef y = T->position({1});
        CHECK(out.terms().at({x, y}) == Rational(1));
    }
    SUBCASE("coassociativity on every word of weight <= 4") {
        for (const auto& [d, basis] : T->space()->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                auto [lhs, rhs] = coassociativity_sides(*T, {d, i});
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("corestriction is the weight-1 projection") {
    auto V = make_space({{0, {"a"}}, {2, {"b"}}});
    auto T = make_tensor_coalgebra(V, 3);
    Element letter = Element::basis(T->position({0}));
    CHECK(T->corestriction(letter) == Element::basis(BasisRef{0, 0}));
    Element word = Element::basis(T->position({0, 1}));
    CHECK(T->corestriction(word).is_zero());
    // p is a left inverse of the weight-1 inclusion.
    GradedMap p = T->corestriction_map();
    for (const auto& [d, basis] : V->components)
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            const WordSpace& w1 = T->weight(1);
            BasisRef pos = T->ambient(1, w1.position({w1.letter_id({d, i})}));
            CHECK(p.apply(pos) == Element::basis(BasisRef{d, i}));
        }
}

TEST_CASE("extend_coalgebra_morphism") {
    Rng rng(1301);
    auto V = make_space({{-1, {"x", "y"}}, {0, {"u"}}});
    auto T = make_tensor_coalgebra(V, 4);
    SUBCASE("f1 = id extends to the identity") {
        std::vector<GradedMap> family;
        GradedMap f1(T->weight(1).space(), V, 0);
        for (const auto& [src, tgt, c] : GradedMap::identity(V).entries()) f1.add_entry(src, tgt, c);
        family.push_back(f1);
        for (int n = 2; n <= 4; ++n)
            family.push_back(GradedMap::zero(T->weight(n).space(), V, 0));
        CHECK(extend_coalgebra_morphism(*T, *T, family) == GradedMap::identity(T->space()));
    }
    SUBCASE("strict morphism: f1 = g extends weightwise as g tensor powers") {
        auto Vp = make_space({{-1, {"s", "t"}}, {0, {"w"}}});
        auto Tp = make_tensor_coalgebra(Vp, 4);
        GradedMap g = hpttest::random_map(rng, V, Vp, 0, 1);
        std::vector<GradedMap> family;
        GradedMap f1(T->weight(1).space(), Vp, 0);
        for (const auto& [src, tgt, c] : g.entries()) f1.add_entry(src, tgt, c);
        family.push_back(f1);
        for (int n = 2; n <= 4; ++n)
            family.push_back(GradedMap::zero(T->weight(n).space(), Vp, 0));
        GradedMap F = extend_coalgebra_morphism(*T, *Tp, family);
        for (int n = 1; n <= 4; ++n) {
            std::vector<const GradedMap*> copies(static_cast<size_t>(n), &g);
            GradedMap gn = tensor_factor_map(T->weight(n), Tp->weight(n), copies);
            for (const auto& [src, tgt, c] : gn.entries())
                CHECK(F.apply(T->ambient(n, src)).coeff(Tp->ambient(n, tgt)) == c);
        }
    }
    SUBCASE("random families: pF = f and (F⊗F)\U0001d51e = \U0001d51eF") {
        for (int trial = 0; trial < 5; ++trial) {
            auto family = random_morphism_family(rng, T, V, 2);
            GradedMap F = extend_coalgebra_morphism(*T, *T, family);
            auto back = corestriction_family(*T, *T, F);
            for (int n = 1; n <= 4; ++n) CHECK(back[static_cast<size_t>(n - 1)] == family[static_cast<size_t>(n - 1)]);
            for (const auto& [d, basis] : T->space()->components)
                for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                    PairElement lhs = apply_pair(F, F, T->coproduct({d, i}));
                    PairElement rhs = coproduct_of(*T, F.apply(BasisRef{d, i}));
                    CHECK(lhs == rhs);
                }
        }
    }
}

TEST_CASE("extend_coderivation") {
    Rng rng(1409);
    auto V = make_space({{-1, {"x", "y"}}, {0, {"u"}}});
    auto T = make_tensor_coalgebra(V, 4);
    SUBCASE("zero family extends to zero") {
        CHECK(extend_coderivation(CoderivationSpec::zero(T, 1)).is_zero());
    }
    SUBCASE("q1 only acts letterwise with Koszul signs") {
        GradedMap d1 = hpttest::random_map(rng, V, V, 1, 1);
        CoderivationSpec spec = CoderivationSpec::zero(T, 1);
        GradedMap q1(T->weight(1).space(), V, 1);
        for (const auto& [src, tgt, c] : d1.entries()) q1.add_entry(src, tgt, c);
        spec.family[0] = q1;
        GradedMap Q = extend_coderivation(spec);
        for (int n = 1; n <= 4; ++n) {
            GradedMap letterwise = letterwise_extension(T->weight(n), d1);
            for (const auto& [src, tgt, c] : letterwise.entries())
                CHECK(Q.apply(T->ambient(n, src)).coeff(T->ambient(n, tgt)) == c);
        }
    }
    SUBCASE("hand expansion of a q2-only coderivation on a 3-letter word") {
        // q(x⊗y) = u (degrees -1,-1 -> -2, map degree +1 lands in... -1).
        // On x⊗y⊗x: q(x⊗y)⊗x + (-1)^{deg x} x⊗q(y⊗x).
        auto V2 = make_space({{-1, {"x", "y", "u"}}});
        auto T2 = make_tensor_coalgebra(V2, 3);
        CoderivationSpec spec = CoderivationSpec::zero(T2, 1);
        GradedMap q2(T2->weight(2).space(), V2, 1);
        q2.add_entry(T2->weight(2).position({0, 1}), {-1, 2}, 1);  // q(x⊗y) = u
        q2.add_entry(T2->weight(2).position({1, 0}), {-1, 2}, 3);  // q(y⊗x) = 3u
        spec.family[1] = q2;
        GradedMap Q = extend_coderivation(spec);
        Element out = Q.apply(T2->position({0, 1, 0}));
        Element expected;
        expected.add(T2->position({2, 0}), 1);   // q(x⊗y)⊗x = u⊗x
        expected.add(T2->position({0, 2}), -3);  // (-1)^{-1} x⊗q(y⊗x)
        CHECK(out == expected);
    }
    SUBCASE("co-Leibniz rule and corestriction recovery for random families") {
        for (int trial = 0; trial < 5; ++trial) {
            int degree = hpttest::rnd(rng, -1, 1);
            CoderivationSpec spec = random_coderivation(rng, T, degree, 3);
            GradedMap Q = extend_coderivation(spec);
            GradedMap idT = GradedMap::identity(T->space());
            // p.Q = sum of the q_n.
            auto back = corestriction_family(*T, *T, Q);
            for (int n = 1; n <= 4; ++n)
                CHECK(back[static_cast<size_t>(n - 1)] == spec.family[static_cast<size_t>(n - 1)]);
            // co-Leibniz: 𝔞Q = (Q⊗Id + Id⊗Q)𝔞 with Koszul signs.
            for (const auto& [d, basis] : T->space()->components)
                for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                    PairElement delta = T->coproduct({d, i});
                    PairElement rhs = apply_pair(Q, idT, delta);
                    rhs += apply_pair(idT, Q, delta);
                    PairElement lhs = coproduct_of(*T, Q.apply(BasisRef{d, i}));
                    CHECK(lhs == rhs);
                }
        }
    }
    SUBCASE("uniqueness: equal corestrictions give equal coderivations") {
        CoderivationSpec spec = random_coderivation(rng, T, 1, 4);
        GradedMap Q = extend_coderivation(spec);
        CoderivationSpec again;
        again.ambient = T;
        again.degree = 1;
        again.family = corestriction_family(*T, *T, Q);
        CHECK(extend_coderivation(again) == Q);
    }
}

TEST_CASE("morphisms between tensor-trick contractions") {
    // g = iota.pi on generators commutes with the homotopy (gh = hg = 0), so
    // its weightwise tensor powers form a morphism of trick contractions; the
    // induced small map is checked for both commuting squares internally.
    Rng rng(1499);
    Contraction gen = hpttest::random_contraction(rng, -1, 1, 3);
    CoalgebraContraction cc = tensor_trick(gen, 3);
    GradedMap g = compose(gen.incl, gen.proj);
    std::vector<GradedMap> powers;
    for (int n = 1; n <= 3; ++n) {
        std::vector<const GradedMap*> copies(static_cast<size_t>(n), &g);
        powers.push_back(tensor_factor_map(cc.big->weight(n), cc.big->weight(n), copies));
    }
    GradedMap Tg = TensorCoalgebra::weightwise(*cc.big, *cc.big, powers);
    ContractionMorphism phi{cc.contraction, cc.contraction, Tg};
    CHECK(validate_morphism(phi).passed());
    GradedMap fhat = induced_small_map(phi);
    CHECK(fhat == GradedMap::identity(cc.small->space()));
}

TEST_CASE("tensor trick") {
    SUBCASE("identity contraction extends to the identity contraction") {
        Rng rng(1501);
        auto rc = hpttest::random_complex(rng, -1, 1, 2);
        CoalgebraContraction cc = tensor_trick(identity_contraction(rc.module), 3);
        CHECK(validate_contraction(cc.contraction).passed());
        CHECK(cc.contraction.homotopy.is_zero());
        CHECK(cc.contraction.incl == GradedMap::identity(cc.big->space()));
        CHECK(is_coalgebra_contraction(cc.contraction, *cc.big, *cc.small).passed());
    }
    SUBCASE("two-term contraction, weight 3: contraction + coalgebra contraction") {
        CoalgebraContraction cc = tensor_trick(hpttest::two_term_contraction(), 3);
        CHECK(validate_contraction(cc.contraction).passed());
        CHECK(is_coalgebra_contraction(cc.contraction, *cc.big, *cc.small).passed());
    }
    SUBCASE("random contractions: the tensor-trick identity of the homotopy") {
        Rng rng(1502);
        for (int t = 0; t < 3; ++t) {
            Contraction gen = hpttest::random_contraction(rng, -1, 1, 3);
            CoalgebraContraction cc = tensor_trick(gen, 4);
            CHECK(validate_contraction(cc.contraction).passed());
            // a.Th = (T(iota.pi) ⊗ Th + Th ⊗ Id).a on every basis word.
            const GradedMap& Th = cc.contraction.homotopy;
            GradedMap retr = compose(cc.contraction.incl, cc.contraction.proj);
            GradedMap idT = GradedMap::identity(cc.big->space());
            for (const auto& [d, basis] : cc.big->space()->components)
                for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                    PairElement delta = cc.big->coproduct({d, i});
                    PairElement rhs = apply_pair(retr, Th, delta);
                    rhs += apply_pair(Th, idT, delta);
                    PairElement lhs = coproduct_of(*cc.big, Th.apply(BasisRef{d, i}));
                    CHECK(lhs == rhs);
                }
            CHECK(is_coalgebra_contraction(cc.contraction, *cc.big, *cc.small).passed());
        }
    }
}
