#pragma once

// Test-side utilities: a dense exact linear-algebra oracle kept independent
// of the library's sparse code paths, plus seeded random generators for
// spaces, complexes, contractions and perturbations. Raw mt19937 draws with
// modulo reduction keep every sequence reproducible across platforms.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "hpt/contraction.hpp"
#include "hpt/graded.hpp"

namespace hpttest {

using hpt::BasisRef;
using hpt::Contraction;
using hpt::DGModule;
using hpt::Element;
using hpt::GradedMap;
using hpt::GradedSpace;
using hpt::Rational;
using hpt::SpacePtr;

using Rng = std::mt19937;

inline int rnd(Rng& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
}

inline Rational rnd_rational(Rng& rng, int maxNum = 3, int maxDen = 3) {
    long num = rnd(rng, -maxNum, maxNum);
    long den = rnd(rng, 1, maxDen);
    return Rational(num, den);
}

// --- dense oracle ----------------------------------------------------------

struct Dense {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> data;  // row-major

    Dense() = default;
    Dense(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c)) {}
    Rational& at(int r, int c) { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
    const Rational& at(int r, int c) const {
        return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)];
    }
    friend bool operator==(const Dense&, const Dense&) = default;
};

inline Dense dense_zero(int rows, int cols) { return Dense(rows, cols); }

/// Block of a graded map at one source degree as a dense matrix
/// (target dim x source dim).
inline Dense to_dense(const GradedMap& f, int srcDegree) {
    Dense m(f.target()->dim(srcDegree + f.degree()), f.source()->dim(srcDegree));
    for (int j = 0; j < m.cols; ++j) {
        Element col = f.apply(BasisRef{srcDegree, j});
        for (const auto& [b, c] : col.terms()) m.at(b.index, j) = c;
    }
    return m;
}

inline Dense dense_mul(const Dense& a, const Dense& b) {
    Dense out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols && k < b.rows; ++k) {
            if (a.at(i, k).is_zero()) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return out;
}

inline int dense_rank(Dense m) {
    int rank = 0;
    int pivotRow = 0;
    for (int col = 0; col < m.cols && pivotRow < m.rows; ++col) {
        int sel = pivotRow;
        while (sel < m.rows && m.at(sel, col).is_zero()) ++sel;
        if (sel == m.rows) continue;
        for (int j = 0; j < m.cols; ++j) std::swap(m.at(sel, j), m.at(pivotRow, j));
        Rational inv = m.at(pivotRow, col).inverse();
        for (int j = col; j < m.cols; ++j) m.at(pivotRow, j) *= inv;
        for (int r = 0; r < m.rows; ++r) {
            if (r == pivotRow || m.at(r, col).is_zero()) continue;
            Rational f = m.at(r, col);
            for (int j = col; j < m.cols; ++j) m.at(r, j) -= f * m.at(pivotRow, j);
        }
        ++pivotRow;
        ++rank;
    }
    return rank;
}

/// Solves A X = B for square invertible A by Gauss-Jordan; exact.
inline Dense dense_solve(Dense a, Dense b) {
    const int n = a.rows;
    for (int col = 0; col < n; ++col) {
        int sel = col;
        while (sel < n && a.at(sel, col).is_zero()) ++sel;
        if (sel == n) throw std::runtime_error("dense_solve: singular matrix");
        for (int j = 0; j < a.cols; ++j) std::swap(a.at(sel, j), a.at(col, j));
        for (int j = 0; j < b.cols; ++j) std::swap(b.at(sel, j), b.at(col, j));
        Rational inv = a.at(col, col).inverse();
        for (int j = 0; j < a.cols; ++j) a.at(col, j) *= inv;
        for (int j = 0; j < b.cols; ++j) b.at(col, j) *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == col || a.at(r, col).is_zero()) continue;
            Rational f = a.at(r, col);
            for (int j = 0; j < a.cols; ++j) a.at(r, j) -= f * a.at(col, j);
            for (int j = 0; j < b.cols; ++j) b.at(r, j) -= f * b.at(col, j);
        }
    }
    return b;
}

inline Dense dense_identity(int n) {
    Dense m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

inline Dense dense_inverse(const Dense& a) { return dense_solve(a, dense_identity(a.rows)); }

inline bool dense_equal(const Dense& a, const Dense& b) { return a == b; }

// --- random spaces and maps -------------------------------------------------

inline SpacePtr random_space(Rng& rng, int minDeg, int maxDeg, int maxDim,
                             const std::string& prefix = "e") {
    std::map<int, std::vector<std::string>> components;
    bool any = false;
    for (int d = minDeg; d <= maxDeg; ++d) {
        int dim = rnd(rng, 0, maxDim);
        for (int i = 0; i < dim; ++i)
            components[d].push_back(prefix + std::to_string(d < 0 ? -d : d) +
                                    (d < 0 ? "m" : "p") + "_" + std::to_string(i));
        any = any || dim > 0;
    }
    if (!any) components[0].push_back(prefix + "0p_0");
    return hpt::make_space(std::move(components));
}

inline GradedMap random_map(Rng& rng, const SpacePtr& src, const SpacePtr& tgt, int degree,
                            int density = 2) {
    GradedMap out(src, tgt, degree);
    for (const auto& [d, basis] : src->components) {
        int tdim = tgt->dim(d + degree);
        if (tdim == 0) continue;
        for (int j = 0; j < static_cast<int>(basis.size()); ++j)
            for (int r = 0; r < tdim; ++r)
                if (rnd(rng, 0, density) == 0) out.add_entry({d, j}, {d + degree, r}, rnd_rational(rng));
    }
    return out;
}

// --- random complexes with known homology -----------------------------------

struct RandomComplex {
    DGModule module;
    std::map<int, int> homologyDim;  // singletons per degree
};

/// A based complex of elementary pairs d(x) = y and singletons, conjugated by
/// random invertible degreewise changes of basis. Homology dims are known by
/// construction.
inline RandomComplex random_complex(Rng& rng, int minDeg, int maxDeg, int maxDim) {
    // Basis layout per degree: [pair sources][pair targets from below][singles].
    // Pair sources at degree d occupy one slot at d and one at d+1, so the
    // budget at each degree stays within maxDim.
    std::map<int, int> srcCount, tgtCount, singles;
    std::map<int, std::vector<std::string>> components;
    for (int d = minDeg; d <= maxDeg; ++d) {
        tgtCount[d] = d > minDeg ? srcCount[d - 1] : 0;
        int budget = maxDim - tgtCount[d];
        srcCount[d] = d < maxDeg ? rnd(rng, 0, budget) : 0;
        singles[d] = rnd(rng, 0, budget - srcCount[d]);
        int total = srcCount[d] + tgtCount[d] + singles[d];
        for (int i = 0; i < total; ++i)
            components[d].push_back("v" + std::to_string(d < 0 ? -d : d) + (d < 0 ? "m" : "p") +
                                    "_" + std::to_string(i));
        if (total == 0) components.erase(d);
    }
    SpacePtr space = hpt::make_space(components);
    GradedMap d0(space, space, 1);
    for (int d = minDeg; d < maxDeg; ++d)
        for (int i = 0; i < srcCount[d]; ++i)
            d0.add_entry({d, i}, {d + 1, srcCount[d + 1] + i}, 1);

    // Conjugate by random invertible degreewise maps: d = S d0 S^{-1}.
    std::map<int, Dense> S, Sinv;
    for (const auto& [d, basis] : space->components) {
        int n = static_cast<int>(basis.size());
        Dense m;
        while (true) {
            m = Dense(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m.at(i, j) = rnd(rng, -2, 2);
            if (dense_rank(m) == n) break;
        }
        S[d] = m;
        Sinv[d] = dense_inverse(m);
    }
    GradedMap diff(space, space, 1);
    for (const auto& [deg, basis] : space->components) {
        if (space->dim(deg + 1) == 0) continue;
        Dense block = dense_mul(S.at(deg + 1), dense_mul(to_dense(d0, deg), Sinv.at(deg)));
        for (int r = 0; r < block.rows; ++r)
            for (int c = 0; c < block.cols; ++c)
                if (!block.at(r, c).is_zero())
                    diff.add_entry({deg, c}, {deg + 1, r}, block.at(r, c));
    }
    RandomComplex out;
    out.module = DGModule(space, diff);
    for (const auto& [d, basis] : space->components) {
        int h = static_cast<int>(basis.size()) - srcCount[d] - tgtCount[d];
        if (h > 0) out.homologyDim[d] = h;
    }
    return out;
}

/// Homology dimension at each degree via the rank-nullity oracle.
inline std::map<int, int> homology_by_rank(const DGModule& m) {
    std::map<int, int> out;
    for (const auto& [d, basis] : m.space->components) {
        int dim = static_cast<int>(basis.size());
        int rankOut = dense_rank(to_dense(m.differential, d));
        int rankIn = dense_rank(to_dense(m.differential, d - 1));
        int h = dim - rankOut - rankIn;
        if (h != 0) out[d] = h;
    }
    return out;
}

/// A random valid contraction: full reduction of a random complex.
inline Contraction random_contraction(Rng& rng, int minDeg, int maxDeg, int maxDim) {
    RandomComplex rc = random_complex(rng, minDeg, maxDeg, maxDim);
    return hpt::homology_contraction(rc.module);
}

/// A global perturbation: a second square-zero differential on the same
/// space, built by re-conjugating the first one; delta = d2 - d1. The caller
/// filters for local nilpotency.
inline GradedMap random_global_perturbation(Rng& rng, const DGModule& m) {
    const SpacePtr& space = m.space;
    std::map<int, Dense> S, Sinv;
    for (const auto& [d, basis] : space->components) {
        int n = static_cast<int>(basis.size());
        Dense t;
        while (true) {
            t = Dense(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) t.at(i, j) = rnd(rng, -1, 1);
            for (int i = 0; i < n; ++i)
                if (t.at(i, i).is_zero()) t.at(i, i) = 1;
            if (dense_rank(t) == n) break;
        }
        S[d] = t;
        Sinv[d] = dense_inverse(t);
    }
    GradedMap d2(space, space, 1);
    for (const auto& [deg, basis] : space->components) {
        if (space->dim(deg + 1) == 0) continue;
        Dense block = dense_mul(S.at(deg + 1), dense_mul(to_dense(m.differential, deg), Sinv.at(deg)));
        for (int r = 0; r < block.rows; ++r)
            for (int c = 0; c < block.cols; ++c)
                if (!block.at(r, c).is_zero())
                    d2.add_entry({deg, c}, {deg + 1, r}, block.at(r, c));
    }
    return d2 - m.differential;
}

/// The canonical two-term example: N = <x(0), y(1)>, d(x) = y, M = 0,
/// h(y) = -x.
inline Contraction two_term_contraction() {
    SpacePtr n = hpt::make_space({{0, {"x"}}, {1, {"y"}}});
    SpacePtr m = hpt::make_space({});
    GradedMap d(n, n, 1);
    d.add_entry({0, 0}, {1, 0}, 1);
    GradedMap h(n, n, -1);
    h.add_entry({1, 0}, {0, 0}, -1);
    Contraction c;
    c.big = DGModule(n, d);
    c.small = DGModule(m, GradedMap::zero(m, m, 1));
    c.incl = GradedMap::zero(m, n, 0);
    c.proj = GradedMap::zero(n, m, 0);
    c.homotopy = std::move(h);
    return c;
}

}  // namespace hpttest
