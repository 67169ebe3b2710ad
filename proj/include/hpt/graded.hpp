#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hpt/errors.hpp"
#include "hpt/rational.hpp"

namespace hpt {

/// A finitely supported Z-graded vector space: each degree carries a finite
/// ordered basis of opaque string labels. Labels are display/serialization
/// data only; all arithmetic identifies basis vectors by (degree, index).
struct GradedSpace {
    std::map<int, std::vector<std::string>> components;

    int dim(int degree) const {
        auto it = components.find(degree);
        return it == components.end() ? 0 : static_cast<int>(it->second.size());
    }

    int total_dim() const {
        int n = 0;
        for (const auto& [d, basis] : components) n += static_cast<int>(basis.size());
        return n;
    }

    std::vector<int> degrees() const {
        std::vector<int> out;
        out.reserve(components.size());
        for (const auto& [d, basis] : components) out.push_back(d);
        return out;
    }

    const std::string& label(int degree, int index) const {
        return components.at(degree).at(static_cast<size_t>(index));
    }

    friend bool operator==(const GradedSpace&, const GradedSpace&) = default;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

/// Builds a space, dropping empty degrees and rejecting duplicate labels.
inline SpacePtr make_space(std::map<int, std::vector<std::string>> components) {
    for (auto it = components.begin(); it != components.end();) {
        if (it->second.empty()) {
            it = components.erase(it);
            continue;
        }
        std::set<std::string> seen(it->second.begin(), it->second.end());
        if (seen.size() != it->second.size())
            throw SemanticError("duplicate basis label in degree " + std::to_string(it->first));
        ++it;
    }
    auto s = std::make_shared<GradedSpace>();
    s->components = std::move(components);
    return s;
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
    return a == b || (a && b && *a == *b);
}

/// L[s]: the degree-i component of the result is the degree-(i+s) component
/// of the input. Basis labels are preserved. The default s = 1 is the
/// suspension, so a space concentrated in degree 0 moves to degree -1.
inline SpacePtr shift_space(const SpacePtr& space, int shift = 1) {
    std::map<int, std::vector<std::string>> components;
    for (const auto& [d, basis] : space->components) components[d - shift] = basis;
    return make_space(std::move(components));
}

struct BasisRef {
    int degree = 0;
    int index = 0;
    friend auto operator<=>(const BasisRef&, const BasisRef&) = default;
};

inline std::string describe(const SpacePtr& space, BasisRef b) {
    std::ostringstream os;
    os << space->label(b.degree, b.index) << " (degree " << b.degree << ")";
    return os.str();
}

/// Sparse vector in a graded space. Zero coefficients are never stored.
class Element {
public:
    Element() = default;

    void add(BasisRef b, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(b, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Rational coeff(BasisRef b) const {
        auto it = terms_.find(b);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    const std::map<BasisRef, Rational>& terms() const { return terms_; }

    /// Homogeneous degree when all terms share one; throws otherwise.
    int degree() const {
        if (terms_.empty()) throw DegreeError("degree of zero element");
        int d = terms_.begin()->first.degree;
        for (const auto& [b, c] : terms_)
            if (b.degree != d) throw DegreeError("element is not homogeneous");
        return d;
    }

    Element& operator+=(const Element& o) {
        for (const auto& [b, c] : o.terms_) add(b, c);
        return *this;
    }

    Element& operator-=(const Element& o) {
        for (const auto& [b, c] : o.terms_) add(b, -c);
        return *this;
    }

    Element& operator*=(const Rational& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [b, v] : terms_) v *= c;
        return *this;
    }

    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(const Rational& c, Element e) { return e *= c; }

    friend bool operator==(const Element&, const Element&) = default;

    static Element basis(BasisRef b) {
        Element e;
        e.add(b, 1);
        return e;
    }

    std::string str(const SpacePtr& space) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [b, c] : terms_) {
            if (!first) os << " + ";
            os << c.str() << " " << space->label(b.degree, b.index);
            first = false;
        }
        return os.str();
    }

private:
    std::map<BasisRef, Rational> terms_;
};

/// A degree-homogeneous linear map between graded spaces, stored as one
/// sparse block per source degree. An entry from source degree d lands in
/// target degree d + degree(); blocks into absent target degrees cannot be
/// created with a nonzero coefficient.
class GradedMap {
public:
    GradedMap() = default;
    GradedMap(SpacePtr source, SpacePtr target, int degree)
        : source_(std::move(source)), target_(std::move(target)), degree_(degree) {}

    static GradedMap identity(const SpacePtr& s) {
        GradedMap m(s, s, 0);
        for (const auto& [d, basis] : s->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i)
                m.add_entry({d, i}, {d, i}, 1);
        return m;
    }

    static GradedMap zero(SpacePtr source, SpacePtr target, int degree) {
        return GradedMap(std::move(source), std::move(target), degree);
    }

    const SpacePtr& source() const { return source_; }
    const SpacePtr& target() const { return target_; }
    int degree() const { return degree_; }

    void add_entry(BasisRef src, BasisRef tgt, const Rational& c) {
        if (c.is_zero()) return;
        if (tgt.degree != src.degree + degree_)
            throw DegreeError("map entry violates declared degree");
        if (src.index < 0 || src.index >= source_->dim(src.degree))
            throw SemanticError("map entry references missing source basis vector");
        if (tgt.index < 0 || tgt.index >= target_->dim(tgt.degree))
            throw SemanticError("map entry references missing target basis vector");
        auto& col = cols_[src.degree][src.index];
        auto [it, inserted] = col.emplace(tgt.index, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                col.erase(it);
                prune(src);
            }
        }
    }

    /// Column of a source basis vector, as an element of the target.
    Element apply(BasisRef src) const {
        Element out;
        auto dit = cols_.find(src.degree);
        if (dit == cols_.end()) return out;
        auto cit = dit->second.find(src.index);
        if (cit == dit->second.end()) return out;
        for (const auto& [row, c] : cit->second) out.add({src.degree + degree_, row}, c);
        return out;
    }

    Element apply(const Element& x) const {
        Element out;
        for (const auto& [b, c] : x.terms()) {
            auto dit = cols_.find(b.degree);
            if (dit == cols_.end()) continue;
            auto cit = dit->second.find(b.index);
            if (cit == dit->second.end()) continue;
            for (const auto& [row, v] : cit->second) out.add({b.degree + degree_, row}, c * v);
        }
        return out;
    }

    bool is_zero() const {
        for (const auto& [d, block] : cols_)
            for (const auto& [col, rows] : block)
                if (!rows.empty()) return false;
        return true;
    }

    GradedMap& operator+=(const GradedMap& o) {
        require_parallel(o, "sum");
        for (const auto& [d, block] : o.cols_)
            for (const auto& [col, rows] : block)
                for (const auto& [row, c] : rows) add_entry({d, col}, {d + degree_, row}, c);
        return *this;
    }

    GradedMap& operator-=(const GradedMap& o) {
        require_parallel(o, "difference");
        for (const auto& [d, block] : o.cols_)
            for (const auto& [col, rows] : block)
                for (const auto& [row, c] : rows) add_entry({d, col}, {d + degree_, row}, -c);
        return *this;
    }

    GradedMap& operator*=(const Rational& c) {
        if (c.is_zero()) {
            cols_.clear();
            return *this;
        }
        for (auto& [d, block] : cols_)
            for (auto& [col, rows] : block)
                for (auto& [row, v] : rows) v *= c;
        return *this;
    }

    friend GradedMap operator+(GradedMap a, const GradedMap& b) { return a += b; }
    friend GradedMap operator-(GradedMap a, const GradedMap& b) { return a -= b; }
    friend GradedMap operator*(const Rational& c, GradedMap m) { return m *= c; }
    friend GradedMap operator-(GradedMap m) { return m *= Rational(-1); }

    friend bool operator==(const GradedMap& a, const GradedMap& b) {
        return a.degree_ == b.degree_ && same_space(a.source_, b.source_) &&
               same_space(a.target_, b.target_) && a.cols_ == b.cols_;
    }

    /// All entries as (source, target, coefficient), sorted by source then target.
    std::vector<std::tuple<BasisRef, BasisRef, Rational>> entries() const {
        std::vector<std::tuple<BasisRef, BasisRef, Rational>> out;
        for (const auto& [d, block] : cols_)
            for (const auto& [col, rows] : block)
                for (const auto& [row, c] : rows)
                    out.emplace_back(BasisRef{d, col}, BasisRef{d + degree_, row}, c);
        return out;
    }

    /// First basis vector of the source on which this map is nonzero.
    /// Scans in (degree, index) order; nullopt for the zero map.
    std::optional<BasisRef> first_nonzero_column() const {
        for (const auto& [d, block] : cols_)
            for (const auto& [col, rows] : block)
                if (!rows.empty()) return BasisRef{d, col};
        return std::nullopt;
    }

private:
    void require_parallel(const GradedMap& o, const char* op) const {
        if (degree_ != o.degree_ || !same_space(source_, o.source_) ||
            !same_space(target_, o.target_))
            throw SpaceMismatch(std::string("graded map ") + op + " of incompatible maps");
    }

    void prune(BasisRef src) {
        auto dit = cols_.find(src.degree);
        if (dit == cols_.end()) return;
        auto cit = dit->second.find(src.index);
        if (cit != dit->second.end() && cit->second.empty()) dit->second.erase(cit);
        if (dit->second.empty()) cols_.erase(dit);
    }

    SpacePtr source_, target_;
    int degree_ = 0;
    // source degree -> column index -> (target row -> coefficient)
    std::map<int, std::map<int, std::map<int, Rational>>> cols_;
};

/// g∘f. Requires f.target and g.source to be the same space.
inline GradedMap compose(const GradedMap& g, const GradedMap& f) {
    if (!same_space(f.target(), g.source()))
        throw SpaceMismatch("compose: inner target does not match outer source");
    GradedMap out(f.source(), g.target(), f.degree() + g.degree());
    for (const auto& [src, mid, c] : f.entries()) {
        Element gcol = g.apply(mid);
        for (const auto& [tgt, v] : gcol.terms()) out.add_entry(src, tgt, c * v);
    }
    return out;
}

/// A graded space with a square-zero differential of degree +1.
struct DGModule {
    SpacePtr space;
    GradedMap differential;

    DGModule() = default;
    DGModule(SpacePtr s, GradedMap d) : space(std::move(s)), differential(std::move(d)) {
        if (differential.degree() != 1) throw DegreeError("differential must have degree +1");
        if (!same_space(differential.source(), space) || !same_space(differential.target(), space))
            throw SpaceMismatch("differential must be an endomorphism of the module's space");
    }

    static DGModule with_zero_differential(const SpacePtr& s) {
        return DGModule(s, GradedMap::zero(s, s, 1));
    }
};

/// Outcome of a structural check: a list of named violations with witnesses.
/// Empty means the check passed.
struct ValidationReport {
    struct Item {
        std::string check;
        std::string witness;
    };
    std::vector<Item> items;

    bool passed() const { return items.empty(); }

    void fail(std::string check, std::string witness) {
        items.push_back({std::move(check), std::move(witness)});
    }

    std::string str() const {
        if (items.empty()) return "ok";
        std::ostringstream os;
        for (const auto& it : items) os << it.check << ": " << it.witness << "\n";
        return os.str();
    }
};

/// Reports every basis vector v with d(d(v)) != 0; empty iff d² = 0.
inline ValidationReport check_complex(const DGModule& m) {
    ValidationReport report;
    for (const auto& [d, basis] : m.space->components) {
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            Element dd = m.differential.apply(m.differential.apply(BasisRef{d, i}));
            if (!dd.is_zero())
                report.fail("d.d != 0",
                            describe(m.space, {d, i}) + " -> " + dd.str(m.space));
        }
    }
    return report;
}

/// Compares two maps entrywise; on the first difference returns a report
/// naming the offending source basis vector. Both maps must be parallel.
inline ValidationReport maps_equal_report(const std::string& check, const GradedMap& a,
                                          const GradedMap& b) {
    ValidationReport report;
    if (a.degree() != b.degree() || !same_space(a.source(), b.source()) ||
        !same_space(a.target(), b.target())) {
        report.fail(check, "maps are not parallel");
        return report;
    }
    GradedMap diff = a - b;
    if (auto col = diff.first_nonzero_column()) {
        report.fail(check, describe(a.source(), *col) + ": difference " +
                               diff.apply(*col).str(a.target()));
    }
    return report;
}

}  // namespace hpt
