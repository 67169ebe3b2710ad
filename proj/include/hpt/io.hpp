#pragma once

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hpt/perturbation.hpp"

namespace hpt {

// ---------------------------------------------------------------------------
// Problem files. Line-oriented structured text with section headers; see the
// canonical serializer below for the exact shape. Full-line # comments and
// blank lines are ignored. Map entries read "src -> tgt : coeff" with labels
// resolved against the declared spaces; coder entries use ⊗-joined words.
// ---------------------------------------------------------------------------

struct ProblemSettings {
    std::string mode = "ordinary";  // ordinary | relative | linfty
    int max_weight = 0;             // 0 = not set
    int max_iter = 0;               // 0 = not set
    std::string codifferential;     // "", "tensor", "symmetric", "both"
};

struct RawMap {
    std::string name, src, tgt;
    int degree = 0;
    std::vector<std::tuple<std::string, std::string, Rational>> entries;
};

struct RawCoder {
    std::string name;
    int degree = 1;
    // (word as letter labels, output letter label, coefficient)
    std::vector<std::tuple<std::vector<std::string>, std::string, Rational>> entries;
};

struct RawSpan {
    std::string name;
    std::vector<std::vector<std::pair<Rational, std::string>>> elements;
};

struct ProblemFile {
    ProblemSettings settings;
    std::vector<std::pair<std::string, std::map<int, std::vector<std::string>>>> spaces;
    std::vector<RawMap> maps;
    std::optional<RawCoder> coder;
    std::vector<RawSpan> spans;

    const std::map<int, std::vector<std::string>>* find_space(const std::string& name) const {
        for (const auto& [n, c] : spaces)
            if (n == name) return &c;
        return nullptr;
    }
    const RawMap* find_map(const std::string& name) const {
        for (const auto& m : maps)
            if (m.name == name) return &m;
        return nullptr;
    }
    const RawSpan* find_span(const std::string& name) const {
        for (const auto& s : spans)
            if (s.name == name) return &s;
        return nullptr;
    }
};

namespace iodetail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> split_on(const std::string& s, const std::string& sep) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
        size_t hit = s.find(sep, pos);
        if (hit == std::string::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, hit - pos));
        pos = hit + sep.size();
    }
}

inline std::string normalize_arrow(std::string s) {
    // Accept the UTF-8 arrow as a synonym for "->".
    const std::string arrow = "→";
    size_t pos;
    while ((pos = s.find(arrow)) != std::string::npos) s.replace(pos, arrow.size(), "->");
    return s;
}

inline int parse_int(const std::string& s, int line) {
    try {
        size_t used = 0;
        std::string t = s;
        if (!t.empty() && t[0] == '+') t = t.substr(1);
        int v = std::stoi(t, &used);
        if (used != t.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
}

}  // namespace iodetail

inline ProblemFile parse_problem(std::istream& in) {
    using namespace iodetail;
    ProblemFile pf;
    std::string line;
    int lineno = 0;
    bool sawHeader = false;
    enum class Section { none, settings, space, map, coder, span };
    Section section = Section::none;
    std::map<int, std::vector<std::string>>* curSpace = nullptr;
    RawMap* curMap = nullptr;
    RawSpan* curSpan = nullptr;

    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (!sawHeader) {
            auto toks = split_ws(s);
            if (toks.size() != 2 || toks[0] != "hpt")
                throw ParseError(lineno, "expected header 'hpt 1'");
            if (parse_int(toks[1], lineno) != 1)
                throw ParseError(lineno, "unsupported format version " + toks[1]);
            sawHeader = true;
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(lineno, "unterminated section header");
            std::string head = trim(s.substr(1, s.size() - 2));
            auto toks = split_ws(normalize_arrow(head));
            if (toks.empty()) throw ParseError(lineno, "empty section header");
            if (toks[0] == "settings") {
                section = Section::settings;
            } else if (toks[0] == "space") {
                if (toks.size() != 2) throw ParseError(lineno, "usage: [space NAME]");
                if (pf.find_space(toks[1]))
                    throw ParseError(lineno, "duplicate space '" + toks[1] + "'");
                pf.spaces.emplace_back(toks[1], std::map<int, std::vector<std::string>>{});
                curSpace = &pf.spaces.back().second;
                section = Section::space;
            } else if (toks[0] == "map") {
                // [map NAME : SRC -> TGT @ DEG]
                if (toks.size() != 8 || toks[2] != ":" || toks[4] != "->" || toks[6] != "@")
                    throw ParseError(lineno, "usage: [map NAME : SRC -> TGT @ DEG]");
                if (pf.find_map(toks[1]))
                    throw ParseError(lineno, "duplicate map '" + toks[1] + "'");
                RawMap m;
                m.name = toks[1];
                m.src = toks[3];
                m.tgt = toks[5];
                m.degree = parse_int(toks[7], lineno);
                pf.maps.push_back(std::move(m));
                curMap = &pf.maps.back();
                section = Section::map;
            } else if (toks[0] == "coder") {
                if (toks.size() != 4 || toks[2] != "@")
                    throw ParseError(lineno, "usage: [coder NAME @ DEG]");
                if (pf.coder) throw ParseError(lineno, "duplicate coder section");
                RawCoder c;
                c.name = toks[1];
                c.degree = parse_int(toks[3], lineno);
                pf.coder = std::move(c);
                section = Section::coder;
            } else if (toks[0] == "span") {
                if (toks.size() != 2) throw ParseError(lineno, "usage: [span NAME]");
                if (pf.find_span(toks[1]))
                    throw ParseError(lineno, "duplicate span '" + toks[1] + "'");
                pf.spans.push_back({toks[1], {}});
                curSpan = &pf.spans.back();
                section = Section::span;
            } else {
                throw ParseError(lineno, "unknown section '" + toks[0] + "'");
            }
            continue;
        }
        switch (section) {
            case Section::settings: {
                auto toks = split_ws(s);
                if (toks.size() != 2) throw ParseError(lineno, "settings lines are 'key value'");
                if (toks[0] == "mode") pf.settings.mode = toks[1];
                else if (toks[0] == "max-weight") pf.settings.max_weight = parse_int(toks[1], lineno);
                else if (toks[0] == "max-iter") pf.settings.max_iter = parse_int(toks[1], lineno);
                else if (toks[0] == "codifferential") pf.settings.codifferential = toks[1];
                else throw ParseError(lineno, "unknown setting '" + toks[0] + "'");
                break;
            }
            case Section::space: {
                auto parts = split_on(s, ":");
                if (parts.size() != 2) throw ParseError(lineno, "space lines are 'deg D : labels...'");
                auto left = split_ws(parts[0]);
                if (left.size() != 2 || left[0] != "deg")
                    throw ParseError(lineno, "space lines are 'deg D : labels...'");
                int d = parse_int(left[1], lineno);
                auto labels = split_ws(parts[1]);
                if (labels.empty()) throw ParseError(lineno, "degree with no basis labels");
                auto& dst = (*curSpace)[d];
                dst.insert(dst.end(), labels.begin(), labels.end());
                break;
            }
            case Section::map: {
                std::string t = normalize_arrow(s);
                auto colon = split_on(t, ":");
                if (colon.size() != 2) throw ParseError(lineno, "map entries are 'src -> tgt : coeff'");
                auto arrow = split_on(colon[0], "->");
                if (arrow.size() != 2) throw ParseError(lineno, "map entries are 'src -> tgt : coeff'");
                std::string src = trim(arrow[0]);
                std::string tgt = trim(arrow[1]);
                if (src.empty() || tgt.empty()) throw ParseError(lineno, "empty label in map entry");
                curMap->entries.emplace_back(src, tgt, Rational::parse(trim(colon[1])));
                break;
            }
            case Section::coder: {
                std::string t = normalize_arrow(s);
                auto colon = split_on(t, ":");
                if (colon.size() != 2) throw ParseError(lineno, "coder entries are 'word -> letter : coeff'");
                auto arrow = split_on(colon[0], "->");
                if (arrow.size() != 2) throw ParseError(lineno, "coder entries are 'word -> letter : coeff'");
                std::vector<std::string> letters;
                for (auto& piece : split_on(trim(arrow[0]), "⊗")) {
                    std::string p = trim(piece);
                    if (p.empty()) throw ParseError(lineno, "empty letter in word");
                    letters.push_back(p);
                }
                pf.coder->entries.emplace_back(std::move(letters), trim(arrow[1]),
                                               Rational::parse(trim(colon[1])));
                break;
            }
            case Section::span: {
                std::vector<std::pair<Rational, std::string>> element;
                for (auto& term : split_on(s, " + ")) {
                    auto toks = split_ws(term);
                    if (toks.size() != 2)
                        throw ParseError(lineno, "span terms are 'coeff label' joined by ' + '");
                    element.emplace_back(Rational::parse(toks[0]), toks[1]);
                }
                curSpan->elements.push_back(std::move(element));
                break;
            }
            case Section::none:
            default:
                throw ParseError(lineno, "content outside any section");
        }
    }
    if (!sawHeader) throw ParseError(lineno, "missing 'hpt 1' header");
    return pf;
}

inline ProblemFile parse_problem_string(const std::string& text) {
    std::istringstream is(text);
    return parse_problem(is);
}

// ---------------------------------------------------------------------------
// Resolution: raw sections to library objects, with label lookup.
// ---------------------------------------------------------------------------

class SpaceTable {
public:
    void add(const std::string& name, const std::map<int, std::vector<std::string>>& raw) {
        SpacePtr s = make_space(raw);
        std::map<std::string, BasisRef> lookup;
        for (const auto& [d, basis] : s->components)
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                if (!lookup.emplace(basis[static_cast<size_t>(i)], BasisRef{d, i}).second)
                    throw SemanticError("space " + name + ": label '" +
                                        basis[static_cast<size_t>(i)] +
                                        "' appears in more than one degree");
            }
        spaces_[name] = s;
        lookups_[name] = std::move(lookup);
    }

    bool has(const std::string& name) const { return spaces_.count(name) != 0; }

    const SpacePtr& space(const std::string& name) const {
        auto it = spaces_.find(name);
        if (it == spaces_.end()) throw SemanticError("unknown space '" + name + "'");
        return it->second;
    }

    BasisRef ref(const std::string& spaceName, const std::string& label) const {
        auto it = lookups_.find(spaceName);
        if (it == lookups_.end()) throw SemanticError("unknown space '" + spaceName + "'");
        auto jt = it->second.find(label);
        if (jt == it->second.end())
            throw SemanticError("label '" + label + "' not found in space " + spaceName);
        return jt->second;
    }

private:
    std::map<std::string, SpacePtr> spaces_;
    std::map<std::string, std::map<std::string, BasisRef>> lookups_;
};

inline SpaceTable resolve_spaces(const ProblemFile& pf) {
    SpaceTable t;
    for (const auto& [name, raw] : pf.spaces) t.add(name, raw);
    return t;
}

inline GradedMap resolve_map(const SpaceTable& table, const RawMap& raw) {
    GradedMap out(table.space(raw.src), table.space(raw.tgt), raw.degree);
    for (const auto& [src, tgt, c] : raw.entries) {
        try {
            out.add_entry(table.ref(raw.src, src), table.ref(raw.tgt, tgt), c);
        } catch (const Error& e) {
            throw SemanticError("map " + raw.name + ", entry " + src + " -> " + tgt + ": " +
                                e.what());
        }
    }
    return out;
}

inline Element resolve_element(const SpaceTable& table, const std::string& spaceName,
                               const std::vector<std::pair<Rational, std::string>>& terms) {
    Element out;
    for (const auto& [c, label] : terms) out.add(table.ref(spaceName, label), c);
    return out;
}

inline CoderivationSpec resolve_coder(const SpaceTable& table, const RawCoder& raw,
                                      const TensorCoalgebraPtr& coalg,
                                      const std::string& generatorSpace) {
    CoderivationSpec spec = CoderivationSpec::zero(coalg, raw.degree);
    for (const auto& [word, letter, c] : raw.entries) {
        const int n = static_cast<int>(word.size());
        if (n < 1 || n > coalg->max_weight())
            throw SemanticError("coder entry weight " + std::to_string(n) +
                                " exceeds max-weight " + std::to_string(coalg->max_weight()));
        const WordSpace& ws = coalg->weight(n);
        WordSpace::Word w;
        for (const auto& l : word) w.push_back(ws.letter_id(table.ref(generatorSpace, l)));
        try {
            spec.family[static_cast<size_t>(n - 1)].add_entry(
                ws.position(w), table.ref(generatorSpace, letter), c);
        } catch (const Error& e) {
            throw SemanticError("coder entry " + letter + ": " + e.what());
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Report {
    struct Check {
        std::string name;
        bool pass = true;
        std::string detail;
    };
    struct Quad {
        int weight = 0;  // 0 = plain-mode transferred entry
        std::string input, output;
        Rational coeff;
    };

    std::vector<Check> checks;
    std::vector<std::string> infos;
    std::vector<Quad> lambda;
    std::vector<Quad> iota;
    std::string status = "pass";  // pass | fail | error
    std::string error_message;
    ErrorKind error_kind = ErrorKind::math;
    long elapsed_ms = 0;

    void check(const std::string& name, bool pass, const std::string& detail = "") {
        checks.push_back({name, pass, detail});
        if (!pass) status = "fail";
    }

    void info(const std::string& text) { infos.push_back(text); }

    bool passed() const { return status == "pass"; }

    int exit_code() const {
        if (status == "pass") return 0;
        if (status == "fail") return 1;
        switch (error_kind) {
            case ErrorKind::input: return 2;
            case ErrorKind::nilpotency: return 3;
            default: return 1;
        }
    }

    void render(std::ostream& os, bool machine) const {
        os << "status " << status << "\n";
        if (!error_message.empty()) os << "error " << error_message << "\n";
        for (const auto& c : checks) {
            os << "check " << c.name << " " << (c.pass ? "pass" : "fail");
            if (!c.detail.empty()) os << " " << c.detail;
            os << "\n";
        }
        for (const auto& i : infos) os << "info " << i << "\n";
        for (const auto& q : lambda) {
            if (q.weight == 0)
                os << "transferred " << q.input << " -> " << q.output << " : " << q.coeff.str()
                   << "\n";
            else
                os << "lambda " << q.weight << " " << q.input << " -> " << q.output << " : "
                   << q.coeff.str() << "\n";
        }
        for (const auto& q : iota)
            os << "iota " << q.weight << " " << q.input << " -> " << q.output << " : "
               << q.coeff.str() << "\n";
        if (!machine) os << "# time: " << elapsed_ms << " ms\n";
    }

    std::string str(bool machine = true) const {
        std::ostringstream os;
        render(os, machine);
        return os.str();
    }
};

struct RunOptions {
    int max_weight = 4;
    int max_iter = 64;
    std::string mode;            // empty = take from file
    std::string codifferential;  // empty = take from file, default "both"
};

inline RunOptions merge_options(const ProblemSettings& s, RunOptions cli) {
    RunOptions out = cli;
    if (out.mode.empty()) out.mode = s.mode;
    if (out.codifferential.empty())
        out.codifferential = s.codifferential.empty() ? "both" : s.codifferential;
    if (cli.max_weight <= 0) out.max_weight = s.max_weight > 0 ? s.max_weight : 4;
    if (cli.max_iter <= 0) out.max_iter = s.max_iter > 0 ? s.max_iter : 64;
    return out;
}

// ---------------------------------------------------------------------------
// Mode assembly
// ---------------------------------------------------------------------------

namespace iodetail {

struct PlainData {
    DGModule N, M;
    GradedMap iota, pi, h;
    std::optional<GradedMap> delta;
    std::vector<Element> spanA, spanAcapM;

    Contraction contraction() const { return {N, M, iota, pi, h}; }
};

inline PlainData assemble_plain(const ProblemFile& pf, const SpaceTable& table) {
    PlainData out;
    auto need_map = [&](const std::string& name) {
        const RawMap* m = pf.find_map(name);
        if (!m) throw SemanticError("mode needs a [map " + name + " : ...] section");
        return resolve_map(table, *m);
    };
    if (!table.has("N") || !table.has("M"))
        throw SemanticError("plain modes need [space N] and [space M]");
    out.N = DGModule(table.space("N"), need_map("dN"));
    out.M = DGModule(table.space("M"), need_map("dM"));
    out.iota = need_map("iota");
    out.pi = need_map("pi");
    out.h = need_map("h");
    if (const RawMap* m = pf.find_map("delta")) out.delta = resolve_map(table, *m);
    if (const RawSpan* s = pf.find_span("A"))
        for (const auto& e : s->elements) out.spanA.push_back(resolve_element(table, "N", e));
    if (const RawSpan* s = pf.find_span("AcapM"))
        for (const auto& e : s->elements) out.spanAcapM.push_back(resolve_element(table, "M", e));
    return out;
}

struct CoalgebraData {
    SpacePtr V;
    Contraction gen;  // (W ⇄ V, k); identity when no [space W]
    TensorCoalgebraPtr coalg;
    CoderivationSpec q;
};

inline CoalgebraData assemble_coalgebra(const ProblemFile& pf, const SpaceTable& table,
                                        const RunOptions& opts) {
    if (!table.has("V")) throw SemanticError("coalgebra modes need [space V]");
    if (!pf.coder) throw SemanticError("coalgebra modes need a [coder ...] section");
    CoalgebraData out;
    out.V = table.space("V");
    out.coalg = make_tensor_coalgebra(out.V, opts.max_weight);
    out.q = resolve_coder(table, *pf.coder, out.coalg, "V");
    GradedMap d1 = out.q.family[0];
    DGModule big(out.V, d1);
    if (table.has("W")) {
        const RawMap* ri = pf.find_map("iota");
        const RawMap* rp = pf.find_map("pi");
        const RawMap* rk = pf.find_map("k");
        if (!ri || !rp || !rk)
            throw SemanticError("a subgenerator space W needs maps iota, pi and k");
        GradedMap iota = resolve_map(table, *ri);
        GradedMap pi = resolve_map(table, *rp);
        GradedMap k = resolve_map(table, *rk);
        GradedMap dW = compose(pi, compose(d1, iota));
        DGModule small(table.space("W"), dW);
        out.gen = {big, small, std::move(iota), std::move(pi), std::move(k)};
    } else {
        out.gen = identity_contraction(big);
    }
    return out;
}

inline void emit_contraction_checks(Report& report, const Contraction& c) {
    ValidationReport vN = check_complex(c.big);
    report.check("complex-N", vN.passed(), vN.passed() ? "" : vN.items.front().witness);
    ValidationReport vM = check_complex(c.small);
    report.check("complex-M", vM.passed(), vM.passed() ? "" : vM.items.front().witness);
    ValidationReport vc = validate_contraction(c);
    report.check("contraction-axioms", vc.passed(),
                 vc.passed() ? "" : vc.items.front().check + "; " + vc.items.front().witness);
}

inline void emit_transferred_plain(Report& report, const PlainData& data, const GradedMap& D) {
    GradedMap total = data.M.differential + D;
    for (const auto& [src, tgt, c] : total.entries())
        report.lambda.push_back({0, data.M.space->label(src.degree, src.index),
                                 data.M.space->label(tgt.degree, tgt.index), c});
}

/// Structure constants of a corestriction family, evaluated on the orbit
/// basis of the invariant tensors (deterministic multiset order).
inline std::vector<Report::Quad> family_on_orbits(const std::vector<GradedMap>& family,
                                                  const TensorCoalgebra& src,
                                                  const SymmetricCoalgebra& sym,
                                                  const SpacePtr& letters) {
    std::vector<Report::Quad> out;
    for (const auto& o : sym.orbits()) {
        const GradedMap& fn = family.at(static_cast<size_t>(o.weight - 1));
        Element value = fn.apply(src.weight_component(o.weight, o.vector));
        for (const auto& [b, c] : value.terms())
            out.push_back({o.weight, sym.space()->label(o.spos.degree, o.spos.index),
                           letters->label(b.degree, b.index), c});
    }
    return out;
}

template <typename Fn>
Report guarded_run(Fn&& fn) {
    Report report;
    try {
        fn(report);
    } catch (const Error& e) {
        report.status = e.kind() == ErrorKind::math ? "fail" : "error";
        report.error_kind = e.kind();
        report.error_message = e.what();
        if (const auto* h = dynamic_cast<const HypothesisFailed*>(&e))
            report.info("hypothesis " + h->which() + " witness: " + h->witness());
        else if (const auto* nl = dynamic_cast<const NotLocallyNilpotent*>(&e))
            report.info("non-terminating witness: " + nl->witness());
        else if (const auto* np = dynamic_cast<const NotAPerturbation*>(&e))
            report.info("witness: " + np->witness());
        else if (const auto* nc = dynamic_cast<const NotACodifferential*>(&e))
            report.info("witness: " + nc->witness());
    }
    return report;
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Report run_validate(const ProblemFile& pf, RunOptions cliOpts) {
    RunOptions opts = merge_options(pf.settings, cliOpts);
    return iodetail::guarded_run([&](Report& report) {
        SpaceTable table = resolve_spaces(pf);
        if (opts.mode == "linfty") {
            iodetail::CoalgebraData data = iodetail::assemble_coalgebra(pf, table, opts);
            iodetail::emit_contraction_checks(report, data.gen);
            CoalgebraContraction trick = tensor_trick(data.gen, opts.max_weight);
            ValidationReport cc =
                is_coalgebra_contraction(trick.contraction, *trick.big, *trick.small);
            report.check("coalgebra-contraction", cc.passed(),
                         cc.passed() ? "" : cc.items.front().check + "; " + cc.items.front().witness);
            if (opts.codifferential == "tensor" || opts.codifferential == "both") {
                WitnessResult t = is_codifferential_tensor(data.q);
                report.check("codifferential-tensor", t.ok, t.witness);
            }
            if (opts.codifferential == "symmetric" || opts.codifferential == "both") {
                SymmetricCoalgebra sym(data.coalg);
                WitnessResult s = is_codifferential_symmetric(data.q, sym);
                report.check("codifferential-symmetric", s.ok, s.witness);
            }
        } else {
            iodetail::PlainData data = iodetail::assemble_plain(pf, table);
            Contraction c = data.contraction();
            iodetail::emit_contraction_checks(report, c);
            if (data.delta) {
                GradedMap psi = psi_map(data.N.differential, *data.delta);
                std::string witness;
                if (auto col = psi.first_nonzero_column())
                    witness = describe(data.N.space, *col) + " -> " +
                              psi.apply(*col).str(data.N.space);
                report.check("perturbation-square", psi.is_zero(), witness);
            }
        }
    });
}

inline Report run_transfer(const ProblemFile& pf, RunOptions cliOpts) {
    RunOptions opts = merge_options(pf.settings, cliOpts);
    return iodetail::guarded_run([&](Report& report) {
        SpaceTable table = resolve_spaces(pf);
        if (opts.mode == "linfty") {
            iodetail::CoalgebraData data = iodetail::assemble_coalgebra(pf, table, opts);
            iodetail::emit_contraction_checks(report, data.gen);
            if (!report.passed()) return;
            LinftyResult res = linfty_transfer(data.gen, data.q);
            report.check("codifferential-symmetric-input", true);
            report.check("relative-hypotheses", true);
            report.check("transferred-codifferential", true);
            report.check("iota-coalgebra-morphism", true);
            CoalgebraContraction trick{res.tensorBig, res.tensorSmall, res.trick};
            std::vector<GradedMap> recursion = recursive_inclusion(trick, data.gen, res.delta);
            report.check("series-equals-recursion", true);
            report.info("psi " + std::string(res.transfer.diagnostics.psi.is_zero()
                                                 ? "zero"
                                                 : "nonzero (genuinely relative)"));
            for (const auto& obs : res.transfer.diagnostics.obstructions) report.info(obs);
            report.info("max-series-depth " +
                        std::to_string(res.transfer.diagnostics.nilpotency.max_depth));
            if (!res.transfer.proj_chain_map_checked)
                report.info(res.transfer.proj_defect_witness.empty()
                                ? "pi-defect-on-A zero (not asserted)"
                                : "pi-defect-on-A " + res.transfer.proj_defect_witness);
            report.lambda = iodetail::family_on_orbits(res.transferredStructure.family,
                                                       *res.tensorSmall, *res.symSmall,
                                                       res.tensorSmall->generators());
            report.iota = iodetail::family_on_orbits(res.inclusionFamily, *res.tensorSmall,
                                                     *res.symSmall, res.tensorBig->generators());
        } else if (opts.mode == "ordinary") {
            iodetail::PlainData data = iodetail::assemble_plain(pf, table);
            if (!data.delta) throw SemanticError("transfer needs a [map delta : N -> N @ +1] section");
            Contraction c = data.contraction();
            iodetail::emit_contraction_checks(report, c);
            if (!report.passed()) return;
            TransferResult res = ordinary_transfer(c, *data.delta, opts.max_iter);
            report.check("perturbation-square", true);
            report.check("transferred-square-zero", true);
            report.check("chain-maps", true);
            report.info("max-series-depth " +
                        std::to_string(res.diagnostics.nilpotency.max_depth));
            iodetail::emit_transferred_plain(report, data, res.transferred);
        } else if (opts.mode == "relative") {
            iodetail::PlainData data = iodetail::assemble_plain(pf, table);
            if (!data.delta) throw SemanticError("transfer needs a [map delta : N -> N @ +1] section");
            if (data.spanA.empty()) throw SemanticError("relative mode needs a [span A] section");
            Contraction c = data.contraction();
            iodetail::emit_contraction_checks(report, c);
            if (!report.passed()) return;
            RelativeData rel;
            rel.bigA.span = data.spanA;
            rel.smallAcapM.span = data.spanAcapM;
            TransferResult res = relative_transfer(c, *data.delta, rel, opts.max_iter);
            report.check("relative-hypotheses", true);
            report.check("transferred-square-zero-on-AcapM", true);
            report.check("iota-chain-map-on-AcapM", true);
            report.info("psi " + std::string(res.diagnostics.psi.is_zero()
                                                 ? "zero"
                                                 : "nonzero (genuinely relative)"));
            for (const auto& obs : res.diagnostics.obstructions) report.info(obs);
            report.info(std::string("h-preserves-A ") +
                        (res.homotopy_preserves_subspace ? "yes" : "no"));
            if (res.proj_chain_map_checked) report.check("pi-chain-map-on-A", true);
            else
                report.info(res.proj_defect_witness.empty()
                                ? "pi-defect-on-A zero (not asserted)"
                                : "pi-defect-on-A " + res.proj_defect_witness);
            iodetail::emit_transferred_plain(report, data, res.transferred);
        } else {
            throw SemanticError("unknown mode '" + opts.mode + "'");
        }
    });
}

/// The built-in sl₂ walkthrough: bracket table, Jacobi, the symmetric/tensor
/// codifferential asymmetry with an explicit weight-3 witness, and a relative
/// transfer over the full invariant subspace.
inline Report run_demo_sl2(RunOptions opts) {
    if (opts.max_weight < 3) opts.max_weight = 4;
    return iodetail::guarded_run([&](Report& report) {
        ProductTable table = sl2_table();
        for (const auto& [key, value] : table.entries) {
            if (value.is_zero()) continue;
            report.info("bracket [" + table.algebra->label(0, key.first) + "," +
                        table.algebra->label(0, key.second) + "] = " + value.str(table.algebra));
        }
        ValidationReport anti = check_antisymmetry(table);
        report.check("antisymmetry", anti.passed(),
                     anti.passed() ? "" : anti.items.front().witness);
        ValidationReport jac = check_jacobi(table);
        report.check("jacobi", jac.passed(), jac.passed() ? "" : jac.items.front().witness);

        CoderivationSpec q = encode_bilinear(table, EncodeMode::lie, opts.max_weight);
        SymmetricCoalgebra sym(q.ambient);
        WitnessResult symOk = is_codifferential_symmetric(q, sym);
        report.check("codifferential-symmetric", symOk.ok, symOk.witness);
        WitnessResult tenOk = is_codifferential_tensor(q);
        report.check("codifferential-tensor-fails", !tenOk.ok,
                     tenOk.ok ? "expected a tensor-side failure" : "");
        if (!tenOk.ok) report.info("tensor witness: " + tenOk.witness);

        DGModule big(q.ambient->generators(),
                     GradedMap::zero(q.ambient->generators(), q.ambient->generators(), 1));
        Contraction gen = identity_contraction(big);
        LinftyResult res = linfty_transfer(gen, q);
        report.check("relative-transfer", true);
        report.check("transferred-codifferential", true);
        report.info("psi " + std::string(res.transfer.diagnostics.psi.is_zero()
                                             ? "zero"
                                             : "nonzero (genuinely relative)"));
        for (const auto& obs : res.transfer.diagnostics.obstructions) report.info(obs);
        report.lambda =
            iodetail::family_on_orbits(res.transferredStructure.family, *res.tensorSmall,
                                       *res.symSmall, res.tensorSmall->generators());
    });
}

// ---------------------------------------------------------------------------
// Canonical serialization: a fixed shape with entries in resolved
// (degree, index) order. parse ∘ serialize is the identity on its image.
// ---------------------------------------------------------------------------

inline std::string canonical_serialize(const ProblemFile& pf) {
    SpaceTable table = resolve_spaces(pf);
    std::ostringstream os;
    os << "hpt 1\n";
    os << "[settings]\n";
    os << "mode " << pf.settings.mode << "\n";
    if (pf.settings.max_weight > 0) os << "max-weight " << pf.settings.max_weight << "\n";
    if (pf.settings.max_iter > 0) os << "max-iter " << pf.settings.max_iter << "\n";
    if (!pf.settings.codifferential.empty())
        os << "codifferential " << pf.settings.codifferential << "\n";
    for (const auto& [name, raw] : pf.spaces) {
        os << "[space " << name << "]\n";
        const SpacePtr& s = table.space(name);
        for (const auto& [d, basis] : s->components) {
            os << "deg " << d << " :";
            for (const auto& l : basis) os << " " << l;
            os << "\n";
        }
    }
    for (const auto& raw : pf.maps) {
        os << "[map " << raw.name << " : " << raw.src << " -> " << raw.tgt << " @ " << raw.degree
           << "]\n";
        GradedMap m = resolve_map(table, raw);
        const SpacePtr& src = table.space(raw.src);
        const SpacePtr& tgt = table.space(raw.tgt);
        for (const auto& [a, b, c] : m.entries())
            os << src->label(a.degree, a.index) << " -> " << tgt->label(b.degree, b.index)
               << " : " << c.str() << "\n";
    }
    if (pf.coder) {
        os << "[coder " << pf.coder->name << " @ " << pf.coder->degree << "]\n";
        // Canonical entry order: weight, then word position, then output letter.
        int maxw = 1;
        for (const auto& [word, letter, c] : pf.coder->entries)
            maxw = std::max(maxw, static_cast<int>(word.size()));
        TensorCoalgebraPtr coalg = make_tensor_coalgebra(table.space("V"), maxw);
        CoderivationSpec spec = resolve_coder(table, *pf.coder, coalg, "V");
        const SpacePtr& V = table.space("V");
        for (int n = 1; n <= maxw; ++n) {
            const WordSpace& ws = coalg->weight(n);
            for (const auto& [a, b, c] : spec.family[static_cast<size_t>(n - 1)].entries()) {
                const auto& w = ws.word_at(a);
                std::string word;
                for (size_t i = 0; i < w.size(); ++i) {
                    const Letter& l = ws.letter(w[i]);
                    if (i) word += "⊗";
                    word += V->label(l.degree, l.index);
                }
                os << word << " -> " << V->label(b.degree, b.index) << " : " << c.str() << "\n";
            }
        }
    }
    for (const auto& span : pf.spans) {
        os << "[span " << span.name << "]\n";
        const std::string spaceName = span.name == "AcapM" ? "M" : "N";
        for (const auto& raw : span.elements) {
            Element e = resolve_element(table, spaceName, raw);
            os << e.str(table.space(spaceName)) << "\n";
        }
    }
    return os.str();
}

}  // namespace hpt
