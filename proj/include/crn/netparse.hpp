#pragma once

#include "crn/error.hpp"
#include "crn/json_out.hpp"
#include "crn/network.hpp"
#include "crn/rational.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crn {

enum class Severity { error, warning };

struct ParseDiagnostic {
    int line = 1;
    int column = 1;
    std::string message;
    Severity severity = Severity::error;

    friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

inline std::string format_diagnostic(const ParseDiagnostic& d, std::string_view file = {}) {
    std::string out;
    if (!file.empty()) out += std::string(file) + ":";
    out += std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
    out += d.severity == Severity::error ? "error: " : "warning: ";
    out += d.message;
    return out;
}

class ParseError : public Error {
public:
    explicit ParseError(std::vector<ParseDiagnostic> diags)
        : Error(diags.empty() ? std::string("parse error") : format_diagnostic(diags.front())),
          diagnostics_(std::move(diags)) {}
    const std::vector<ParseDiagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<ParseDiagnostic> diagnostics_;
};

struct ParseResult {
    std::optional<ReactionNetwork> network;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return network.has_value(); }
    std::vector<ParseDiagnostic> errors() const {
        std::vector<ParseDiagnostic> out;
        for (const auto& d : diagnostics)
            if (d.severity == Severity::error) out.push_back(d);
        return out;
    }
};

namespace detail {

enum class Tok { number, ident, plus, minus, arrow, biarrow, lbracket, rbracket, comma, end_stmt, eof, bad };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_blank();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::eof, "", line_, col_});
                return out;
            }
            const int l = line_, c = col_;
            const char ch = src_[pos_];
            if (ch == '\n' || ch == ';') {
                advance();
                out.push_back({Tok::end_stmt, std::string(1, ch), l, c});
            } else if (ch == '+') {
                advance();
                out.push_back({Tok::plus, "+", l, c});
            } else if (ch == '[') {
                advance();
                out.push_back({Tok::lbracket, "[", l, c});
            } else if (ch == ']') {
                advance();
                out.push_back({Tok::rbracket, "]", l, c});
            } else if (ch == ',') {
                advance();
                out.push_back({Tok::comma, ",", l, c});
            } else if (ch == '-') {
                advance();
                if (peek() == '>') {
                    advance();
                    out.push_back({Tok::arrow, "->", l, c});
                } else {
                    out.push_back({Tok::minus, "-", l, c});
                }
            } else if (ch == '<') {
                if (src_.substr(pos_, 3) == "<->") {
                    advance(), advance(), advance();
                    out.push_back({Tok::biarrow, "<->", l, c});
                } else {
                    advance();
                    out.push_back({Tok::bad, "<", l, c});
                }
            } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
                out.push_back({Tok::number, lex_number(), l, c});
            } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::string id;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    id.push_back(src_[pos_]);
                    advance();
                }
                out.push_back({Tok::ident, std::move(id), l, c});
            } else {
                std::string bad;
                do {
                    bad.push_back(src_[pos_]);
                    ++pos_;
                } while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80);
                ++col_;
                out.push_back({Tok::bad, std::move(bad), l, c});
            }
        }
    }

private:
    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            const char ch = src_[pos_];
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                advance();
            } else if (ch == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::string lex_number() {
        std::string s;
        auto digits = [&] {
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                s.push_back(peek());
                advance();
            }
        };
        digits();
        if (peek() == '.') {
            s.push_back('.');
            advance();
            digits();
        }
        if (peek() == 'e' || peek() == 'E') {
            // Only an exponent when digits follow; otherwise "2e" would eat a species name.
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                while (pos_ < look) {
                    s.push_back(peek());
                    advance();
                }
                digits();
            }
        }
        if (peek() == '/') {
            s.push_back('/');
            advance();
            digits();
        }
        return s;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct RawReaction {
    std::map<std::size_t, Rational> source;
    std::map<std::size_t, Rational> target;
    Rational rate;
    int line;
    int column;
};

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

    ParseResult run() {
        while (cur().kind != Tok::eof) {
            if (cur().kind == Tok::end_stmt) {
                ++i_;
                continue;
            }
            const std::size_t errors_before = error_count();
            statement();
            if (error_count() != errors_before) {
                while (cur().kind != Tok::end_stmt && cur().kind != Tok::eof) ++i_;
            }
        }
        return finish();
    }

private:
    const Token& cur() const { return toks_[i_]; }

    std::size_t error_count() const {
        return static_cast<std::size_t>(std::count_if(diags_.begin(), diags_.end(), [](const ParseDiagnostic& d) {
            return d.severity == Severity::error;
        }));
    }

    void error(const Token& t, std::string msg) { diags_.push_back({t.line, t.column, std::move(msg), Severity::error}); }
    void warning(int line, int col, std::string msg) {
        diags_.push_back({line, col, std::move(msg), Severity::warning});
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case Tok::eof: return "end of input";
            case Tok::end_stmt: return t.text == ";" ? "';'" : "end of line";
            default: return "'" + t.text + "'";
        }
    }

    std::size_t species_index(const Token& t) {
        auto it = index_.find(t.text);
        if (it != index_.end()) return it->second;
        const std::size_t k = names_.size();
        names_.push_back(t.text);
        first_seen_.push_back({t.line, t.column});
        index_.emplace(t.text, k);
        return k;
    }

    std::optional<std::map<std::size_t, Rational>> complex() {
        std::map<std::size_t, Rational> terms;
        bool first = true;
        while (true) {
            const Token& t = cur();
            Rational coeff = 1;
            if (t.kind == Tok::number) {
                auto q = parse_rational(t.text, false);
                if (!q) {
                    error(t, "malformed coefficient " + describe(t));
                    return std::nullopt;
                }
                ++i_;
                if (cur().kind != Tok::ident) {
                    if (first && *q == 0 && cur().kind != Tok::plus) return terms;
                    error(cur(), "expected species name after coefficient, found " + describe(cur()));
                    return std::nullopt;
                }
                coeff = *q;
            } else if (t.kind != Tok::ident) {
                error(t, "expected complex, found " + describe(t));
                return std::nullopt;
            }
            const std::size_t k = species_index(cur());
            ++i_;
            terms[k] += coeff;
            if (terms[k] == 0) terms.erase(k);
            first = false;
            if (cur().kind != Tok::plus) return terms;
            ++i_;
        }
    }

    std::optional<Rational> rate_value(bool& ok) {
        bool negative = false;
        const Token start = cur();
        if (cur().kind == Tok::minus) {
            negative = true;
            ++i_;
        }
        const Token& t = cur();
        if (t.kind != Tok::number) {
            error(t, "expected rate constant, found " + describe(t));
            ok = false;
            return std::nullopt;
        }
        auto q = parse_rational(t.text, false);
        ++i_;
        if (!q) {
            error(t, "malformed rate constant " + describe(t));
            ok = false;
            return std::nullopt;
        }
        if (negative) *q = -*q;
        if (*q <= 0) {
            error(start, "rate constant must be positive");
            return std::nullopt;
        }
        return q;
    }

    void statement() {
        auto lhs = complex();
        if (!lhs) return;
        const Token arrow = cur();
        if (arrow.kind != Tok::arrow && arrow.kind != Tok::biarrow) {
            error(arrow, "expected '->' or '<->', found " + describe(arrow));
            return;
        }
        ++i_;
        auto rhs = complex();
        if (!rhs) return;
        const bool both = arrow.kind == Tok::biarrow;

        std::optional<Rational> kf, kb;
        bool rate_ok = true;
        if (cur().kind == Tok::lbracket) {
            ++i_;
            kf = rate_value(rate_ok);
            if (!rate_ok) return;
            bool two = false;
            if (cur().kind == Tok::comma) {
                const Token comma = cur();
                ++i_;
                two = true;
                kb = rate_value(rate_ok);
                if (!rate_ok) return;
                if (!both) {
                    error(comma, "two rate constants given for a one-way reaction");
                    return;
                }
            }
            if (cur().kind != Tok::rbracket) {
                error(cur(), "expected ']', found " + describe(cur()));
                return;
            }
            ++i_;
            // A non-positive constant has already been reported.
            if (!kf || (two && !kb)) return;
            if (!two) kb = kf;
        } else {
            warning(arrow.line, arrow.column, "no rate constant given, using 1");
            kf = Rational(1);
            kb = Rational(1);
        }
        if (cur().kind != Tok::end_stmt && cur().kind != Tok::eof) {
            error(cur(), "expected end of statement, found " + describe(cur()));
            return;
        }
        add(*lhs, *rhs, *kf, arrow);
        if (both) add(*rhs, *lhs, *kb, arrow);
    }

    void add(const std::map<std::size_t, Rational>& s, const std::map<std::size_t, Rational>& t, const Rational& k,
             const Token& at) {
        if (s == t) {
            error(at, "reaction source equals its target (self-loop)");
            return;
        }
        for (const auto& r : raw_) {
            if (r.source == s && r.target == t) {
                error(at, "duplicate reaction (first given at line " + std::to_string(r.line) + ")");
                return;
            }
        }
        raw_.push_back({s, t, k, at.line, at.column});
    }

    ParseResult finish() {
        ParseResult res;
        const std::size_t d = names_.size();
        if (error_count() == 0) {
            std::vector<bool> changes(d, false);
            for (const auto& r : raw_) {
                for (std::size_t k = 0; k < d; ++k) {
                    auto s = r.source.find(k);
                    auto t = r.target.find(k);
                    Rational a = s == r.source.end() ? Rational(0) : s->second;
                    Rational b = t == r.target.end() ? Rational(0) : t->second;
                    if (a != b) changes[k] = true;
                }
            }
            for (std::size_t k = 0; k < d; ++k) {
                if (!changes[k])
                    warning(first_seen_[k].first, first_seen_[k].second,
                            "species '" + names_[k] + "' is redundant (no reaction changes it)");
            }
            auto vec = [d](const std::map<std::size_t, Rational>& m) {
                RationalVector v(d, Rational(0));
                for (const auto& [k, q] : m) v[k] = q;
                return Complex(std::move(v));
            };
            std::vector<Reaction> rs;
            for (const auto& r : raw_) rs.push_back({vec(r.source), vec(r.target), Rate(r.rate)});
            res.network = ReactionNetwork(names_, std::move(rs));
        }
        std::stable_sort(diags_.begin(), diags_.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
            return std::pair(a.line, a.column) < std::pair(b.line, b.column);
        });
        res.diagnostics = std::move(diags_);
        return res;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::vector<ParseDiagnostic> diags_;
    std::vector<std::string> names_;
    std::vector<std::pair<int, int>> first_seen_;
    std::map<std::string, std::size_t> index_;
    std::vector<RawReaction> raw_;
};

}  // namespace detail

/// Parses the reaction DSL. Never throws; errors come back as diagnostics
/// and leave `network` empty.
inline ParseResult parse_network(std::string_view src) { return detail::Parser(src).run(); }

/// Throwing convenience wrapper; warnings are dropped.
inline ReactionNetwork parse_network_or_throw(std::string_view src) {
    auto res = parse_network(src);
    if (!res.ok()) throw ParseError(res.errors());
    return std::move(*res.network);
}

enum class Format { dsl, json };

namespace detail {

inline std::string complex_text(const Complex& c, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t k = 0; k < c.dim(); ++k) {
        const Rational& q = c.coords[k];
        if (q == 0) continue;
        if (!out.empty()) out += " + ";
        if (q != 1) out += to_fraction_string(q) + " ";
        out += names[k];
    }
    return out.empty() ? std::string("0") : out;
}

/// Species indices in the order the parser would meet them in one statement.
inline std::vector<std::size_t> appearance(const Reaction& r) {
    std::vector<std::size_t> out;
    for (const Complex* c : {&r.source, &r.target}) {
        for (std::size_t k = 0; k < c->dim(); ++k) {
            if (c->coords[k] != 0 && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        }
    }
    return out;
}

}  // namespace detail

inline Json network_json(const ReactionNetwork& net) {
    auto complex_obj = [&](const Complex& c) {
        Json o = Json::object();
        for (std::size_t k = 0; k < c.dim(); ++k) {
            if (c.coords[k] != 0) o[net.species()[k]] = rational_json(c.coords[k]);
        }
        return o;
    };
    Json j;
    j["species"] = net.species();
    j["reactions"] = Json::array();
    for (const auto& r : net.reactions()) {
        Json e;
        e["source"] = complex_obj(r.source);
        e["target"] = complex_obj(r.target);
        // A plain number only when it reads back to the same rational.
        if (rational_from_double(r.rate.value) == r.rate.exact)
            e["rate"] = r.rate.value;
        else
            e["rate"] = to_fraction_string(r.rate.exact);
        j["reactions"].push_back(std::move(e));
    }
    return j;
}

/// DSL or JSON text. The DSL form re-parses to an equal network: statements
/// are ordered so species show up in their index order, and if that is not
/// possible the first statement carries zero-coefficient terms naming every
/// species. The empty network has no DSL form (PreconditionError).
inline std::string serialize_network(const ReactionNetwork& net, Format format) {
    if (format == Format::json) return dump_json(network_json(net)) + "\n";
    if (net.empty()) throw PreconditionError("the empty network has no DSL form");

    const auto& rs = net.reactions();
    std::vector<bool> used(rs.size(), false);
    std::vector<std::size_t> order;
    std::size_t next_species = 0;
    std::vector<bool> seen(net.dim(), false);
    bool greedy_ok = true;
    while (order.size() < rs.size()) {
        bool picked = false;
        for (std::size_t i = 0; i < rs.size() && !picked; ++i) {
            if (used[i]) continue;
            std::size_t expect = next_species;
            bool fits = true;
            for (auto k : detail::appearance(rs[i])) {
                if (seen[k]) continue;
                if (k != expect) {
                    fits = false;
                    break;
                }
                ++expect;
            }
            if (!fits) continue;
            for (auto k : detail::appearance(rs[i])) seen[k] = true;
            next_species = expect;
            used[i] = true;
            order.push_back(i);
            picked = true;
        }
        if (!picked) {
            greedy_ok = false;
            break;
        }
    }
    if (!greedy_ok || next_species != net.dim()) {
        order.clear();
        for (std::size_t i = 0; i < rs.size(); ++i) order.push_back(i);
    }
    const bool declare = !greedy_ok || next_species != net.dim();

    std::string out;
    for (std::size_t n = 0; n < order.size(); ++n) {
        const Reaction& r = rs[order[n]];
        std::string lhs = detail::complex_text(r.source, net.species());
        if (n == 0 && declare) {
            std::string decl;
            for (const auto& name : net.species()) decl += (decl.empty() ? "" : " + ") + std::string("0 ") + name;
            lhs = r.source.is_zero() ? decl : decl + " + " + lhs;
        }
        out += lhs + " -> " + detail::complex_text(r.target, net.species()) + " [" + to_string(r.rate.exact) + "]\n";
    }
    return out;
}

/// Reads the JSON schema written by serialize_network. Coefficients may be
/// numbers or "p/q" strings. Throws ParseError.
inline ReactionNetwork network_from_json(std::string_view text) {
    auto fail = [](std::string msg, int line = 1, int col = 1) -> ParseError {
        return ParseError({{line, col, std::move(msg), Severity::error}});
    };
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        int line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw fail(std::string("malformed JSON: ") + e.what(), line, col);
    }
    if (!j.is_object() || !j.contains("species") || !j["species"].is_array())
        throw fail("JSON network needs a 'species' array");
    std::vector<std::string> names;
    std::map<std::string, std::size_t> index;
    for (const auto& s : j["species"]) {
        if (!s.is_string()) throw fail("species names must be strings");
        if (index.count(s.get<std::string>())) throw fail("duplicate species '" + s.get<std::string>() + "'");
        index[s.get<std::string>()] = names.size();
        names.push_back(s.get<std::string>());
    }
    auto number = [&](const Json& v, const std::string& what) -> Rational {
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_float()) return rational_from_double(v.get<double>());
        if (v.is_string()) {
            if (auto q = parse_rational(v.get<std::string>())) return *q;
        }
        throw fail("malformed " + what);
    };
    auto complex_of = [&](const Json& o) {
        if (!o.is_object()) throw fail("complex must be an object of species coefficients");
        RationalVector v(names.size(), Rational(0));
        for (auto it = o.begin(); it != o.end(); ++it) {
            auto k = index.find(it.key());
            if (k == index.end()) throw fail("unknown species '" + it.key() + "'");
            Rational q = number(it.value(), "coefficient");
            if (q < 0) throw fail("coefficients must be nonnegative");
            v[k->second] = q;
        }
        return Complex(std::move(v));
    };
    std::vector<Reaction> rs;
    if (j.contains("reactions")) {
        if (!j["reactions"].is_array()) throw fail("'reactions' must be an array");
        for (const auto& e : j["reactions"]) {
            if (!e.is_object() || !e.contains("source") || !e.contains("target"))
                throw fail("reaction needs 'source' and 'target'");
            Rational k = e.contains("rate") ? number(e["rate"], "rate") : Rational(1);
            if (k <= 0) throw fail("rate constant must be positive");
            rs.push_back({complex_of(e["source"]), complex_of(e["target"]), Rate(k)});
        }
    }
    try {
        return ReactionNetwork(std::move(names), std::move(rs));
    } catch (const PreconditionError& e) {
        throw fail(e.what());
    }
}

}  // namespace crn
