#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ilp/datalog.hpp"
#include "ilp/errors.hpp"
#include "ilp/logic.hpp"

namespace ilp {

struct PredicateDecl {
    Symbol name;
    std::size_t arity = 0;

    friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
    friend auto operator<=>(const PredicateDecl&, const PredicateDecl&) = default;
};

/// Language bias. Constant positions are 0-based here (1-based in files).
struct Bias {
    PredicateDecl head;
    std::vector<PredicateDecl> body_preds;
    std::size_t max_vars = 3;
    std::size_t max_body = 3;
    std::size_t max_rules = 1;
    bool recursion = false;
    std::map<std::pair<Symbol, std::size_t>, std::vector<Symbol>> constants;

    const std::vector<Symbol>& allowed_constants(Symbol pred, std::size_t position) const {
        static const std::vector<Symbol> none;
        auto it = constants.find({pred, position});
        return it == constants.end() ? none : it->second;
    }
};

struct Task {
    std::string name;
    Program bk;
    FactStore bk_model;
    std::vector<Literal> pos;
    std::vector<Literal> neg;
    bool has_test = false;
    std::vector<Literal> test_pos;
    std::vector<Literal> test_neg;
    Bias bias;
    std::vector<Symbol> constant_domain;
};

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

namespace detail {

struct Node {
    enum Kind { Var, Const, Compound, List } kind = Const;
    std::string name;
    bool quoted = false;
    bool integer = false;
    std::vector<Node> args;
    std::size_t line = 0, col = 0;
};

struct ClauseAst {
    Node head;
    std::vector<Node> body;
    bool has_neck = false;
};

class Reader {
public:
    Reader(std::string_view text, std::string file) : s_(text), file_(std::move(file)) {}

    std::vector<ClauseAst> clauses() {
        std::vector<ClauseAst> out;
        for (skip(); pos_ < s_.size(); skip()) out.push_back(clause());
        return out;
    }

    [[noreturn]] void fail(std::size_t line, std::size_t col, const std::string& msg) const {
        throw ParseError(file_, line, col, msg);
    }

    const std::string& file() const { return file_; }

private:
    ClauseAst clause() {
        ClauseAst c;
        c.head = term();
        skip();
        if (accept(":-") || accept("\xE2\x86\x90") || accept("<-")) {
            c.has_neck = true;
            do {
                skip();
                c.body.push_back(term());
                skip();
            } while (accept(","));
        }
        skip();
        if (!accept(".")) fail(line_, col_, expected("'.' at end of clause"));
        return c;
    }

    Node term() {
        skip();
        Node n;
        n.line = line_;
        n.col = col_;
        if (pos_ >= s_.size()) fail(line_, col_, "unexpected end of input");
        const char c = s_[pos_];
        if (c == '[') {
            advance();
            n.kind = Node::List;
            skip();
            if (accept("]")) return n;
            do {
                n.args.push_back(term());
                skip();
            } while (accept(","));
            if (!accept("]")) fail(line_, col_, expected("']'"));
            return n;
        }
        if (c == '\'') {
            advance();
            n.quoted = true;
            while (pos_ < s_.size() && s_[pos_] != '\'') {
                if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) advance();
                if (s_[pos_] == '\n') fail(n.line, n.col, "unterminated quoted atom");
                n.name += s_[pos_];
                advance();
            }
            if (pos_ >= s_.size()) fail(n.line, n.col, "unterminated quoted atom");
            advance();
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            n.integer = true;
            n.name += c;
            advance();
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                n.name += s_[pos_];
                advance();
            }
            return n;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                n.name += s_[pos_];
                advance();
            }
            if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
                n.kind = Node::Var;
                return n;
            }
        } else {
            fail(line_, col_, std::string("unexpected character '") + c + "'");
        }
        if (pos_ < s_.size() && s_[pos_] == '(') {
            advance();
            n.kind = Node::Compound;
            do {
                n.args.push_back(term());
                skip();
            } while (accept(","));
            if (!accept(")")) fail(line_, col_, expected("')'"));
        }
        return n;
    }

    std::string expected(const std::string& what) const {
        if (pos_ >= s_.size()) return "expected " + what + ", found end of input";
        return "expected " + what + ", found '" + std::string(1, s_[pos_]) + "'";
    }

    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(s_[pos_]) & 0xC0) != 0x80) {
            ++col_;
        }
        ++pos_;
    }

    bool accept(std::string_view tok) {
        if (s_.substr(pos_, tok.size()) != tok) return false;
        for (std::size_t i = 0; i < tok.size(); ++i) advance();
        return true;
    }

    void skip() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                while (pos_ < s_.size() && s_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view s_;
    std::string file_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

inline std::string describe(const Node& n) {
    switch (n.kind) {
        case Node::Var: return "variable " + n.name;
        case Node::List: return "list";
        case Node::Compound: return "term " + n.name + "/" + std::to_string(n.args.size());
        default: return "constant " + n.name;
    }
}

inline Term to_term(const Reader& rd, const Node& n) {
    switch (n.kind) {
        case Node::Var: return Term::variable(n.name);
        case Node::Const: return Term::constant(n.name);
        case Node::Compound:
            rd.fail(n.line, n.col, "function symbols are not supported: " + describe(n));
        default: rd.fail(n.line, n.col, "lists are not allowed here");
    }
}

inline Literal to_literal(const Reader& rd, const Node& n) {
    if (n.kind == Node::Var || n.kind == Node::List || n.integer || n.quoted)
        rd.fail(n.line, n.col, "expected a literal, found " + describe(n));
    std::vector<Term> args;
    for (const Node& a : n.args) args.push_back(to_term(rd, a));
    return Literal(n.name, std::move(args));
}

inline Rule to_rule(const Reader& rd, const ClauseAst& c) {
    std::vector<Literal> body;
    for (const Node& b : c.body) body.push_back(to_literal(rd, b));
    return Rule(to_literal(rd, c.head), std::move(body));
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParseError(p.string(), 0, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::size_t positive_integer(const Reader& rd, const Node& n, const std::string& directive) {
    if (n.kind != Node::Compound || n.args.size() != 1 || !n.args[0].integer || n.args[0].name[0] == '-')
        rd.fail(n.line, n.col, directive + " expects one non-negative integer");
    const std::size_t v = std::stoul(n.args[0].name);
    if (v == 0) rd.fail(n.args[0].line, n.args[0].col, directive + " must be at least 1");
    return v;
}

struct Examples {
    std::vector<Literal> pos, neg;
    std::vector<std::pair<std::size_t, std::size_t>> pos_at, neg_at;
};

inline Examples read_examples(std::string_view text, const std::string& file) {
    Reader rd(text, file);
    Examples ex;
    for (const ClauseAst& c : rd.clauses()) {
        const Node& h = c.head;
        if (c.has_neck || h.kind != Node::Compound || (h.name != "pos" && h.name != "neg") || h.args.size() != 1)
            rd.fail(h.line, h.col, "expected pos(Atom). or neg(Atom).");
        Literal atom = to_literal(rd, h.args[0]);
        if (!atom.is_ground()) rd.fail(h.args[0].line, h.args[0].col, "example " + to_string(atom) + " is not ground");
        auto& list = h.name == "pos" ? ex.pos : ex.neg;
        auto& at = h.name == "pos" ? ex.pos_at : ex.neg_at;
        if (std::find(list.begin(), list.end(), atom) != list.end()) continue;
        list.push_back(std::move(atom));
        at.emplace_back(h.args[0].line, h.args[0].col);
    }
    return ex;
}

}  // namespace detail

/// Rules in clause syntax (`h :- b1, b2.`, `←` and `<-` also accepted).
inline std::vector<Rule> parse_rules(std::string_view text, const std::string& file = "<rules>") {
    detail::Reader rd(text, file);
    std::vector<Rule> out;
    for (const auto& c : rd.clauses()) out.push_back(detail::to_rule(rd, c));
    return out;
}

inline Hypothesis parse_hypothesis(std::string_view text, const std::string& file = "<rules>") {
    return Hypothesis(parse_rules(text, file));
}

inline Bias parse_bias(std::string_view text, const std::string& file = "bias.pl") {
    detail::Reader rd(text, file);
    Bias b;
    bool have_head = false;
    std::set<std::string> seen;
    std::vector<std::pair<detail::Node, std::vector<Symbol>>> constant_lines;

    auto decl = [&](const detail::Node& n, const std::string& what) {
        if (n.kind != detail::Node::Compound || n.args.size() != 2 || n.args[0].kind != detail::Node::Const ||
            n.args[0].integer || !n.args[1].integer || n.args[1].name[0] == '-')
            rd.fail(n.line, n.col, what + " expects (name, arity)");
        return PredicateDecl{Symbol(n.args[0].name), std::stoul(n.args[1].name)};
    };

    for (const auto& c : rd.clauses()) {
        const detail::Node& n = c.head;
        if (c.has_neck) rd.fail(n.line, n.col, "rules are not allowed in the bias");
        if (n.name == "head_pred") {
            if (have_head) rd.fail(n.line, n.col, "only one head_pred is supported");
            b.head = decl(n, "head_pred");
            have_head = true;
        } else if (n.name == "body_pred") {
            PredicateDecl d = decl(n, "body_pred");
            for (const auto& e : b.body_preds)
                if (e.name == d.name) rd.fail(n.line, n.col, "duplicate body_pred " + std::string(d.name.str()));
            b.body_preds.push_back(d);
        } else if (n.name == "max_vars" || n.name == "max_body" || n.name == "max_rules" || n.name == "max_clauses") {
            const std::size_t v = detail::positive_integer(rd, n, n.name);
            if (n.name == "max_vars") b.max_vars = v;
            else if (n.name == "max_body") b.max_body = v;
            else b.max_rules = v;
        } else if (n.name == "enable_recursion" && n.kind == detail::Node::Const) {
            b.recursion = true;
        } else if (n.name == "constant") {
            if (n.kind != detail::Node::Compound || n.args.size() != 3 || n.args[0].kind != detail::Node::Const ||
                !n.args[1].integer || n.args[2].kind != detail::Node::List)
                rd.fail(n.line, n.col, "constant expects (predicate, position, [constants])");
            std::vector<Symbol> values;
            for (const auto& v : n.args[2].args) {
                if (v.kind != detail::Node::Const) rd.fail(v.line, v.col, "expected a constant, found " + detail::describe(v));
                values.emplace_back(v.name);
            }
            constant_lines.emplace_back(n, std::move(values));
        } else {
            rd.fail(n.line, n.col, "unknown bias directive " + n.name);
        }
    }
    if (!have_head) throw ParseError(file, 0, 0, "missing head_pred declaration");
    if (b.body_preds.empty()) throw ParseError(file, 0, 0, "no body_pred declarations");
    if (b.max_vars < b.head.arity)
        throw ParseError(file, 0, 0, "max_vars is smaller than the head arity");
    for (const auto& d : b.body_preds)
        if (d.name == b.head.name && !b.recursion)
            throw ParseError(file, 0, 0, "head predicate declared as body_pred without enable_recursion");

    for (auto& [n, values] : constant_lines) {
        Symbol pred(n.args[0].name);
        const long long position = std::stoll(n.args[1].name);
        auto it = std::find_if(b.body_preds.begin(), b.body_preds.end(), [&](const auto& d) { return d.name == pred; });
        if (it == b.body_preds.end()) rd.fail(n.line, n.col, "constant refers to undeclared body predicate " + n.args[0].name);
        if (position < 1 || static_cast<std::size_t>(position) > it->arity)
            rd.fail(n.args[1].line, n.args[1].col, "argument position out of range for " + n.args[0].name);
        auto& slot = b.constants[{pred, static_cast<std::size_t>(position - 1)}];
        for (Symbol v : values)
            if (std::find(slot.begin(), slot.end(), v) == slot.end()) slot.push_back(v);
        std::sort(slot.begin(), slot.end());
    }
    return b;
}

namespace detail {

inline void check_example_shape(const Bias& b, const std::vector<Literal>& xs,
                                const std::vector<std::pair<std::size_t, std::size_t>>& at, const std::string& file) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].predicate() != b.head.name)
            throw ParseError(file, at[i].first, at[i].second,
                             "unknown predicate " + std::string(xs[i].predicate().str()) + " in example");
        if (xs[i].arity() != b.head.arity)
            throw ParseError(file, at[i].first, at[i].second,
                             "arity mismatch: " + std::string(b.head.name.str()) + " is declared with arity " +
                                 std::to_string(b.head.arity));
    }
}

}  // namespace detail

/// Builds a validated task from the three file contents.
inline Task parse_task_text(std::string_view bk_text, std::string_view exs_text, std::string_view bias_text,
                            std::string_view test_text = {}, bool has_test = false, const std::string& dir = "") {
    auto path = [&](const char* f) { return dir.empty() ? std::string(f) : (std::filesystem::path(dir) / f).string(); };
    Task t;
    t.name = dir.empty() ? "task" : std::filesystem::path(dir).filename().string();
    t.bias = parse_bias(bias_text, path("bias.pl"));

    // Background knowledge
    const std::string bk_file = path("bk.pl");
    detail::Reader rd(bk_text, bk_file);
    std::map<Symbol, std::size_t> arity;
    for (const auto& d : t.bias.body_preds) arity[d.name] = d.arity;
    arity[t.bias.head.name] = t.bias.head.arity;
    std::set<Rule> seen;
    for (const auto& c : rd.clauses()) {
        Rule r = detail::to_rule(rd, c);
        auto check_arity = [&](const Literal& l, const detail::Node& n) {
            auto [it, fresh] = arity.emplace(l.predicate(), l.arity());
            if (!fresh && it->second != l.arity())
                rd.fail(n.line, n.col, "arity mismatch: " + std::string(l.predicate().str()) + " used with arity " +
                                           std::to_string(l.arity()) + ", expected " + std::to_string(it->second));
        };
        check_arity(r.head(), c.head);
        for (std::size_t i = 0; i < c.body.size(); ++i) check_arity(detail::to_literal(rd, c.body[i]), c.body[i]);
        if (auto v = unsafe_variable(r))
            rd.fail(c.head.line, c.head.col,
                    "unsafe rule `" + to_string(r) + "`: head variable " + std::string(v->str()) + " does not occur in the body");
        if (r.head().predicate() == t.bias.head.name && r.head().arity() == t.bias.head.arity && !t.bias.recursion)
            rd.fail(c.head.line, c.head.col,
                    "background knowledge defines the target predicate " + std::string(t.bias.head.name.str()));
        if (seen.insert(r).second) t.bk.rules.push_back(std::move(r));
    }

    // Examples
    const std::string exs_file = path("exs.pl");
    auto ex = detail::read_examples(exs_text, exs_file);
    detail::check_example_shape(t.bias, ex.pos, ex.pos_at, exs_file);
    detail::check_example_shape(t.bias, ex.neg, ex.neg_at, exs_file);
    for (std::size_t i = 0; i < ex.neg.size(); ++i)
        if (std::find(ex.pos.begin(), ex.pos.end(), ex.neg[i]) != ex.pos.end())
            throw ParseError(exs_file, ex.neg_at[i].first, ex.neg_at[i].second,
                             "example " + to_string(ex.neg[i]) + " is both positive and negative");
    if (ex.pos.empty()) throw ParseError(exs_file, 0, 0, "no positive examples");
    t.pos = std::move(ex.pos);
    t.neg = std::move(ex.neg);

    if (has_test) {
        const std::string test_file = path("test_exs.pl");
        auto te = detail::read_examples(test_text, test_file);
        detail::check_example_shape(t.bias, te.pos, te.pos_at, test_file);
        detail::check_example_shape(t.bias, te.neg, te.neg_at, test_file);
        t.has_test = true;
        t.test_pos = std::move(te.pos);
        t.test_neg = std::move(te.neg);
    }

    // Constant domain: bk, training examples, bias allow-lists
    std::set<Symbol> domain;
    auto add = [&](const Literal& l) {
        for (const Term& a : l.args())
            if (a.is_constant()) domain.insert(a.name());
    };
    for (const Rule& r : t.bk.rules) {
        add(r.head());
        for (const Literal& l : r.body()) add(l);
    }
    for (const Literal& e : t.pos) add(e);
    for (const Literal& e : t.neg) add(e);
    for (const auto& [k, vs] : t.bias.constants) domain.insert(vs.begin(), vs.end());
    t.constant_domain.assign(domain.begin(), domain.end());

    t.bk_model = least_model(t.bk);
    return t;
}

/// Reads bk.pl, exs.pl, bias.pl and (when present) test_exs.pl from `dir`.
inline Task parse_task(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ParseError(dir.string(), 0, 0, "task directory not found");
    const auto test = dir / "test_exs.pl";
    const bool has_test = std::filesystem::exists(test);
    const std::string bk = detail::read_file(dir / "bk.pl");
    const std::string exs = detail::read_file(dir / "exs.pl");
    const std::string bias = detail::read_file(dir / "bias.pl");
    const std::string te = has_test ? detail::read_file(test) : std::string();
    return parse_task_text(bk, exs, bias, te, has_test, dir.string());
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

inline std::string render_rule(const Rule& r) { return to_string(r) + "."; }

/// One rule per line with canonical variables; "% (empty)" for the empty hypothesis.
inline std::string render_hypothesis(const Hypothesis& h) {
    if (h.empty()) return "% (empty)\n";
    std::string out;
    const Hypothesis c = canonicalize(h);
    for (const Rule& r : c.rules()) out += render_rule(r) + "\n";
    return out;
}

}  // namespace ilp
