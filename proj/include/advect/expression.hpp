#pragma once

// Field expressions over the variables x and y.
//
// Grammar (standard precedence, '^' right-associative and binding tighter
// than unary minus, so -x^2 == -(x^2)):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | identifier '(' expr (',' expr)* ')' | '(' expr ')'
//
// Identifiers: x, y, pi, caller-bound parameters, and the functions
// sin cos exp log sqrt abs (one argument) and min max (two arguments).

#include <advect/error.hpp>
#include <advect/geometry.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace advect {

/// Forward-mode dual number carrying the gradient with respect to (x, y).
struct Dual {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;

    static constexpr Dual constant(double c) { return {c, 0.0, 0.0}; }
    constexpr bool is_constant() const { return dx == 0.0 && dy == 0.0; }
};

constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
constexpr Dual operator-(const Dual& a) { return {-a.v, -a.dx, -a.dy}; }
constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
}
constexpr Dual operator/(const Dual& a, const Dual& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.dx - q * b.dx) * inv, (a.dy - q * b.dy) * inv};
}
/// Chain rule helper: f(a) with f'(a) = slope.
constexpr Dual chain(const Dual& a, double value, double slope) { return {value, slope * a.dx, slope * a.dy}; }

enum class Op { number, var_x, var_y, param, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, exp, log, sqrt, abs, min, max };

inline std::string_view func_name(Func f) {
    switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
    case Func::min: return "min";
    case Func::max: return "max";
    }
    return "?";
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::number;
    double value = 0.0; // number literal or bound parameter value
    std::string name;   // parameter name
    Func func = Func::sin;
    std::vector<NodePtr> args;
};

inline bool same_tree(const Node& a, const Node& b) {
    if (a.op != b.op || a.args.size() != b.args.size()) return false;
    switch (a.op) {
    case Op::number:
        if (a.value != b.value) return false;
        break;
    case Op::param:
        if (a.name != b.name || a.value != b.value) return false;
        break;
    case Op::call:
        if (a.func != b.func) return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_tree(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

using Parameters = std::map<std::string, double, std::less<>>;

namespace detail {

class Parser {
public:
    Parser(std::string_view src, const Parameters& params) : src_(src), params_(params) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= src_.size()) fail("empty expression");
        NodePtr n = expr();
        skip_ws();
        if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
        return n;
    }

private:
    std::string_view src_;
    const Parameters& params_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, std::optional<std::size_t> at = std::nullopt) const {
        const std::size_t where = at.value_or(pos_);
        std::ostringstream os;
        os << msg << " at offset " << where;
        throw Error(ErrorKind::syntax_error, os.str(), where);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static NodePtr make(Op op, std::vector<NodePtr> args = {}) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->args = std::move(args);
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (true) {
            if (accept('+')) lhs = make(Op::add, {lhs, term()});
            else if (accept('-')) lhs = make(Op::sub, {lhs, term()});
            else return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            if (accept('*')) lhs = make(Op::mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Op::div, {lhs, unary()});
            else return lhs;
        }
    }
    NodePtr unary() {
        if (accept('-')) return make(Op::neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Op::pow, {base, unary()});
        return base;
    }
    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (accept('(')) {
            NodePtr n = expr();
            expect(')');
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected '") + c + "'");
    }
    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) fail("malformed number '" + text + "'", start);
        auto n = std::make_shared<Node>();
        n->op = Op::number;
        n->value = v;
        return n;
    }
    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view id = src_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            static const std::map<std::string_view, std::pair<Func, int>> funcs = {
                {"sin", {Func::sin, 1}},   {"cos", {Func::cos, 1}}, {"exp", {Func::exp, 1}},
                {"log", {Func::log, 1}},   {"sqrt", {Func::sqrt, 1}}, {"abs", {Func::abs, 1}},
                {"min", {Func::min, 2}},   {"max", {Func::max, 2}},
            };
            const auto it = funcs.find(id);
            if (it == funcs.end()) {
                throw Error(ErrorKind::unknown_identifier,
                            "unknown function '" + std::string(id) + "' at offset " + std::to_string(start), start);
            }
            ++pos_;
            std::vector<NodePtr> args{expr()};
            while (accept(',')) args.push_back(expr());
            expect(')');
            if (static_cast<int>(args.size()) != it->second.second) {
                fail(std::string(id) + " expects " + std::to_string(it->second.second) + " argument(s)", start);
            }
            auto n = make(Op::call, std::move(args));
            std::const_pointer_cast<Node>(n)->func = it->second.first;
            return n;
        }
        if (id == "x") return make(Op::var_x);
        if (id == "y") return make(Op::var_y);
        if (const auto it = params_.find(id); it != params_.end()) {
            auto n = std::make_shared<Node>();
            n->op = Op::param;
            n->name = std::string(id);
            n->value = it->second;
            return n;
        }
        if (id == "pi") {
            auto n = std::make_shared<Node>();
            n->op = Op::number;
            n->value = std::numbers::pi;
            return n;
        }
        throw Error(ErrorKind::unknown_identifier,
                    "unknown identifier '" + std::string(id) + "' at offset " + std::to_string(start), start);
    }
};

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void print(const Node& n, std::string& out) {
    switch (n.op) {
    case Op::number: out += format_number(n.value); return;
    case Op::var_x: out += 'x'; return;
    case Op::var_y: out += 'y'; return;
    case Op::param: out += n.name; return;
    case Op::neg:
        out += "(-";
        print(*n.args[0], out);
        out += ')';
        return;
    case Op::call:
        out += func_name(n.func);
        out += '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            print(*n.args[i], out);
        }
        out += ')';
        return;
    default: break;
    }
    const char* sym = n.op == Op::add ? " + " : n.op == Op::sub ? " - " : n.op == Op::mul ? " * " : n.op == Op::div ? " / " : "^";
    out += '(';
    print(*n.args[0], out);
    out += sym;
    print(*n.args[1], out);
    out += ')';
}

[[noreturn]] inline void domain_fail(const char* what, const Point2& p) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at (" << p.x << ", " << p.y << ")";
    throw Error(ErrorKind::domain_error, os.str());
}

[[noreturn]] inline void kink_fail(const char* what, const Point2& p) {
    std::ostringstream os;
    os.precision(17);
    os << what << " is not differentiable at (" << p.x << ", " << p.y << ")";
    throw Error(ErrorKind::non_differentiable, os.str());
}

inline bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

inline double eval_node(const Node& n, const Point2& p) {
    switch (n.op) {
    case Op::number:
    case Op::param: return n.value;
    case Op::var_x: return p.x;
    case Op::var_y: return p.y;
    case Op::neg: return -eval_node(*n.args[0], p);
    case Op::add: return eval_node(*n.args[0], p) + eval_node(*n.args[1], p);
    case Op::sub: return eval_node(*n.args[0], p) - eval_node(*n.args[1], p);
    case Op::mul: return eval_node(*n.args[0], p) * eval_node(*n.args[1], p);
    case Op::div: {
        const double den = eval_node(*n.args[1], p);
        if (den == 0.0) domain_fail("division by zero", p);
        return eval_node(*n.args[0], p) / den;
    }
    case Op::pow: {
        const double b = eval_node(*n.args[0], p);
        const double e = eval_node(*n.args[1], p);
        if (b < 0.0 && !is_integer(e)) domain_fail("negative base with non-integer exponent", p);
        if (b == 0.0 && e < 0.0) domain_fail("zero to a negative power", p);
        return std::pow(b, e);
    }
    case Op::call: {
        const double a = eval_node(*n.args[0], p);
        switch (n.func) {
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::exp: return std::exp(a);
        case Func::log:
            if (a <= 0.0) domain_fail("log of non-positive value", p);
            return std::log(a);
        case Func::sqrt:
            if (a < 0.0) domain_fail("sqrt of negative value", p);
            return std::sqrt(a);
        case Func::abs: return std::abs(a);
        case Func::min: return std::min(a, eval_node(*n.args[1], p));
        case Func::max: return std::max(a, eval_node(*n.args[1], p));
        }
    }
    }
    return 0.0;
}

inline Dual eval_dual(const Node& n, const Point2& p) {
    switch (n.op) {
    case Op::number:
    case Op::param: return Dual::constant(n.value);
    case Op::var_x: return {p.x, 1.0, 0.0};
    case Op::var_y: return {p.y, 0.0, 1.0};
    case Op::neg: return -eval_dual(*n.args[0], p);
    case Op::add: return eval_dual(*n.args[0], p) + eval_dual(*n.args[1], p);
    case Op::sub: return eval_dual(*n.args[0], p) - eval_dual(*n.args[1], p);
    case Op::mul: return eval_dual(*n.args[0], p) * eval_dual(*n.args[1], p);
    case Op::div: {
        const Dual den = eval_dual(*n.args[1], p);
        if (den.v == 0.0) domain_fail("division by zero", p);
        return eval_dual(*n.args[0], p) / den;
    }
    case Op::pow: {
        const Dual b = eval_dual(*n.args[0], p);
        const Dual e = eval_dual(*n.args[1], p);
        if (b.v < 0.0 && !(e.is_constant() && is_integer(e.v)))
            domain_fail("negative base with non-integer exponent", p);
        if (b.v == 0.0 && e.v < 0.0) domain_fail("zero to a negative power", p);
        const double value = std::pow(b.v, e.v);
        if (e.is_constant()) {
            if (b.v == 0.0 && e.v < 1.0 && e.v != 0.0 && !b.is_constant()) kink_fail("pow", p);
            const double slope = e.v == 0.0 ? 0.0 : e.v * std::pow(b.v, e.v - 1.0);
            return chain(b, value, slope);
        }
        // b^e = exp(e log b), requires b > 0 unless b is a nonzero-free constant
        if (b.v <= 0.0) kink_fail("pow with variable exponent", p);
        const double lb = std::log(b.v);
        const double db = e.v * std::pow(b.v, e.v - 1.0);
        return {value, db * b.dx + value * lb * e.dx, db * b.dy + value * lb * e.dy};
    }
    case Op::call: {
        const Dual a = eval_dual(*n.args[0], p);
        switch (n.func) {
        case Func::sin: return chain(a, std::sin(a.v), std::cos(a.v));
        case Func::cos: return chain(a, std::cos(a.v), -std::sin(a.v));
        case Func::exp: {
            const double ev = std::exp(a.v);
            return chain(a, ev, ev);
        }
        case Func::log:
            if (a.v <= 0.0) domain_fail("log of non-positive value", p);
            return chain(a, std::log(a.v), 1.0 / a.v);
        case Func::sqrt: {
            if (a.v < 0.0) domain_fail("sqrt of negative value", p);
            const double s = std::sqrt(a.v);
            if (s == 0.0) {
                if (a.is_constant()) return Dual::constant(0.0);
                kink_fail("sqrt", p);
            }
            return chain(a, s, 0.5 / s);
        }
        case Func::abs:
            if (a.v == 0.0) {
                if (a.is_constant()) return Dual::constant(0.0);
                kink_fail("abs", p);
            }
            return a.v > 0.0 ? a : -a;
        case Func::min:
        case Func::max: {
            const Dual b = eval_dual(*n.args[1], p);
            if (a.v == b.v) {
                if (a.dx == b.dx && a.dy == b.dy) return a;
                kink_fail(n.func == Func::min ? "min" : "max", p);
            }
            const bool pick_a = (n.func == Func::min) ? (a.v < b.v) : (a.v > b.v);
            return pick_a ? a : b;
        }
        }
    }
    }
    return {};
}

} // namespace detail

/// Parsed scalar expression; immutable and cheap to copy.
class ScalarField {
public:
    ScalarField() : ScalarField(constant(0.0)) {}

    static ScalarField parse(std::string_view src, const Parameters& params = {}) {
        detail::Parser parser(src, params);
        return ScalarField(parser.parse(), std::string(src));
    }
    static ScalarField constant(double c) {
        auto n = std::make_shared<Node>();
        n->op = Op::number;
        n->value = c;
        return ScalarField(n, detail::format_number(c));
    }

    double operator()(const Point2& p) const { return detail::eval_node(*root_, p); }
    double operator()(double x, double y) const { return (*this)({x, y}); }
    /// Value together with the exact gradient.
    Dual gradient(const Point2& p) const { return detail::eval_dual(*root_, p); }

    const Node& root() const { return *root_; }
    const std::string& source() const { return source_; }
    /// Canonical fully parenthesized form; parses back to an identical tree
    /// given the same parameters.
    std::string to_string() const {
        std::string out;
        detail::print(*root_, out);
        return out;
    }

    friend bool operator==(const ScalarField& a, const ScalarField& b) { return same_tree(*a.root_, *b.root_); }

private:
    ScalarField(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    NodePtr root_;
    std::string source_;
};

inline ScalarField parse_field(std::string_view src, const Parameters& params = {}) {
    return ScalarField::parse(src, params);
}

} // namespace advect
