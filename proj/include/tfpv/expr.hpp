#ifndef TFPV_EXPR_HPP
#define TFPV_EXPR_HPP

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfpv {

// Small arithmetic expression evaluator for manifold-chart graphs and box
// bounds, e.g. "k1*e0*S/(k1*S + km1)".  Supports + - * / ^, parentheses,
// unary minus, numeric literals, identifiers, and sqrt().
class Expr {
  public:
    Expr() = default;

    static Expr parse(const std::string& text) {
        Parser p{text, 0};
        Expr e;
        e.root_ = p.parse_sum();
        p.skip_ws();
        if (p.pos != text.size())
            throw std::runtime_error("expression parse error at '" + text.substr(p.pos) + "'");
        e.text_ = text;
        return e;
    }

    bool empty() const { return root_ == nullptr; }
    const std::string& text() const { return text_; }

    using Lookup = std::function<double(const std::string&)>;

    double eval(const Lookup& lookup) const {
        if (!root_) throw std::runtime_error("evaluating empty expression");
        return eval_node(*root_, lookup);
    }

    double eval(const std::map<std::string, double>& env) const {
        return eval([&](const std::string& name) {
            auto it = env.find(name);
            if (it == env.end()) throw std::runtime_error("unknown identifier '" + name + "'");
            return it->second;
        });
    }

  private:
    struct Node {
        enum Kind { Num, Ident, Add, Sub, Mul, Div, Pow, Neg, Sqrt } kind;
        double value = 0.0;
        std::string name;
        std::shared_ptr<Node> a, b;
    };
    using NodePtr = std::shared_ptr<Node>;

    struct Parser {
        const std::string& s;
        size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) { ++pos; return true; }
            return false;
        }
        NodePtr parse_sum() {
            NodePtr left = parse_product();
            for (;;) {
                if (eat('+')) left = bin(Node::Add, left, parse_product());
                else if (eat('-')) left = bin(Node::Sub, left, parse_product());
                else return left;
            }
        }
        NodePtr parse_product() {
            NodePtr left = parse_unary();
            for (;;) {
                if (eat('*')) left = bin(Node::Mul, left, parse_unary());
                else if (eat('/')) left = bin(Node::Div, left, parse_unary());
                else return left;
            }
        }
        NodePtr parse_unary() {
            if (eat('-')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Neg;
                n->a = parse_unary();
                return n;
            }
            return parse_power();
        }
        NodePtr parse_power() {
            NodePtr base = parse_atom();
            if (eat('^')) return bin(Node::Pow, base, parse_unary());
            return base;
        }
        NodePtr parse_atom() {
            skip_ws();
            if (pos >= s.size()) throw std::runtime_error("unexpected end of expression");
            char c = s[pos];
            if (c == '(') {
                ++pos;
                NodePtr e = parse_sum();
                if (!eat(')')) throw std::runtime_error("missing ')'");
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                size_t used = 0;
                double v = std::stod(s.substr(pos), &used);
                pos += used;
                auto n = std::make_shared<Node>();
                n->kind = Node::Num;
                n->value = v;
                return n;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t start = pos;
                while (pos < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                    ++pos;
                std::string name = s.substr(start, pos - start);
                if (name == "sqrt") {
                    if (!eat('(')) throw std::runtime_error("sqrt requires '('");
                    auto n = std::make_shared<Node>();
                    n->kind = Node::Sqrt;
                    n->a = parse_sum();
                    if (!eat(')')) throw std::runtime_error("missing ')'");
                    return n;
                }
                auto n = std::make_shared<Node>();
                n->kind = Node::Ident;
                n->name = name;
                return n;
            }
            throw std::runtime_error(std::string("unexpected character '") + c + "'");
        }
        static NodePtr bin(Node::Kind k, NodePtr a, NodePtr b) {
            auto n = std::make_shared<Node>();
            n->kind = k;
            n->a = std::move(a);
            n->b = std::move(b);
            return n;
        }
    };

    static double eval_node(const Node& n, const Lookup& lookup) {
        switch (n.kind) {
            case Node::Num: return n.value;
            case Node::Ident: return lookup(n.name);
            case Node::Add: return eval_node(*n.a, lookup) + eval_node(*n.b, lookup);
            case Node::Sub: return eval_node(*n.a, lookup) - eval_node(*n.b, lookup);
            case Node::Mul: return eval_node(*n.a, lookup) * eval_node(*n.b, lookup);
            case Node::Div: return eval_node(*n.a, lookup) / eval_node(*n.b, lookup);
            case Node::Pow: return std::pow(eval_node(*n.a, lookup), eval_node(*n.b, lookup));
            case Node::Neg: return -eval_node(*n.a, lookup);
            case Node::Sqrt: return std::sqrt(eval_node(*n.a, lookup));
        }
        throw std::logic_error("unreachable");
    }

    NodePtr root_;
    std::string text_;
};

}  // namespace tfpv

#endif
