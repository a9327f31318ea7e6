#include "malab/expression.hpp"

#include "malab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace malab {

struct Expression::Node {
    enum class Op { number, variable, add, sub, mul, div, pow, neg, call } op;
    double number = 0.0;
    std::string name;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, std::string name = {}, double num = 0.0)
{
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->args = std::move(args);
    n->name = std::move(name);
    n->number = num;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse()
    {
        NodePtr n = sum();
        skip();
        if (pos_ != s_.size())
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw DomainError("expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum()
    {
        NodePtr lhs = product();
        while (true) {
            if (eat('+'))
                lhs = make(Op::add, {lhs, product()});
            else if (eat('-'))
                lhs = make(Op::sub, {lhs, product()});
            else
                return lhs;
        }
    }

    NodePtr product()
    {
        NodePtr lhs = unary();
        while (true) {
            if (eat('*'))
                lhs = make(Op::mul, {lhs, unary()});
            else if (eat('/'))
                lhs = make(Op::div, {lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary()
    {
        if (eat('-'))
            return make(Op::neg, {unary()});
        if (eat('+'))
            return unary();
        return power();
    }

    NodePtr power()
    {
        NodePtr base = atom();
        if (eat('^'))
            return make(Op::pow, {base, unary()});
        return base;
    }

    NodePtr atom()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end");
        if (eat('(')) {
            NodePtr n = sum();
            if (!eat(')'))
                fail("missing ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return make(Op::number, {}, {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = pos_;
            while (pos_ < s_.size()
                   && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string id = s_.substr(b, pos_ - b);
            if (eat('(')) {
                static const char* known[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs"};
                if (std::find(std::begin(known), std::end(known), id) == std::end(known))
                    fail("unknown function " + id);
                NodePtr arg = sum();
                if (!eat(')'))
                    fail("missing ')'");
                return make(Op::call, {arg}, id);
            }
            if (id == "pi")
                return make(Op::number, {}, {}, std::numbers::pi);
            return make(Op::variable, {}, id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, const std::map<std::string, double>& vars)
{
    switch (n.op) {
    case Op::number:
        return n.number;
    case Op::variable: {
        auto it = vars.find(n.name);
        if (it == vars.end())
            throw DomainError("expression variable '" + n.name + "' is not defined");
        return it->second;
    }
    case Op::add:
        return eval(*n.args[0], vars) + eval(*n.args[1], vars);
    case Op::sub:
        return eval(*n.args[0], vars) - eval(*n.args[1], vars);
    case Op::mul:
        return eval(*n.args[0], vars) * eval(*n.args[1], vars);
    case Op::div:
        return eval(*n.args[0], vars) / eval(*n.args[1], vars);
    case Op::pow:
        return std::pow(eval(*n.args[0], vars), eval(*n.args[1], vars));
    case Op::neg:
        return -eval(*n.args[0], vars);
    case Op::call: {
        const double a = eval(*n.args[0], vars);
        if (n.name == "sin") return std::sin(a);
        if (n.name == "cos") return std::cos(a);
        if (n.name == "tan") return std::tan(a);
        if (n.name == "exp") return std::exp(a);
        if (n.name == "log") return std::log(a);
        if (n.name == "sqrt") return std::sqrt(a);
        return std::abs(a);
    }
    }
    return 0.0;
}

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}

double Expression::operator()(const std::map<std::string, double>& vars) const
{
    return eval(*root_, vars);
}

}  // namespace malab
