#pragma once

#include <map>
#include <memory>
#include <string>

namespace malab {

/// Small arithmetic expression used for boundary data in problem files.
///
/// Grammar: numbers, identifiers, + - * / ^ (right associative), unary minus,
/// parentheses and the functions sin cos tan exp log sqrt abs. `pi` is built
/// in; every other identifier is looked up in the variable map at evaluation.
class Expression {
public:
    explicit Expression(const std::string& text);

    double operator()(const std::map<std::string, double>& vars) const;
    const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace malab
