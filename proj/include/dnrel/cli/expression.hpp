#pragma once

// Small arithmetic expressions over complex numbers: + - * / ^, parentheses,
// sin cos tan exp log sqrt abs, constants pi e i, variables x y, and
// imaginary literals such as 3i. Used for potentials V(x, y) and λ values.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dnrel::cli {

class ExpressionError : public std::invalid_argument {
public:
    ExpressionError(const std::string& what, std::size_t offset)
        : std::invalid_argument(what), offset_(offset)
    {
    }
    /// 0-based character offset inside the expression text.
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class Expression {
public:
    using Value = std::complex<double>;

    /// Parses once; evaluation only walks the token string again, which is
    /// fast enough for one call per grid node.
    explicit Expression(std::string text) : text_(std::move(text))
    {
        Parser p{text_, {}, 0};
        p.parse_all();
    }

    Value eval(double x = 0.0, double y = 0.0) const
    {
        Parser p{text_, {{"x", x}, {"y", y}}, 0};
        return p.parse_all();
    }

    bool uses_variables() const
    {
        for (std::size_t i = 0; i < text_.size(); ++i) {
            const char c = text_[i];
            if ((c == 'x' || c == 'y') && (i == 0 || !std::isalpha(static_cast<unsigned char>(text_[i - 1]))) &&
                (i + 1 == text_.size() || !std::isalnum(static_cast<unsigned char>(text_[i + 1]))))
                return true;
        }
        return false;
    }

    const std::string& text() const { return text_; }

private:
    struct Parser {
        const std::string& s;
        std::map<std::string, Value> vars;
        std::size_t pos;

        Value parse_all()
        {
            const Value v = sum();
            skip();
            if (pos != s.size()) throw ExpressionError("unexpected '" + std::string(1, s[pos]) + "'", pos);
            return v;
        }

        void skip()
        {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }

        bool eat(char c)
        {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        Value sum()
        {
            Value v = product();
            for (;;) {
                if (eat('+'))
                    v += product();
                else if (eat('-'))
                    v -= product();
                else
                    return v;
            }
        }

        Value product()
        {
            Value v = unary();
            for (;;) {
                if (eat('*')) {
                    v *= unary();
                } else if (eat('/')) {
                    const std::size_t at = pos;
                    const Value d = unary();
                    if (d == Value(0.0)) throw ExpressionError("division by zero", at);
                    v /= d;
                } else {
                    return v;
                }
            }
        }

        Value unary()
        {
            if (eat('-')) return -unary();
            if (eat('+')) return unary();
            return power();
        }

        Value power()
        {
            const Value base = primary();
            if (eat('^')) {
                const Value e = unary();
                if (e.imag() == 0.0 && base.imag() == 0.0 && (base.real() >= 0.0 || e.real() == std::round(e.real())))
                    return std::pow(base.real(), e.real());
                return std::pow(base, e);
            }
            return base;
        }

        Value primary()
        {
            skip();
            if (pos >= s.size()) throw ExpressionError("expression ends early", pos);
            const char c = s[pos];
            if (c == '(') {
                ++pos;
                const Value v = sum();
                if (!eat(')')) throw ExpressionError("missing ')'", pos);
                return v;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const char* begin = s.c_str() + pos;
                char* end = nullptr;
                const double v = std::strtod(begin, &end);
                if (end == begin) throw ExpressionError("malformed number", pos);
                pos += static_cast<std::size_t>(end - begin);
                // Imaginary literal: 3i, 2.5i.
                if (pos < s.size() && s[pos] == 'i' &&
                    (pos + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 1])))) {
                    ++pos;
                    return {0.0, v};
                }
                return v;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::size_t start = pos;
                while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
                const std::string name = s.substr(start, pos - start);
                if (eat('(')) {
                    const Value a = sum();
                    if (!eat(')')) throw ExpressionError("missing ')'", pos);
                    return call(name, a, start);
                }
                if (name == "pi") return std::numbers::pi;
                if (name == "e") return std::numbers::e;
                if (name == "i") return {0.0, 1.0};
                if (auto it = vars.find(name); it != vars.end()) return it->second;
                if (name == "x" || name == "y") return 0.0;  // validation pass
                throw ExpressionError("unknown name '" + name + "'", start);
            }
            throw ExpressionError("unexpected '" + std::string(1, c) + "'", pos);
        }

        static Value call(const std::string& f, Value a, std::size_t at)
        {
            if (f == "sin") return std::sin(a);
            if (f == "cos") return std::cos(a);
            if (f == "tan") return std::tan(a);
            if (f == "exp") return std::exp(a);
            if (f == "log") return std::log(a);
            if (f == "sqrt") return std::sqrt(a);
            if (f == "abs") return std::abs(a);
            throw ExpressionError("unknown function '" + f + "'", at);
        }
    };

    std::string text_;
};

}  // namespace dnrel::cli
