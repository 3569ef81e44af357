#include "qumin/value.hpp"

#include <charconv>
#include <cmath>

namespace qumin {

namespace {

std::string shortest_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

}  // namespace

std::string value_kind_name(const Value& v) {
    struct V {
        std::string operator()(const Unit&) const { return "unit"; }
        std::string operator()(std::int64_t) const { return "integer"; }
        std::string operator()(double) const { return "float"; }
        std::string operator()(const Complex&) const { return "complex"; }
        std::string operator()(bool) const { return "boolean"; }
        std::string operator()(const std::string&) const { return "string"; }
        std::string operator()(const SeqPtr&) const { return "sequence"; }
        std::string operator()(const ClosurePtr&) const { return "function"; }
        std::string operator()(const BuiltinPtr&) const { return "builtin"; }
        std::string operator()(const PartialBuiltinPtr&) const { return "builtin"; }
    };
    return std::visit(V{}, v.data);
}

std::string to_display_string(const Value& v) {
    struct V {
        std::string operator()(const Unit&) const { return "()"; }
        std::string operator()(std::int64_t n) const { return std::to_string(n); }
        std::string operator()(double d) const { return shortest_double(d); }
        std::string operator()(const Complex& c) const {
            double re = c.real() == 0.0 ? 0.0 : c.real();  // fold -0 into 0
            double im = c.imag() == 0.0 ? 0.0 : c.imag();
            std::string out = shortest_double(re);
            if (im >= 0 || std::isnan(im)) out += '+';
            out += shortest_double(im);
            out += 'i';
            return out;
        }
        std::string operator()(bool b) const { return b ? "#t" : "#f"; }
        std::string operator()(const std::string& s) const { return '"' + s + '"'; }
        std::string operator()(const SeqPtr& seq) const {
            std::string out = "[";
            for (std::size_t i = 0; i < seq->size(); ++i) {
                if (i) out += ' ';
                out += to_display_string((*seq)[i]);
            }
            out += ']';
            return out;
        }
        std::string operator()(const ClosurePtr& c) const {
            std::string out = "<lambda(";
            for (std::size_t i = 0; i < c->params.size(); ++i) {
                if (i) out += ", ";
                out += c->params[i];
            }
            out += ")>";
            return out;
        }
        std::string operator()(const BuiltinPtr& b) const { return "<builtin " + b->name + ">"; }
        std::string operator()(const PartialBuiltinPtr& p) const {
            return "<builtin " + p->fn->name + ">";
        }
    };
    return std::visit(V{}, v.data);
}

Complex as_complex(const Value& v) {
    if (const auto* i = v.get<std::int64_t>()) return Complex(static_cast<double>(*i), 0);
    if (const auto* d = v.get<double>()) return Complex(*d, 0);
    return *v.get<Complex>();
}

bool values_equal(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) {
        const auto* ia = a.get<std::int64_t>();
        const auto* ib = b.get<std::int64_t>();
        if (ia && ib) return *ia == *ib;
        return std::abs(as_complex(a) - as_complex(b)) <= 1e-12;
    }
    if (a.data.index() != b.data.index()) return false;
    if (a.get<Unit>()) return true;
    if (const auto* ba = a.get<bool>()) return *ba == *b.get<bool>();
    if (const auto* sa = a.get<std::string>()) return *sa == *b.get<std::string>();
    if (const auto* qa = a.seq()) {
        const auto& xs = **qa;
        const auto& ys = **b.seq();
        if (xs.size() != ys.size()) return false;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!values_equal(xs[i], ys[i])) return false;
        return true;
    }
    return false;  // functions never compare equal
}

}  // namespace qumin
