#include "qumin/ast.hpp"

#include <charconv>
#include <sstream>

namespace qumin {

namespace {

// Shortest decimal form that reparses to the same double, always containing
// a '.' so it stays inside the floatLit / complexLit token grammar.
std::string format_decimal(double v, bool force_point) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, end);
    if (out.find('e') != std::string::npos || out.find('E') != std::string::npos) {
        // Fall back to a fixed expansion; literals this extreme never come
        // from source text, only from synthetic trees.
        std::ostringstream ss;
        ss.precision(17);
        ss << std::fixed << v;
        out = ss.str();
        while (out.size() > 1 && out.back() == '0' && out[out.size() - 2] != '.')
            out.pop_back();
    }
    if (force_point && out.find('.') == std::string::npos) out += ".0";
    return out;
}

void print_node(const SyntaxNode& node, std::string& out);

void print_body(const NodeList& body, std::string& out) {
    out += "{ ";
    for (const auto& e : body) {
        print_node(*e, out);
        out += ' ';
    }
    out += '}';
}

void print_args(const NodeList& args, std::string& out) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        print_node(*args[i], out);
    }
    out += ')';
}

struct Printer {
    std::string& out;

    void operator()(const SyntaxNode::Load& n) {
        out += n.quantum ? "--qload " : "--load ";
        out += n.name;
    }
    void operator()(const SyntaxNode::Assignment& n) {
        out += "let ";
        out += n.name;
        out += " = ";
        print_node(*n.expr, out);
    }
    void operator()(const SyntaxNode::Lambda& n) {
        out += "lambda(";
        for (std::size_t i = 0; i < n.params.size(); ++i) {
            if (i) out += ", ";
            out += n.params[i].name;
            if (n.params[i].annotation) {
                out += " : ";
                out += annotation_to_source(*n.params[i].annotation);
            }
        }
        out += ")";
        print_body(n.body, out);
        if (n.immediate_args) print_args(*n.immediate_args, out);
    }
    void operator()(const SyntaxNode::Call& n) {
        print_node(*n.callee, out);
        print_args(n.args, out);
    }
    void operator()(const SyntaxNode::InfixCall& n) {
        out += '(';
        print_node(*n.lhs, out);
        out += ' ';
        out += n.op_name;
        out += ' ';
        print_node(*n.rhs, out);
        out += ')';
    }
    void operator()(const SyntaxNode::PrefixCall& n) {
        out += '(';
        out += n.op_name;
        out += ' ';
        print_node(*n.arg, out);
        out += ')';
    }
    void operator()(const SyntaxNode::Composition& n) {
        for (std::size_t i = 0; i < n.names.size(); ++i) {
            if (i) out += " . ";
            out += n.names[i];
        }
        print_args(n.args, out);
    }
    void operator()(const SyntaxNode::IfElse& n) {
        out += "if(";
        print_node(*n.cond, out);
        out += ")";
        print_body(n.then_body, out);
        out += " else ";
        print_body(n.else_body, out);
    }
    void operator()(const SyntaxNode::ListLit& n) {
        out += '[';
        for (std::size_t i = 0; i < n.elems.size(); ++i) {
            if (i) out += ' ';
            print_node(*n.elems[i], out);
        }
        out += ']';
    }
    void operator()(const SyntaxNode::IntLit& n) { out += std::to_string(n.value); }
    void operator()(const SyntaxNode::FloatLit& n) {
        out += format_decimal(n.value, /*force_point=*/true);
    }
    void operator()(const SyntaxNode::ComplexLit& n) {
        out += format_decimal(n.re, /*force_point=*/false);
        if (n.im >= 0) out += '+';
        out += format_decimal(n.im, /*force_point=*/false);
        out += 'i';
    }
    void operator()(const SyntaxNode::BoolLit& n) { out += n.value ? "#t" : "#f"; }
    void operator()(const SyntaxNode::StringLit& n) {
        out += '"';
        out += n.value;
        out += '"';
    }
    void operator()(const SyntaxNode::Name& n) { out += n.text; }
};

void print_node(const SyntaxNode& node, std::string& out) {
    std::visit(Printer{out}, node.data);
}

}  // namespace

std::string annotation_to_source(const TypeAnnotation& ann) {
    struct V {
        std::string operator()(const TypeAnnotation::Qubit&) const { return "qubit"; }
        std::string operator()(const TypeAnnotation::Int&) const { return "int"; }
        std::string operator()(const TypeAnnotation::List&) const { return "list"; }
        std::string operator()(const TypeAnnotation::Tensor& t) const {
            return wrap(*t.lhs) + " * " + wrap(*t.rhs);
        }
        std::string operator()(const TypeAnnotation::Fn& f) const {
            return wrap(*f.domain) + " > " + annotation_to_source(*f.codomain);
        }
        std::string operator()(const TypeAnnotation::Operator& o) const {
            return "operator[" + std::to_string(o.qubits) + "]";
        }
        std::string operator()(const TypeAnnotation::Bang& b) const {
            return "!{" + annotation_to_source(*b.inner) + "}";
        }
        // The surface grammar has no parentheses; every shape the parser can
        // produce (right-nested arrows, left-nested tensors, bang-wrapped
        // atoms) prints flat and reparses to the same tree.
        static std::string wrap(const TypeAnnotation& t) {
            return annotation_to_source(t);
        }
    };
    return std::visit(V{}, ann.data);
}

bool annotations_equal(const TypeAnnotation& a, const TypeAnnotation& b) {
    if (a.data.index() != b.data.index()) return false;
    struct V {
        const TypeAnnotation& other;
        bool operator()(const TypeAnnotation::Qubit&) const { return true; }
        bool operator()(const TypeAnnotation::Int&) const { return true; }
        bool operator()(const TypeAnnotation::List&) const { return true; }
        bool operator()(const TypeAnnotation::Tensor& t) const {
            const auto& o = std::get<TypeAnnotation::Tensor>(other.data);
            return annotations_equal(*t.lhs, *o.lhs) && annotations_equal(*t.rhs, *o.rhs);
        }
        bool operator()(const TypeAnnotation::Fn& f) const {
            const auto& o = std::get<TypeAnnotation::Fn>(other.data);
            return annotations_equal(*f.domain, *o.domain) &&
                   annotations_equal(*f.codomain, *o.codomain);
        }
        bool operator()(const TypeAnnotation::Operator& op) const {
            return op.qubits == std::get<TypeAnnotation::Operator>(other.data).qubits;
        }
        bool operator()(const TypeAnnotation::Bang& b) const {
            return annotations_equal(*b.inner,
                                     *std::get<TypeAnnotation::Bang>(other.data).inner);
        }
    };
    return std::visit(V{b}, a.data);
}

bool node_lists_equal(const NodeList& a, const NodeList& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!nodes_equal(*a[i], *b[i])) return false;
    return true;
}

bool nodes_equal(const SyntaxNode& a, const SyntaxNode& b) {
    if (a.data.index() != b.data.index()) return false;
    struct V {
        const SyntaxNode& other;
        bool operator()(const SyntaxNode::Load& n) const {
            const auto& o = std::get<SyntaxNode::Load>(other.data);
            return n.quantum == o.quantum && n.name == o.name;
        }
        bool operator()(const SyntaxNode::Assignment& n) const {
            const auto& o = std::get<SyntaxNode::Assignment>(other.data);
            return n.name == o.name && nodes_equal(*n.expr, *o.expr);
        }
        bool operator()(const SyntaxNode::Lambda& n) const {
            const auto& o = std::get<SyntaxNode::Lambda>(other.data);
            if (n.params.size() != o.params.size()) return false;
            for (std::size_t i = 0; i < n.params.size(); ++i) {
                if (n.params[i].name != o.params[i].name) return false;
                bool ha = n.params[i].annotation != nullptr;
                bool hb = o.params[i].annotation != nullptr;
                if (ha != hb) return false;
                if (ha && !annotations_equal(*n.params[i].annotation, *o.params[i].annotation))
                    return false;
            }
            if (!node_lists_equal(n.body, o.body)) return false;
            if (n.immediate_args.has_value() != o.immediate_args.has_value()) return false;
            return !n.immediate_args || node_lists_equal(*n.immediate_args, *o.immediate_args);
        }
        bool operator()(const SyntaxNode::Call& n) const {
            const auto& o = std::get<SyntaxNode::Call>(other.data);
            return nodes_equal(*n.callee, *o.callee) && node_lists_equal(n.args, o.args);
        }
        bool operator()(const SyntaxNode::InfixCall& n) const {
            const auto& o = std::get<SyntaxNode::InfixCall>(other.data);
            return n.op_name == o.op_name && nodes_equal(*n.lhs, *o.lhs) &&
                   nodes_equal(*n.rhs, *o.rhs);
        }
        bool operator()(const SyntaxNode::PrefixCall& n) const {
            const auto& o = std::get<SyntaxNode::PrefixCall>(other.data);
            return n.op_name == o.op_name && nodes_equal(*n.arg, *o.arg);
        }
        bool operator()(const SyntaxNode::Composition& n) const {
            const auto& o = std::get<SyntaxNode::Composition>(other.data);
            return n.names == o.names && node_lists_equal(n.args, o.args);
        }
        bool operator()(const SyntaxNode::IfElse& n) const {
            const auto& o = std::get<SyntaxNode::IfElse>(other.data);
            return nodes_equal(*n.cond, *o.cond) &&
                   node_lists_equal(n.then_body, o.then_body) &&
                   node_lists_equal(n.else_body, o.else_body);
        }
        bool operator()(const SyntaxNode::ListLit& n) const {
            return node_lists_equal(n.elems, std::get<SyntaxNode::ListLit>(other.data).elems);
        }
        bool operator()(const SyntaxNode::IntLit& n) const {
            return n.value == std::get<SyntaxNode::IntLit>(other.data).value;
        }
        bool operator()(const SyntaxNode::FloatLit& n) const {
            return n.value == std::get<SyntaxNode::FloatLit>(other.data).value;
        }
        bool operator()(const SyntaxNode::ComplexLit& n) const {
            const auto& o = std::get<SyntaxNode::ComplexLit>(other.data);
            return n.re == o.re && n.im == o.im;
        }
        bool operator()(const SyntaxNode::BoolLit& n) const {
            return n.value == std::get<SyntaxNode::BoolLit>(other.data).value;
        }
        bool operator()(const SyntaxNode::StringLit& n) const {
            return n.value == std::get<SyntaxNode::StringLit>(other.data).value;
        }
        bool operator()(const SyntaxNode::Name& n) const {
            return n.text == std::get<SyntaxNode::Name>(other.data).text;
        }
    };
    return std::visit(V{b}, a.data);
}

std::string to_source(const SyntaxNode& node) {
    std::string out;
    print_node(node, out);
    return out;
}

std::string to_source(const NodeList& program) {
    std::string out;
    for (const auto& n : program) {
        out += to_source(*n);
        out += '\n';
    }
    return out;
}

}  // namespace qumin
