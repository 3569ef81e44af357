#include "qumin/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <set>
#include <unordered_set>

namespace qumin {

namespace {

// Multi-byte name characters admitted by the name rule.
constexpr std::string_view kTensorGlyph = "\xe2\x8a\x97";  // U+2297 (circled times)
constexpr std::string_view kDotGlyph = "\xc2\xb7";         // U+00B7 (middle dot)

bool is_ascii_name_char(char c) {
    switch (c) {
        case '+': case '-': case '/': case '*': case '=': case '?':
            return true;
        default:
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
}

bool is_lvalue_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '?';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodeList program() {
        NodeList nodes;
        skip_ws();
        while (!at_end()) {
            NodePtr e = expr();
            if (!e) raise();
            nodes.push_back(std::move(e));
            skip_ws();
        }
        return nodes;
    }

    NodePtr single_expr() {
        skip_ws();
        NodePtr e = expr();
        if (!e) raise();
        skip_ws();
        if (!at_end()) throw TrailingInput({pos_, src_.size()});
        return e;
    }

    AnnotationPtr type_annotation_only() {
        skip_ws();
        AnnotationPtr t = type_expr();
        if (!t) raise();
        skip_ws();
        if (!at_end()) throw TrailingInput({pos_, src_.size()});
        return t;
    }

    AnnotationPtr type_expr() {
        std::size_t start = pos_;
        AnnotationPtr lhs = type_tensor();
        if (!lhs) return nullptr;
        skip_ws();
        if (match_literal(">")) {
            skip_ws();
            AnnotationPtr rhs = type_expr();  // > is right-associated
            if (!rhs) raise();
            return make_ann(TypeAnnotation::Fn{lhs, rhs}, {start, rhs->span.end});
        }
        return lhs;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t farthest_ = 0;
    std::set<std::string> expected_;

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void note(std::size_t at, std::string what) {
        if (at > farthest_) {
            farthest_ = at;
            expected_.clear();
        }
        if (at == farthest_) expected_.insert(std::move(what));
    }

    [[noreturn]] void raise() {
        std::size_t at = farthest_;
        if (at > src_.size()) at = src_.size();
        std::string msg = "expected ";
        bool first = true;
        for (const auto& e : expected_) {
            if (!first) msg += " or ";
            msg += e;
            first = false;
        }
        if (first) msg = "unparseable input";
        throw ParseError(std::move(msg), {at, at < src_.size() ? at + 1 : at}, expected_);
    }

    void skip_ws() {
        while (!at_end()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (!at_end() && src_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    bool match_literal(std::string_view lit) {
        if (src_.substr(pos_, lit.size()) == lit) {
            pos_ += lit.size();
            return true;
        }
        note(pos_, "'" + std::string(lit) + "'");
        return false;
    }

    bool next_is_name_char() const {
        if (at_end()) return false;
        if (is_ascii_name_char(src_[pos_])) return true;
        return src_.substr(pos_, kTensorGlyph.size()) == kTensorGlyph ||
               src_.substr(pos_, kDotGlyph.size()) == kDotGlyph;
    }

    // A keyword only matches when it is not a prefix of a longer name token.
    bool match_keyword(std::string_view kw) {
        std::size_t save = pos_;
        if (!match_literal(kw)) return false;
        if (next_is_name_char()) {
            pos_ = save;
            note(save, "'" + std::string(kw) + "'");
            return false;
        }
        return true;
    }

    std::optional<std::string> name_token() {
        std::size_t start = pos_;
        std::string out;
        while (!at_end()) {
            if (is_ascii_name_char(src_[pos_])) {
                out += src_[pos_++];
            } else if (src_.substr(pos_, kTensorGlyph.size()) == kTensorGlyph) {
                out += kTensorGlyph;
                pos_ += kTensorGlyph.size();
            } else if (src_.substr(pos_, kDotGlyph.size()) == kDotGlyph) {
                out += kDotGlyph;
                pos_ += kDotGlyph.size();
            } else {
                break;
            }
        }
        if (out.empty()) {
            note(start, "a name");
            return std::nullopt;
        }
        return out;
    }

    std::optional<std::string> lvalue_token() {
        std::size_t start = pos_;
        std::string out;
        while (!at_end() && is_lvalue_char(src_[pos_])) out += src_[pos_++];
        if (out.empty()) {
            note(start, "an identifier");
            return std::nullopt;
        }
        return out;
    }

    std::optional<std::string> numeral() {
        std::string out;
        while (!at_end() && is_digit(src_[pos_])) out += src_[pos_++];
        if (out.empty()) {
            note(pos_, "a digit");
            return std::nullopt;
        }
        return out;
    }

    static NodePtr make(SyntaxNode::Data data, Span span) {
        return std::make_shared<SyntaxNode>(SyntaxNode{std::move(data), span});
    }
    static AnnotationPtr make_ann(TypeAnnotation::Data data, Span span) {
        return std::make_shared<TypeAnnotation>(TypeAnnotation{std::move(data), span});
    }

    // expr <- _ (load / func / ifelse / call / comp / infixCall / prefixCall /
    //            list / assignment / boolLit / stringLit / complexLit /
    //            floatLit / intLit / name) _
    NodePtr expr() {
        skip_ws();
        NodePtr n;
        if ((n = load())) return finish(n);
        if ((n = func())) return finish(n);
        if ((n = ifelse())) return finish(n);
        if ((n = call())) return finish(n);
        if ((n = comp())) return finish(n);
        if ((n = infix_call())) return finish(n);
        if ((n = prefix_call())) return finish(n);
        if ((n = list_lit())) return finish(n);
        if ((n = assignment())) return finish(n);
        if ((n = bool_lit())) return finish(n);
        if ((n = string_lit())) return finish(n);
        if ((n = complex_lit())) return finish(n);
        if ((n = float_lit())) return finish(n);
        if ((n = int_lit())) return finish(n);
        if ((n = name_expr())) return finish(n);
        return nullptr;
    }

    NodePtr finish(NodePtr n) {
        skip_ws();
        return n;
    }

    NodePtr load() {
        std::size_t start = pos_;
        bool quantum = false;
        if (match_literal("--qload")) {
            quantum = true;
        } else {
            pos_ = start;
            if (!match_literal("--load")) {
                pos_ = start;
                return nullptr;
            }
        }
        skip_ws();
        auto name = lvalue_token();
        if (!name) raise();
        return make(SyntaxNode::Load{quantum, *name}, {start, pos_});
    }

    // func <- "lambda" "(" param (sep param)* ")" "{" expr* "}" ("(" args ")")?
    // where param <- lvalue (":" typeExpr)?  -- the annotation extension
    NodePtr func() {
        std::size_t start = pos_;
        if (!match_keyword("lambda")) {
            pos_ = start;
            return nullptr;
        }
        skip_ws();
        if (!match_literal("(")) {
            pos_ = start;
            return nullptr;
        }
        std::vector<Param> params;
        std::unordered_set<std::string> seen;
        while (true) {
            skip_ws();
            std::size_t pstart = pos_;
            auto pname = lvalue_token();
            if (!pname) raise();
            AnnotationPtr ann;
            skip_ws();
            if (match_literal(":")) {
                skip_ws();
                ann = type_expr();
                if (!ann) raise();
            }
            if (!seen.insert(*pname).second) {
                throw ParseError("duplicate parameter name '" + *pname + "'",
                                 {pstart, pos_});
            }
            params.push_back(Param{*pname, ann, {pstart, pos_}});
            skip_ws();
            if (match_literal(",")) continue;
            break;
        }
        if (!match_literal(")")) raise();
        skip_ws();
        if (!match_literal("{")) raise();
        NodeList body = expr_seq_until('}');
        if (!match_literal("}")) raise();
        std::optional<NodeList> immediate;
        std::size_t after_body = pos_;
        skip_ws();
        if (match_literal("(")) {
            immediate = arg_list(/*allow_empty=*/true);
            if (!match_literal(")")) raise();
        } else {
            pos_ = after_body;
        }
        return make(SyntaxNode::Lambda{std::move(params), std::move(body), std::move(immediate)},
                    {start, pos_});
    }

    // ifelse <- "if" _ "(" expr ")" "{" expr* "}" _ "else" _ "{" expr* "}"
    NodePtr ifelse() {
        std::size_t start = pos_;
        if (!match_keyword("if")) {
            pos_ = start;
            return nullptr;
        }
        skip_ws();
        if (!match_literal("(")) {
            pos_ = start;
            return nullptr;
        }
        NodePtr cond = expr();
        if (!cond) raise();
        if (!match_literal(")")) raise();
        skip_ws();
        if (!match_literal("{")) raise();
        NodeList then_body = expr_seq_until('}');
        if (!match_literal("}")) raise();
        skip_ws();
        if (!match_keyword("else")) raise();
        skip_ws();
        if (!match_literal("{")) raise();
        NodeList else_body = expr_seq_until('}');
        if (!match_literal("}")) raise();
        return make(SyntaxNode::IfElse{cond, std::move(then_body), std::move(else_body)},
                    {start, pos_});
    }

    // call <- name "(" expr (sep expr)* ")"
    NodePtr call() {
        std::size_t start = pos_;
        auto callee = name_token();
        if (!callee) {
            pos_ = start;
            return nullptr;
        }
        std::size_t callee_end = pos_;
        if (!match_literal("(")) {
            pos_ = start;
            return nullptr;
        }
        NodeList args = arg_list(/*allow_empty=*/false);
        if (args.empty() || !match_literal(")")) {
            pos_ = start;
            return nullptr;
        }
        NodePtr callee_node = make(SyntaxNode::Name{*callee}, {start, callee_end});
        return make(SyntaxNode::Call{callee_node, std::move(args)}, {start, pos_});
    }

    // comp <- name (compsep name)+ _ "(" expr* ")"
    NodePtr comp() {
        std::size_t start = pos_;
        auto first = name_token();
        if (!first) {
            pos_ = start;
            return nullptr;
        }
        std::vector<std::string> names{*first};
        while (true) {
            std::size_t save = pos_;
            skip_ws();
            if (!match_literal(".")) {
                pos_ = save;
                break;
            }
            skip_ws();
            auto next = name_token();
            if (!next) {
                pos_ = save;
                break;
            }
            names.push_back(*next);
        }
        if (names.size() < 2) {
            pos_ = start;
            return nullptr;
        }
        skip_ws();
        if (!match_literal("(")) {
            pos_ = start;
            return nullptr;
        }
        NodeList args = arg_list(/*allow_empty=*/true);
        if (!match_literal(")")) raise();
        return make(SyntaxNode::Composition{std::move(names), std::move(args)}, {start, pos_});
    }

    // infixCall <- "(" expr name expr ")"
    NodePtr infix_call() {
        std::size_t start = pos_;
        if (!match_literal("(")) {
            pos_ = start;
            return nullptr;
        }
        NodePtr lhs = expr();
        if (!lhs) {
            pos_ = start;
            return nullptr;
        }
        auto op = name_token();
        if (!op) {
            pos_ = start;
            return nullptr;
        }
        NodePtr rhs = expr();
        if (!rhs) {
            pos_ = start;
            return nullptr;
        }
        if (!match_literal(")")) {
            pos_ = start;
            return nullptr;
        }
        return make(SyntaxNode::InfixCall{lhs, *op, rhs}, {start, pos_});
    }

    // prefixCall <- "(" name expr ")"
    NodePtr prefix_call() {
        std::size_t start = pos_;
        if (!match_literal("(")) {
            pos_ = start;
            return nullptr;
        }
        skip_ws();
        auto op = name_token();
        if (!op) {
            pos_ = start;
            return nullptr;
        }
        NodePtr arg = expr();
        if (!arg) {
            pos_ = start;
            return nullptr;
        }
        if (!match_literal(")")) {
            pos_ = start;
            return nullptr;
        }
        return make(SyntaxNode::PrefixCall{*op, arg}, {start, pos_});
    }

    // list <- "[" expr* "]"
    NodePtr list_lit() {
        std::size_t start = pos_;
        if (!match_literal("[")) {
            pos_ = start;
            return nullptr;
        }
        NodeList elems;
        while (true) {
            skip_ws();
            if (peek() == ']') break;
            NodePtr e = expr();
            if (!e) raise();
            elems.push_back(std::move(e));
        }
        if (!match_literal("]")) raise();
        return make(SyntaxNode::ListLit{std::move(elems)}, {start, pos_});
    }

    // assignment <- "let" _ lvalue "=" expr
    NodePtr assignment() {
        std::size_t start = pos_;
        if (!match_keyword("let")) {
            pos_ = start;
            return nullptr;
        }
        skip_ws();
        auto name = lvalue_token();
        if (!name) {
            pos_ = start;
            return nullptr;
        }
        skip_ws();
        if (!match_literal("=")) {
            pos_ = start;
            return nullptr;
        }
        NodePtr value = expr();
        if (!value) raise();
        return make(SyntaxNode::Assignment{*name, value}, {start, pos_});
    }

    NodePtr bool_lit() {
        std::size_t start = pos_;
        if (match_literal("#t")) return make(SyntaxNode::BoolLit{true}, {start, pos_});
        pos_ = start;
        if (match_literal("#f")) return make(SyntaxNode::BoolLit{false}, {start, pos_});
        pos_ = start;
        return nullptr;
    }

    // stringLit <- '"' [a-z A-Z 0-9 ! # $ ?]* '"'   (no escapes)
    NodePtr string_lit() {
        std::size_t start = pos_;
        if (!match_literal("\"")) {
            pos_ = start;
            return nullptr;
        }
        std::string text;
        while (!at_end()) {
            char c = src_[pos_];
            if (c == '"') break;
            bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || is_digit(c) ||
                      c == ' ' || c == '!' || c == '#' || c == '$' || c == '?';
            if (!ok) {
                note(pos_, "a string character or '\"'");
                raise();
            }
            text += c;
            ++pos_;
        }
        if (!match_literal("\"")) raise();
        return make(SyntaxNode::StringLit{std::move(text)}, {start, pos_});
    }

    // complexLit <- sign? numeral ("." numeral)? sign numeral ("." numeral)? "i"
    NodePtr complex_lit() {
        std::size_t start = pos_;
        auto part = [&](bool sign_required) -> std::optional<double> {
            std::size_t p = pos_;
            std::string text;
            if (peek() == '+' || peek() == '-') {
                text += src_[pos_++];
            } else if (sign_required) {
                note(pos_, "'+' or '-'");
                return std::nullopt;
            }
            auto whole = numeral();
            if (!whole) {
                pos_ = p;
                return std::nullopt;
            }
            text += *whole;
            if (peek() == '.') {
                ++pos_;
                auto frac = numeral();
                if (!frac) {
                    pos_ = p;
                    return std::nullopt;
                }
                text += '.';
                text += *frac;
            }
            return std::strtod(text.c_str(), nullptr);
        };
        auto re = part(/*sign_required=*/false);
        if (!re) {
            pos_ = start;
            return nullptr;
        }
        auto im = part(/*sign_required=*/true);
        if (!im) {
            pos_ = start;
            return nullptr;
        }
        if (!match_literal("i")) {
            pos_ = start;
            return nullptr;
        }
        return make(SyntaxNode::ComplexLit{*re, *im}, {start, pos_});
    }

    // floatLit <- "-"? numeral "." numeral
    NodePtr float_lit() {
        std::size_t start = pos_;
        std::string text;
        if (peek() == '-') text += src_[pos_++];
        auto whole = numeral();
        if (!whole) {
            pos_ = start;
            return nullptr;
        }
        text += *whole;
        if (!match_literal(".")) {
            pos_ = start;
            return nullptr;
        }
        auto frac = numeral();
        if (!frac) {
            pos_ = start;
            return nullptr;
        }
        text += '.';
        text += *frac;
        return make(SyntaxNode::FloatLit{std::strtod(text.c_str(), nullptr)}, {start, pos_});
    }

    // intLit <- "-"? numeral
    NodePtr int_lit() {
        std::size_t start = pos_;
        std::string text;
        if (peek() == '-') text += src_[pos_++];
        auto digits = numeral();
        if (!digits) {
            pos_ = start;
            return nullptr;
        }
        text += *digits;
        std::int64_t value = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{}) {
            throw ParseError("integer literal out of range", {start, pos_});
        }
        return make(SyntaxNode::IntLit{value}, {start, pos_});
    }

    NodePtr name_expr() {
        std::size_t start = pos_;
        auto n = name_token();
        if (!n) {
            pos_ = start;
            return nullptr;
        }
        return make(SyntaxNode::Name{*n}, {start, pos_});
    }

    NodeList expr_seq_until(char closer) {
        NodeList out;
        while (true) {
            skip_ws();
            if (at_end() || peek() == closer) break;
            NodePtr e = expr();
            if (!e) raise();
            out.push_back(std::move(e));
        }
        return out;
    }

    // Comma-separated argument list; commas between comp-style space-separated
    // arguments are optional when allow_empty is set.
    NodeList arg_list(bool allow_empty) {
        NodeList args;
        skip_ws();
        if (allow_empty && peek() == ')') return args;
        NodePtr first = expr();
        if (!first) {
            if (allow_empty) return args;
            return args;  // caller backtracks
        }
        args.push_back(std::move(first));
        while (true) {
            skip_ws();
            std::size_t save = pos_;
            bool comma = match_literal(",");
            if (!comma) pos_ = save;
            if (!comma && !allow_empty) break;
            skip_ws();
            if (peek() == ')') {
                pos_ = comma ? save : pos_;
                break;
            }
            NodePtr next = expr();
            if (!next) {
                if (comma) raise();
                break;
            }
            args.push_back(std::move(next));
        }
        return args;
    }

    // -- type annotations ----------------------------------------------------

    AnnotationPtr type_tensor() {
        std::size_t start = pos_;
        AnnotationPtr acc = type_atom();
        if (!acc) return nullptr;
        while (true) {
            std::size_t save = pos_;
            skip_ws();
            if (!match_literal("*")) {
                pos_ = save;
                break;
            }
            skip_ws();
            AnnotationPtr rhs = type_atom();
            if (!rhs) raise();
            acc = make_ann(TypeAnnotation::Tensor{acc, rhs}, {start, rhs->span.end});
        }
        return acc;
    }

    bool match_type_keyword(std::string_view kw) {
        std::size_t save = pos_;
        if (!match_literal(kw)) return false;
        if (!at_end() && is_lvalue_char(src_[pos_])) {
            pos_ = save;
            return false;
        }
        return true;
    }

    AnnotationPtr type_atom() {
        std::size_t start = pos_;
        if (match_type_keyword("qubit"))
            return make_ann(TypeAnnotation::Qubit{}, {start, pos_});
        pos_ = start;
        if (match_type_keyword("int"))
            return make_ann(TypeAnnotation::Int{}, {start, pos_});
        pos_ = start;
        if (match_type_keyword("list"))
            return make_ann(TypeAnnotation::List{}, {start, pos_});
        pos_ = start;
        if (match_type_keyword("operator")) {
            skip_ws();
            if (!match_literal("[")) raise();
            skip_ws();
            auto digits = numeral();
            if (!digits) raise();
            int n = std::atoi(digits->c_str());
            if (n < 1) throw ParseError("operator dimension must be at least 1", {start, pos_});
            skip_ws();
            if (!match_literal("]")) raise();
            return make_ann(TypeAnnotation::Operator{n}, {start, pos_});
        }
        pos_ = start;
        if (match_literal("!")) {
            skip_ws();
            if (!match_literal("{")) raise();
            skip_ws();
            AnnotationPtr inner = type_expr();
            if (!inner) raise();
            skip_ws();
            if (!match_literal("}")) raise();
            return make_ann(TypeAnnotation::Bang{inner}, {start, pos_});
        }
        pos_ = start;
        note(pos_, "a type");
        return nullptr;
    }
};

}  // namespace

NodeList parse_program(std::string_view source) {
    return Parser(source).program();
}

NodePtr parse_expr(std::string_view source) {
    return Parser(source).single_expr();
}

AnnotationPtr parse_type_annotation(std::string_view source) {
    return Parser(source).type_annotation_only();
}

}  // namespace qumin
