#include <cctype>
#include <charconv>
#include <set>

#include "patchvm/classfile.hpp"

namespace patchvm {
namespace {

enum class Tok { Ident, Int, Float, String, LBrace, RBrace, LParen, RParen, Assign, Dot, Sep, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_blanks();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char ch = src_[pos_];
            if (ch == '\n' || ch == ';') {
                t.kind = Tok::Sep;
                t.text = std::string(1, ch);
                advance();
            } else if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == '=' || ch == '.') {
                t.kind = ch == '{'   ? Tok::LBrace
                         : ch == '}' ? Tok::RBrace
                         : ch == '(' ? Tok::LParen
                         : ch == ')' ? Tok::RParen
                         : ch == '=' ? Tok::Assign
                                     : Tok::Dot;
                t.text = std::string(1, ch);
                advance();
            } else if (ch == '"') {
                t.kind = Tok::String;
                t.text = lex_string(t);
            } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
                       (ch == '-' && pos_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number(t);
            } else if (is_ident_start(ch)) {
                while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
                    t.text += src_[pos_];
                    advance();
                }
                t.kind = Tok::Ident;
            } else {
                throw ParseError(line_, col_, std::string("unexpected character '") + ch + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    static bool is_ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
    }
    static bool is_ident_char(char c) {
        return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blanks() {
        while (pos_ < src_.size()) {
            char ch = src_[pos_];
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                advance();
            } else if (ch == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::string lex_string(const Token& start) {
        std::string out;
        advance();  // opening quote
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') {
                throw ParseError(start.line, start.column, "unterminated string literal");
            }
            char ch = src_[pos_];
            if (ch == '"') {
                advance();
                return out;
            }
            if (ch == '\\') {
                advance();
                if (pos_ >= src_.size()) throw ParseError(line_, col_, "bad escape");
                char esc = src_[pos_];
                switch (esc) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: throw ParseError(line_, col_, std::string("unknown escape \\") + esc);
                }
                advance();
                continue;
            }
            out += ch;
            advance();
        }
    }

    void lex_number(Token& t) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                t.text += src_[pos_];
                advance();
            }
        };
        if (src_[pos_] == '-') {
            t.text += '-';
            advance();
        }
        digits();
        t.kind = Tok::Int;
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            t.text += '.';
            advance();
            digits();
            t.kind = Tok::Float;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            t.text += 'e';
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                t.text += src_[pos_];
                advance();
            }
            digits();
            t.kind = Tok::Float;
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ClassDef parse() {
        skip_seps();
        expect_keyword("class");
        ClassDef c;
        c.name = expect(Tok::Ident, "class name").text;
        if (peek_keyword("extends")) {
            next();
            c.superclass = expect(Tok::Ident, "superclass name").text;
        }
        if (peek_keyword("instrumented")) {
            next();
            c.instrumented = true;
        }
        expect(Tok::LBrace, "'{'");
        while (true) {
            skip_seps();
            if (peek().kind == Tok::RBrace) {
                next();
                break;
            }
            if (peek().kind == Tok::End) fail(peek(), "unexpected end of input inside class body");
            parse_member(c);
        }
        skip_seps();
        if (peek().kind != Tok::End) fail(peek(), "trailing content after class body");
        return c;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw ParseError(t.line, t.column, msg);
    }

    const Token& expect(Tok kind, const char* what) {
        const Token& t = peek();
        if (t.kind != kind) {
            fail(t, std::string("expected ") + what +
                        (t.kind == Tok::End ? " but reached end of input" : " near '" + t.text + "'"));
        }
        return next();
    }

    bool peek_keyword(std::string_view kw) const {
        return peek().kind == Tok::Ident && peek().text == kw;
    }

    void expect_keyword(std::string_view kw) {
        if (!peek_keyword(kw)) fail(peek(), "expected '" + std::string(kw) + "'");
        next();
    }

    void skip_seps() {
        while (peek().kind == Tok::Sep) next();
    }

    void end_of_statement() {
        if (peek().kind == Tok::Sep) {
            next();
            return;
        }
        if (peek().kind == Tok::RBrace) return;
        fail(peek(), "expected end of statement near '" + peek().text + "'");
    }

    void parse_member(ClassDef& c) {
        const Token& first = peek();
        if (peek_keyword("init")) {
            next();
            MethodDef m;
            m.name = std::string(kClinitName);
            m.kind = MemberKind::Static;
            m.params = 0;
            m.body = parse_body();
            c.methods.push_back(std::move(m));
            end_of_statement();
            return;
        }
        bool is_static = false;
        bool is_final = false;
        if (peek_keyword("static")) {
            next();
            is_static = true;
        }
        if (peek_keyword("final")) {
            next();
            is_final = true;
        }
        if (peek_keyword("fn")) {
            if (is_final) fail(first, "methods cannot be final");
            next();
            MethodDef m;
            m.kind = is_static ? MemberKind::Static : MemberKind::Instance;
            m.name = expect(Tok::Ident, "method name").text;
            expect(Tok::LParen, "'('");
            const Token& n = expect(Tok::Int, "parameter count");
            m.params = std::stoi(n.text);
            if (m.params < 0) fail(n, "negative parameter count");
            expect(Tok::RParen, "')'");
            m.body = parse_body();
            c.methods.push_back(std::move(m));
            end_of_statement();
            return;
        }
        const Token& type_tok = expect(Tok::Ident, "field type, 'fn' or 'init'");
        auto type = field_type_from(type_tok.text);
        if (!type) fail(type_tok, "unknown field type '" + type_tok.text + "'");
        FieldDef f;
        f.kind = is_static ? MemberKind::Static : MemberKind::Instance;
        f.is_final = is_final;
        f.type = *type;
        f.name = expect(Tok::Ident, "field name").text;
        if (peek().kind == Tok::Assign) {
            const Token& eq = next();
            if (!is_static || !is_final || *type == FieldType::Ref) {
                fail(eq, "initializer only allowed on static final int/float/bool/string constants");
            }
            const Token& lit_tok = peek();
            Literal lit = parse_literal();
            f.constant_value = coerce_constant(lit, *type, lit_tok);
        }
        c.fields.push_back(std::move(f));
        end_of_statement();
    }

    Literal coerce_constant(const Literal& lit, FieldType type, const Token& at) {
        switch (type) {
            case FieldType::Int:
                if (std::holds_alternative<std::int64_t>(lit)) return lit;
                break;
            case FieldType::Float:
                if (std::holds_alternative<double>(lit)) return lit;
                if (auto* i = std::get_if<std::int64_t>(&lit)) return static_cast<double>(*i);
                break;
            case FieldType::Bool:
                if (std::holds_alternative<bool>(lit)) return lit;
                break;
            case FieldType::String:
                if (std::holds_alternative<std::string>(lit)) return lit;
                break;
            case FieldType::Ref: break;
        }
        fail(at, "constant literal does not match field type " + std::string(to_string(type)));
    }

    Literal parse_literal() {
        const Token& t = next();
        switch (t.kind) {
            case Tok::Int: {
                std::int64_t v = 0;
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
                if (ec != std::errc{} || p != t.text.data() + t.text.size()) {
                    fail(t, "integer literal out of range");
                }
                return v;
            }
            case Tok::Float: {
                double v = 0;
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
                if (ec != std::errc{} || p != t.text.data() + t.text.size()) {
                    fail(t, "bad float literal");
                }
                return v;
            }
            case Tok::String: return t.text;
            case Tok::Ident:
                if (t.text == "true") return true;
                if (t.text == "false") return false;
                if (t.text == "null") return std::monostate{};
                break;
            default: break;
        }
        fail(t, "expected literal");
    }

    std::vector<Instruction> parse_body() {
        expect(Tok::LBrace, "'{'");
        std::vector<Instruction> body;
        while (true) {
            skip_seps();
            if (peek().kind == Tok::RBrace) {
                next();
                return body;
            }
            if (peek().kind == Tok::End) fail(peek(), "unexpected end of input inside method body");
            body.push_back(parse_instruction());
            end_of_statement();
        }
    }

    Instruction parse_instruction() {
        const Token& t = expect(Tok::Ident, "instruction");
        auto op = op_from_mnemonic(t.text);
        if (!op) fail(t, "unknown instruction '" + t.text + "'");
        Instruction insn = make_insn(*op);
        switch (*op) {
            case Op::Const: insn.literal = parse_literal(); break;
            case Op::Load:
            case Op::Store: {
                const Token& n = expect(Tok::Int, "local index");
                insn.index = std::stoll(n.text);
                if (insn.index < 0) fail(n, "negative local index");
                break;
            }
            case Op::GetStatic:
            case Op::PutStatic:
            case Op::InvokeStatic:
                insn.owner = expect(Tok::Ident, "class name").text;
                expect(Tok::Dot, "'.'");
                insn.member = expect(Tok::Ident, "member name").text;
                break;
            case Op::GetField:
            case Op::PutField:
            case Op::InvokeVirtual:
            case Op::Label:
            case Op::Jump:
            case Op::JumpIf: insn.member = expect(Tok::Ident, "name").text; break;
            case Op::New:
            case Op::Guard: insn.owner = expect(Tok::Ident, "class name").text; break;
            case Op::Throw: insn.member = expect(Tok::String, "string message").text; break;
            default: break;
        }
        return insn;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

ClassDef parse_class(std::string_view text) {
    ClassDef c = Parser(Lexer(text).run()).parse();
    verify_class_local(c);
    return c;
}

}  // namespace patchvm
