#include <cctype>
#include <charconv>

#include "mcomp/spec_dsl.hpp"

namespace mcomp {

namespace {

struct Token {
    enum class Kind { Ident, String, Integer, Punct, End };

    Kind kind = Kind::End;
    std::string text;  ///< identifier / punctuation / decoded string
    std::int64_t number = 0;
    SourceLocation location;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run(std::vector<SpecDiagnostic>& diags)
    {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token tok;
            tok.location = {line_, column_};
            if (pos_ >= src_.size()) {
                tok.kind = Token::Kind::End;
                out.push_back(tok);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                tok.kind = Token::Kind::Ident;
                while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
                    tok.text += advance();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && pos_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                tok.kind = Token::Kind::Integer;
                std::string digits;
                digits += advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    digits += advance();
                }
                auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), tok.number);
                if (ec != std::errc{}) {
                    diags.push_back({SpecDiagnostic::Severity::Error, tok.location,
                                     "integer literal out of range: " + digits});
                }
                tok.text = digits;
            } else if (c == '"') {
                tok.kind = Token::Kind::String;
                advance();
                bool closed = false;
                while (pos_ < src_.size()) {
                    char ch = advance();
                    if (ch == '"') {
                        closed = true;
                        break;
                    }
                    if (ch == '\\' && pos_ < src_.size()) {
                        char esc = advance();
                        switch (esc) {
                        case 'n':
                            tok.text += '\n';
                            break;
                        case 't':
                            tok.text += '\t';
                            break;
                        default:
                            tok.text += esc;
                        }
                        continue;
                    }
                    tok.text += ch;
                }
                if (!closed) {
                    diags.push_back({SpecDiagnostic::Severity::Error, tok.location, "unterminated string literal"});
                }
            } else if (std::string_view(":!{}().=;,|").find(c) != std::string_view::npos) {
                tok.kind = Token::Kind::Punct;
                tok.text = std::string(1, advance());
            } else {
                diags.push_back({SpecDiagnostic::Severity::Error, tok.location,
                                 std::string("unexpected character '") + c + "'"});
                advance();
                continue;
            }
            out.push_back(std::move(tok));
        }
    }

private:
    static bool is_ident_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    char advance()
    {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space_and_comments()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

struct SyntaxError {
    SourceLocation location;
    std::string message;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<SpecDiagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags)
    {
    }

    std::optional<CompositionSpec> parse()
    {
        CompositionSpec spec;
        try {
            parse_header(spec);
        } catch (const SyntaxError& e) {
            diags_.push_back({SpecDiagnostic::Severity::Error, e.location, e.message});
            return std::nullopt;
        }
        while (!at_end()) {
            try {
                spec.rules.push_back(parse_rule(spec));
            } catch (const SyntaxError& e) {
                diags_.push_back({SpecDiagnostic::Severity::Error, e.location, e.message});
                recover();
            }
        }
        return spec;
    }

private:
    const Token& peek(std::size_t ahead = 0) const
    {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    bool at_end() const { return peek().kind == Token::Kind::End; }

    const Token& next()
    {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) {
            ++pos_;
        }
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& expected) const
    {
        std::string found;
        switch (at.kind) {
        case Token::Kind::End:
            found = "end of input";
            break;
        case Token::Kind::String:
            found = "string literal";
            break;
        default:
            found = "'" + at.text + "'";
        }
        throw SyntaxError{at.location, "expected " + expected + ", found " + found};
    }

    bool is_word(const Token& t, std::string_view word) const
    {
        return t.kind == Token::Kind::Ident && t.text == word;
    }

    bool is_punct(const Token& t, char c) const
    {
        return t.kind == Token::Kind::Punct && t.text.size() == 1 && t.text[0] == c;
    }

    void expect_word(std::string_view word)
    {
        if (!is_word(peek(), word)) {
            fail(peek(), "'" + std::string(word) + "'");
        }
        next();
    }

    void expect_punct(char c)
    {
        if (!is_punct(peek(), c)) {
            fail(peek(), std::string("'") + c + "'");
        }
        next();
    }

    std::string expect_ident(const char* what)
    {
        if (peek().kind != Token::Kind::Ident) {
            fail(peek(), what);
        }
        return next().text;
    }

    void recover()
    {
        // Skip to the next `rule NAME (match|merge|transform)`.
        while (!at_end()) {
            if (is_word(peek(), "rule") && peek(1).kind == Token::Kind::Ident &&
                (is_word(peek(2), "match") || is_word(peek(2), "merge") || is_word(peek(2), "transform"))) {
                return;
            }
            next();
        }
    }

    ModelDecl parse_decl()
    {
        ModelDecl d;
        d.alias = expect_ident("model alias");
        expect_punct(':');
        d.metamodel = expect_ident("metamodel name");
        return d;
    }

    void parse_header(CompositionSpec& spec)
    {
        expect_word("composition");
        spec.name = expect_ident("composition name");
        expect_word("left");
        spec.left = parse_decl();
        expect_word("right");
        spec.right = parse_decl();
        expect_word("target");
        spec.targets.push_back(parse_decl());
        if (is_word(peek(), "target")) {
            next();
            spec.targets.push_back(parse_decl());
        }
        if (is_word(peek(), "target")) {
            throw SyntaxError{peek().location, "a composition declares at most two target models"};
        }
    }

    Param parse_param()
    {
        Param p;
        p.location = peek().location;
        p.name = expect_ident("parameter name");
        expect_punct(':');
        p.alias = expect_ident("model alias");
        expect_punct('!');
        p.type = expect_ident("metatype name");
        return p;
    }

    bool at_param() const { return peek().kind == Token::Kind::Ident && is_punct(peek(1), ':'); }

    std::vector<Param> parse_params()
    {
        std::vector<Param> out;
        out.push_back(parse_param());
        while (at_param()) {
            out.push_back(parse_param());
        }
        return out;
    }

    CompositionRule parse_rule(const CompositionSpec& spec)
    {
        CompositionRule rule;
        rule.location = peek().location;
        expect_word("rule");
        rule.name = expect_ident("rule name");
        const Token& kind = peek();
        if (is_word(kind, "match")) {
            next();
            rule.kind = RuleKind::Match;
            rule.in_left.push_back(parse_param());
            expect_word("with");
            rule.in_right.push_back(parse_param());
            expect_word("compare");
            expect_punct('{');
            rule.guard = parse_expr();
            expect_punct('}');
        } else if (is_word(kind, "merge")) {
            next();
            rule.kind = RuleKind::Merge;
            rule.in_left.push_back(parse_param());
            expect_word("with");
            rule.in_right.push_back(parse_param());
            expect_word("into");
            rule.out = parse_params();
            rule.body = parse_block();
        } else if (is_word(kind, "transform")) {
            next();
            rule.kind = RuleKind::Transform;
            std::vector<Param> sources = parse_params();
            if (is_word(peek(), "with")) {
                next();
                auto more = parse_params();
                sources.insert(sources.end(), more.begin(), more.end());
            }
            // Sources are classified by the model they come from.
            for (auto& p : sources) {
                if (p.alias == spec.right.alias) {
                    rule.in_right.push_back(std::move(p));
                } else {
                    rule.in_left.push_back(std::move(p));
                }
            }
            expect_word("to");
            rule.out = parse_params();
            if (is_word(peek(), "when")) {
                next();
                expect_punct('{');
                rule.guard = parse_expr();
                expect_punct('}');
            }
            rule.body = parse_block();
        } else {
            fail(kind, "'match', 'merge' or 'transform'");
        }
        return rule;
    }

    std::vector<Statement> parse_block()
    {
        std::vector<Statement> body;
        expect_punct('{');
        while (!is_punct(peek(), '}')) {
            if (at_end()) {
                fail(peek(), "'}'");
            }
            body.push_back(parse_statement());
        }
        next();
        return body;
    }

    CallExpr parse_call()
    {
        CallExpr call;
        call.location = peek().location;
        expect_word("call");
        call.callee = expect_ident("rule name");
        expect_punct('(');
        if (!is_punct(peek(), ')')) {
            call.args.push_back(parse_expr());
            while (is_punct(peek(), ',')) {
                next();
                call.args.push_back(parse_expr());
            }
        }
        expect_punct(')');
        return call;
    }

    Statement parse_statement()
    {
        Statement st;
        st.location = peek().location;
        if (is_word(peek(), "call") && peek(1).kind == Token::Kind::Ident) {
            st.kind = Statement::Kind::Call;
            st.call = parse_call();
            expect_punct(';');
            return st;
        }
        st.param = expect_ident("statement");
        expect_punct('.');
        st.feature = expect_ident("feature name");
        expect_punct('=');
        if (is_word(peek(), "equivalent") && is_punct(peek(1), '(')) {
            next();
            next();
            st.kind = Statement::Kind::SetResolve;
            st.value = parse_expr();
            expect_punct(')');
        } else if (is_word(peek(), "call") && peek(1).kind == Token::Kind::Ident) {
            st.kind = Statement::Kind::SetCall;
            st.call = parse_call();
        } else {
            st.kind = Statement::Kind::SetFeature;
            st.value = parse_expr();
        }
        expect_punct(';');
        return st;
    }

    Expr parse_expr() { return parse_or(); }

    Expr parse_or()
    {
        Expr lhs = parse_and();
        while (is_word(peek(), "or")) {
            auto loc = next().location;
            lhs = Expr::make_binary(Expr::Kind::Or, std::move(lhs), parse_and(), loc);
        }
        return lhs;
    }

    Expr parse_and()
    {
        Expr lhs = parse_not();
        while (is_word(peek(), "and")) {
            auto loc = next().location;
            lhs = Expr::make_binary(Expr::Kind::And, std::move(lhs), parse_not(), loc);
        }
        return lhs;
    }

    Expr parse_not()
    {
        if (is_word(peek(), "not")) {
            auto loc = next().location;
            return Expr::make_not(parse_not(), loc);
        }
        return parse_eq();
    }

    Expr parse_eq()
    {
        Expr lhs = parse_postfix();
        if (is_punct(peek(), '=')) {
            auto loc = next().location;
            lhs = Expr::make_binary(Expr::Kind::Eq, std::move(lhs), parse_postfix(), loc);
        }
        return lhs;
    }

    Expr parse_postfix()
    {
        Expr e = parse_primary();
        while (is_punct(peek(), '.')) {
            auto loc = next().location;
            std::string member = expect_ident("member name");
            if (member == "exists" && is_punct(peek(), '(')) {
                next();
                std::string var = expect_ident("bound variable");
                expect_punct('|');
                Expr pred = parse_expr();
                expect_punct(')');
                e = Expr::make_exists(std::move(e), std::move(var), std::move(pred), loc);
            } else {
                e = Expr::make_member(std::move(e), std::move(member), loc);
            }
        }
        return e;
    }

    Expr parse_primary()
    {
        const Token& t = peek();
        switch (t.kind) {
        case Token::Kind::String:
            next();
            return Expr::make_literal(t.text, t.location);
        case Token::Kind::Integer:
            next();
            return Expr::make_literal(t.number, t.location);
        case Token::Kind::Ident:
            if (t.text == "true" || t.text == "false") {
                next();
                return Expr::make_literal(t.text == "true", t.location);
            }
            if (t.text == "hasMatch" && is_punct(peek(1), '(')) {
                auto loc = next().location;
                next();
                std::string param = expect_ident("parameter name");
                expect_punct(')');
                return Expr::make_has_match(std::move(param), loc);
            }
            if (t.text == "and" || t.text == "or" || t.text == "not") {
                fail(t, "expression");
            }
            next();
            return Expr::make_var(t.text, t.location);
        case Token::Kind::Punct:
            if (is_punct(t, '(')) {
                next();
                Expr inner = parse_expr();
                expect_punct(')');
                return inner;
            }
            [[fallthrough]];
        default:
            fail(t, "expression");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<SpecDiagnostic>& diags_;
};

}  // namespace

ParseResult parse_spec(std::string_view text)
{
    ParseResult result;
    auto tokens = Lexer(text).run(result.diagnostics);
    if (!result.diagnostics.empty()) {
        return result;
    }
    auto spec = Parser(std::move(tokens), result.diagnostics).parse();
    if (!spec || !result.diagnostics.empty()) {
        return result;
    }
    auto structural = check_structure(*spec);
    result.diagnostics.insert(result.diagnostics.end(), structural.begin(), structural.end());
    if (result.diagnostics.empty()) {
        result.spec = std::move(spec);
    }
    return result;
}

}  // namespace mcomp
