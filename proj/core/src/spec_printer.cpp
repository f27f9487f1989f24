#include <sstream>

#include "mcomp/spec_dsl.hpp"

namespace mcomp {

namespace {

int precedence(const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::Or:
        return 1;
    case Expr::Kind::And:
        return 2;
    case Expr::Kind::Not:
        return 3;
    case Expr::Kind::Eq:
        return 4;
    default:
        return 5;
    }
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            out += c;
        }
    }
    return out + '"';
}

void print(std::ostream& os, const Expr& e);

void print_operand(std::ostream& os, const Expr& e, int min_prec)
{
    if (precedence(e) < min_prec) {
        os << '(';
        print(os, e);
        os << ')';
    } else {
        print(os, e);
    }
}

void print(std::ostream& os, const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::Literal:
        if (const auto* s = std::get_if<std::string>(&e.literal)) {
            os << quote(*s);
        } else {
            os << format_value(e.literal);
        }
        break;
    case Expr::Kind::Var:
        os << e.name;
        break;
    case Expr::Kind::Member:
        print_operand(os, e.operands[0], 5);
        os << '.' << e.name;
        break;
    case Expr::Kind::Exists:
        print_operand(os, e.operands[0], 5);
        os << ".exists(" << e.name << " | ";
        print(os, e.operands[1]);
        os << ')';
        break;
    case Expr::Kind::HasMatch:
        os << "hasMatch(" << e.name << ')';
        break;
    case Expr::Kind::Not:
        os << "not ";
        print_operand(os, e.operands[0], 3);
        break;
    case Expr::Kind::Eq:
        // non-associative: both sides must be postfix-level
        print_operand(os, e.operands[0], 5);
        os << " = ";
        print_operand(os, e.operands[1], 5);
        break;
    case Expr::Kind::And:
    case Expr::Kind::Or: {
        const int p = precedence(e);
        print_operand(os, e.operands[0], p);
        os << (e.kind == Expr::Kind::And ? " and " : " or ");
        print_operand(os, e.operands[1], p + 1);
        break;
    }
    }
}

std::string param_text(const Param& p)
{
    return p.name + " : " + p.alias + "!" + p.type;
}

std::string params_text(const std::vector<Param>& ps)
{
    std::string out;
    for (const auto& p : ps) {
        if (!out.empty()) {
            out += ' ';
        }
        out += param_text(p);
    }
    return out;
}

std::string call_text(const CallExpr& c)
{
    std::string out = "call " + c.callee + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += print_expr(c.args[i]);
    }
    return out + ")";
}

void print_body(std::ostream& os, const std::vector<Statement>& body)
{
    if (body.empty()) {
        os << "{ }\n";
        return;
    }
    os << "{\n";
    for (const auto& st : body) {
        os << "    ";
        switch (st.kind) {
        case Statement::Kind::SetFeature:
            os << st.param << '.' << st.feature << " = " << print_expr(st.value);
            break;
        case Statement::Kind::SetResolve:
            os << st.param << '.' << st.feature << " = equivalent(" << print_expr(st.value) << ')';
            break;
        case Statement::Kind::SetCall:
            os << st.param << '.' << st.feature << " = " << call_text(st.call);
            break;
        case Statement::Kind::Call:
            os << call_text(st.call);
            break;
        }
        os << ";\n";
    }
    os << "  }\n";
}

}  // namespace

std::string print_expr(const Expr& expr)
{
    std::ostringstream os;
    print(os, expr);
    return os.str();
}

std::string print_spec(const CompositionSpec& spec)
{
    std::ostringstream os;
    os << "composition " << spec.name << '\n';
    os << "  left " << spec.left.alias << " : " << spec.left.metamodel << '\n';
    os << "  right " << spec.right.alias << " : " << spec.right.metamodel << '\n';
    for (const auto& t : spec.targets) {
        os << "  target " << t.alias << " : " << t.metamodel << '\n';
    }
    for (const auto& rule : spec.rules) {
        os << "\nrule " << rule.name << '\n';
        switch (rule.kind) {
        case RuleKind::Match:
            os << "  match " << params_text(rule.in_left) << '\n';
            os << "  with " << params_text(rule.in_right) << '\n';
            os << "  compare { " << (rule.guard ? print_expr(*rule.guard) : std::string("true")) << " }\n";
            break;
        case RuleKind::Merge:
            os << "  merge " << params_text(rule.in_left) << '\n';
            os << "  with " << params_text(rule.in_right) << '\n';
            os << "  into " << params_text(rule.out) << ' ';
            print_body(os, rule.body);
            break;
        case RuleKind::Transform:
            if (rule.in_left.empty()) {
                os << "  transform " << params_text(rule.in_right) << '\n';
            } else {
                os << "  transform " << params_text(rule.in_left) << '\n';
                if (!rule.in_right.empty()) {
                    os << "  with " << params_text(rule.in_right) << '\n';
                }
            }
            os << "  to " << params_text(rule.out) << '\n';
            if (rule.guard) {
                os << "  when { " << print_expr(*rule.guard) << " }\n";
            }
            os << "  ";
            print_body(os, rule.body);
            break;
        }
    }
    return os.str();
}

}  // namespace mcomp
