#include "astref/printer.hpp"

namespace astref {

namespace {

void render_call(const AstNode& call, std::string& out);

void render(const Expr& e, const AstNode& owner, std::string& out) {
    switch (e.kind) {
    case Expr::Kind::Name: out += e.name; break;
    case Expr::Kind::Int: out += std::to_string(e.value); break;
    case Expr::Kind::Binary:
        render(e.operands[0], owner, out);
        out += ' ';
        out += e.op;
        out += ' ';
        render(e.operands[1], owner, out);
        break;
    case Expr::Kind::CallRef:
        render_call(owner.children.at(static_cast<std::size_t>(e.call_index)), out);
        break;
    }
}

void render_call(const AstNode& call, std::string& out) {
    out += call.name;
    out += '(';
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i) out += ", ";
        render(call.args[i], call, out);
    }
    out += ')';
}

void render_compare(const AstNode& cmp, std::string& out) {
    render(cmp.value.value_or(Expr::make_int(0)), cmp, out);
    out += ' ';
    out += to_string(cmp.op);
    out += ' ';
    render(cmp.rhs.value_or(Expr::make_int(0)), cmp, out);
}

void indent(int level, std::string& out) { out.append(static_cast<std::size_t>(level) * 4, ' '); }

void statement(const AstNode& n, int level, std::string& out);

void block(const AstNode& owner, std::size_t begin, std::size_t end, int level, std::string& out) {
    for (std::size_t i = begin; i < end; ++i) statement(owner.children[i], level, out);
}

void statement(const AstNode& n, int level, std::string& out) {
    indent(level, out);
    switch (n.kind) {
    case NodeKind::FunctionDef: {
        out += "def " + n.name + "(";
        for (std::size_t i = 0; i < n.params.size(); ++i) {
            if (i) out += ", ";
            out += n.params[i];
        }
        out += "):\n";
        block(n, 0, n.children.size(), level + 1, out);
        return;
    }
    case NodeKind::If:
        out += "if ";
        render_compare(n.children.at(0), out);
        out += ":\n";
        block(n, 1, n.body_end(), level + 1, out);
        if (n.else_start) {
            indent(level, out);
            out += "else:\n";
            block(n, *n.else_start, n.children.size(), level + 1, out);
        }
        return;
    case NodeKind::While:
        out += "while ";
        render_compare(n.children.at(0), out);
        out += ":\n";
        block(n, 1, n.children.size(), level + 1, out);
        return;
    case NodeKind::For:
        out += "for " + n.name + " in ";
        render(n.value.value_or(Expr::make_int(0)), n, out);
        out += ":\n";
        block(n, n.header_calls, n.children.size(), level + 1, out);
        return;
    case NodeKind::Assign:
        out += n.name + " = ";
        render(n.value.value_or(Expr::make_int(0)), n, out);
        break;
    case NodeKind::Return:
        out += "return";
        if (n.value) {
            out += ' ';
            render(*n.value, n, out);
        }
        break;
    case NodeKind::Import: out += "import " + n.name; break;
    case NodeKind::Call: render_call(n, out); break;
    case NodeKind::Module:
    case NodeKind::Compare: break;
    }
    out += '\n';
}

} // namespace

std::string render_expr(const Expr& e, const AstNode& owner) {
    std::string out;
    render(e, owner, out);
    return out;
}

std::string pretty_print(const AstTree& tree) {
    std::string out;
    block(tree.root(), 0, tree.root().children.size(), 0, out);
    return out;
}

} // namespace astref
