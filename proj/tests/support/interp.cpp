#include "support/interp.hpp"

namespace astref::support {

namespace {

constexpr long kIterationBudget = 200000;
constexpr int kMaxDepth = 64;

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

std::int64_t external_result(const std::string& name, const std::vector<std::int64_t>& args) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    for (auto a : args) h = (h ^ static_cast<std::uint64_t>(a)) * 1099511628211ULL;
    return static_cast<std::int64_t>(h % 17);
}

} // namespace

Interpreter::Interpreter(const AstTree& tree) : tree_(tree) {
    globals_.is_global = true;
    for (const AstNode* n : tree.preorder()) {
        if (n->kind == NodeKind::FunctionDef) functions_.emplace(n->name, n);
    }
}

RunResult Interpreter::run(const std::string& fn, const std::vector<std::int64_t>& args) {
    globals_.locals.clear();
    log_.clear();
    budget_ = kIterationBudget;
    depth_ = 0;
    RunResult r;
    try {
        try {
            exec_block(tree_.root(), 0, tree_.root().children.size(), globals_);
        } catch (const ReturnSignal&) {
        }
        auto it = functions_.find(fn);
        if (it == functions_.end()) throw Abort{"no function " + fn};
        r.value = invoke(*it->second, args);
    } catch (const Abort& a) {
        r.error = a.why;
    }
    r.log = log_;
    return r;
}

void Interpreter::tick() {
    if (--budget_ < 0) throw Abort{"iteration budget exhausted"};
}

std::int64_t Interpreter::lookup(const std::string& name, const Frame& f) const {
    if (auto it = f.locals.find(name); it != f.locals.end()) return it->second;
    if (auto it = globals_.locals.find(name); it != globals_.locals.end()) return it->second;
    return 0;
}

std::optional<std::int64_t> Interpreter::invoke(const AstNode& fn, const std::vector<std::int64_t>& args) {
    if (++depth_ > kMaxDepth) throw Abort{"recursion limit"};
    Frame f;
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
        f.locals[fn.params[i]] = i < args.size() ? args[i] : 0;
    }
    std::optional<std::int64_t> result;
    try {
        exec_block(fn, 0, fn.children.size(), f);
    } catch (const ReturnSignal& r) {
        result = r.value;
    }
    --depth_;
    return result;
}

void Interpreter::exec_block(const AstNode& owner, std::size_t begin, std::size_t end, Frame& f) {
    for (std::size_t i = begin; i < end; ++i) exec(owner.children[i], f);
}

void Interpreter::exec(const AstNode& s, Frame& f) {
    switch (s.kind) {
    case NodeKind::FunctionDef:
    case NodeKind::Import: return;
    case NodeKind::Assign: f.locals[s.name] = eval(*s.value, s, f); return;
    case NodeKind::Call: eval_call(s, f); return;
    case NodeKind::Return: {
        if (!s.value) throw ReturnSignal{std::nullopt};
        // a returned user-call result keeps None intact
        if (s.value->kind == Expr::Kind::CallRef) {
            throw ReturnSignal{call_value(s.children.at(static_cast<std::size_t>(s.value->call_index)), f)};
        }
        throw ReturnSignal{eval(*s.value, s, f)};
    }
    case NodeKind::If:
        if (eval_compare(s.children.at(0), f)) {
            exec_block(s, 1, s.body_end(), f);
        } else if (s.else_start) {
            exec_block(s, *s.else_start, s.children.size(), f);
        }
        return;
    case NodeKind::While:
        while (eval_compare(s.children.at(0), f)) {
            tick();
            exec_block(s, 1, s.children.size(), f);
        }
        return;
    case NodeKind::For: {
        const std::int64_t n = eval(*s.value, s, f);
        for (std::int64_t i = 0; i < n; ++i) {
            tick();
            f.locals[s.name] = i;
            exec_block(s, s.header_calls, s.children.size(), f);
        }
        return;
    }
    case NodeKind::Module:
    case NodeKind::Compare: return;
    }
}

bool Interpreter::eval_compare(const AstNode& cmp, Frame& f) {
    const std::int64_t a = eval(*cmp.value, cmp, f);
    const std::int64_t b = eval(*cmp.rhs, cmp, f);
    switch (cmp.op) {
    case CompareOp::Lt: return a < b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    }
    return false;
}

std::int64_t Interpreter::eval(const Expr& e, const AstNode& owner, Frame& f) {
    switch (e.kind) {
    case Expr::Kind::Int: return e.value;
    case Expr::Kind::Name: return lookup(e.name, f);
    case Expr::Kind::Binary: {
        const std::int64_t a = eval(e.operands[0], owner, f);
        const std::int64_t b = eval(e.operands[1], owner, f);
        if (e.op == '+') return wrap_add(a, b);
        if (e.op == '-') return wrap_sub(a, b);
        return wrap_mul(a, b);
    }
    case Expr::Kind::CallRef: return eval_call(owner.children.at(static_cast<std::size_t>(e.call_index)), f);
    }
    return 0;
}

std::int64_t Interpreter::eval_call(const AstNode& call, Frame& f) { return call_value(call, f).value_or(0); }

std::optional<std::int64_t> Interpreter::call_value(const AstNode& call, Frame& f) {
    std::vector<std::int64_t> args;
    for (const auto& a : call.args) args.push_back(eval(a, call, f));
    if (auto it = functions_.find(call.name); it != functions_.end()) return invoke(*it->second, args);
    std::string entry = call.name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) entry += ",";
        entry += std::to_string(args[i]);
    }
    log_.push_back(entry + ")");
    return external_result(call.name, args);
}

} // namespace astref::support
