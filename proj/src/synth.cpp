#include "astref/corpus.hpp"
#include "astref/error.hpp"
#include "astref/parser.hpp"
#include "astref/rng.hpp"

#include <algorithm>
#include <cstdio>

namespace astref {

namespace {

constexpr const char* kModules[] = {"math", "os", "sys", "json", "re", "time", "io", "csv"};
constexpr const char* kModuleFns[] = {"floor", "path", "size", "load", "find", "clock", "read", "parse"};
constexpr const char* kLocals[] = {"acc", "t", "u", "v", "w", "s", "r", "m", "q", "z"};
constexpr const char* kSinks[] = {"log", "emit", "store", "push"};
constexpr const char* kCmp[] = {"<", ">", "<=", ">=", "==", "!="};

enum class Family { P1, P2, N1, N2, N3, N4, N5 };

using Lines = std::vector<std::string>;

// One function's text under construction. Statements are emitted as groups of
// lines so families can reorder whole top-level statements.
class FnWriter {
public:
    FnWriter(Rng& rng, std::vector<std::string> params, std::vector<std::string> modules,
             std::vector<std::string> helpers)
        : rng_(rng), vars_(std::move(params)), modules_(std::move(modules)), helpers_(std::move(helpers)) {}

    std::string pick_var() { return vars_[rng_.below(vars_.size())]; }

    std::string operand() {
        if (rng_.chance(0.25)) return std::to_string(rng_.range(0, 9));
        return pick_var();
    }

    std::string expr() {
        const auto roll = rng_.below(10);
        if (roll < 3) return operand();
        if (roll < 7) return pick_var() + " " + "+-*"[rng_.below(3)] + " " + operand();
        if (roll < 8 && !modules_.empty()) {
            const auto m = rng_.below(modules_.size());
            return modules_[m] + "." + kModuleFns[module_index(modules_[m])] + "(" + pick_var() + ")";
        }
        if (!helpers_.empty()) return helpers_[rng_.below(helpers_.size())] + "(" + operand() + ")";
        return pick_var() + " + 1";
    }

    std::string cond() { return pick_var() + " " + kCmp[rng_.below(6)] + " " + operand(); }

    Lines simple(int depth) {
        const std::string ind(static_cast<std::size_t>(depth) * 4, ' ');
        if (rng_.chance(0.3)) {
            return {ind + kSinks[rng_.below(4)] + "(" + operand() + ")"};
        }
        std::string target = kLocals[rng_.below(std::size(kLocals))];
        std::string line = ind + target + " = " + expr();
        if (std::find(vars_.begin(), vars_.end(), target) == vars_.end()) vars_.push_back(target);
        return {line};
    }

    // Statements holding exactly `d` decision nodes, none of them a loop at
    // this level when `loops` is false.
    std::vector<Lines> decisions(int d, int depth, bool loops) {
        std::vector<Lines> out;
        while (d > 0) {
            const int take = 1 + static_cast<int>(rng_.below(static_cast<std::uint64_t>(std::min(d, 3))));
            d -= take;
            out.push_back(compound(take, depth, loops));
            if (rng_.chance(0.4)) out.push_back(simple(depth));
        }
        return out;
    }

    // One If (or, when allowed, a nested loop) owning `d` decisions in total.
    Lines compound(int d, int depth, bool loop_ok) {
        const std::string ind(static_cast<std::size_t>(depth) * 4, ' ');
        Lines out;
        const bool as_loop = loop_ok && rng_.chance(0.2);
        if (as_loop) {
            out.push_back(ind + "for j in range(" + pick_var() + "):");
        } else {
            out.push_back(ind + "if " + cond() + ":");
        }
        int inner = d - 1;
        int then_part = inner;
        int else_part = 0;
        const bool has_else = !as_loop && rng_.chance(0.4);
        if (has_else && inner > 0) {
            else_part = static_cast<int>(rng_.below(static_cast<std::uint64_t>(inner) + 1));
            then_part = inner - else_part;
        }
        append_block(out, then_part, depth + 1);
        if (has_else) {
            out.push_back(ind + "else:");
            append_block(out, else_part, depth + 1);
        }
        return out;
    }

    void append_block(Lines& out, int d, int depth) {
        auto stmts = decisions(d, depth, true);
        if (stmts.empty() || rng_.chance(0.5)) stmts.insert(stmts.begin(), simple(depth));
        for (auto& s : stmts) out.insert(out.end(), s.begin(), s.end());
    }

    // Top-level loop with `d` decisions inside.
    Lines loop(int d, int depth) {
        const std::string ind(static_cast<std::size_t>(depth) * 4, ' ');
        Lines out;
        const bool is_while = rng_.chance(0.4);
        if (is_while) {
            out.push_back(ind + "k = 0");
            out.push_back(ind + "while k < " + pick_var() + ":");
        } else {
            out.push_back(ind + "for i in range(" + pick_var() + "):");
        }
        if (!is_while) vars_.push_back("i");
        auto stmts = decisions(d, depth + 1, true);
        if (stmts.empty() || rng_.chance(0.5)) stmts.insert(stmts.begin(), simple(depth + 1));
        if (!is_while) vars_.pop_back();
        for (auto& s : stmts) out.insert(out.end(), s.begin(), s.end());
        if (is_while) out.push_back(ind + "    k = k + 1");
        return out;
    }

private:
    static std::size_t module_index(const std::string& m) {
        for (std::size_t i = 0; i < std::size(kModules); ++i) {
            if (m == kModules[i]) return i;
        }
        return 0;
    }

    Rng& rng_;
    std::vector<std::string> vars_;
    std::vector<std::string> modules_;
    std::vector<std::string> helpers_;
};

std::vector<std::string> params_for(Rng& rng) {
    static const char* names[] = {"a", "b", "c", "n"};
    std::vector<std::string> p;
    const int count = rng.range(1, 3);
    for (int i = 0; i < count; ++i) p.emplace_back(names[i]);
    p.emplace_back("n");
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

void flatten(Lines& out, std::vector<Lines>& parts) {
    for (auto& s : parts) out.insert(out.end(), s.begin(), s.end());
}

// Shared skeleton of the loop families: `pre` statements, a loop holding
// `in_loop` decisions, then `post` statements with `post_decisions` more.
// Loop-last twins move `post` in front of the loop.
Lines loop_function(FnWriter& w, Rng& rng, int in_loop, int pre_decisions, int post_decisions, bool loop_last) {
    std::vector<Lines> pre;
    const int pre_simple = rng.range(1, 3);
    for (int i = 0; i < pre_simple; ++i) pre.push_back(w.simple(1));
    for (auto& s : w.decisions(pre_decisions, 1, false)) pre.push_back(std::move(s));
    Lines loop = w.loop(in_loop, 1);
    std::vector<Lines> post;
    const int post_simple = rng.range(1, 3);
    for (int i = 0; i < post_simple; ++i) post.push_back(w.simple(1));
    for (auto& s : w.decisions(post_decisions, 1, false)) post.push_back(std::move(s));

    Lines body;
    flatten(body, pre);
    if (loop_last) {
        flatten(body, post);
        body.insert(body.end(), loop.begin(), loop.end());
    } else {
        body.insert(body.end(), loop.begin(), loop.end());
        flatten(body, post);
    }
    return body;
}

Lines core_body(Family f, FnWriter& w, Rng& rng) {
    switch (f) {
    case Family::P1:
    case Family::N1:
    case Family::N2: {
        const int total = rng.range(2, 4);
        const int in_loop = f == Family::N2 ? static_cast<int>(rng.below(2)) : std::min(total, rng.range(2, 3));
        const int rest = total - in_loop;
        const int before = static_cast<int>(rng.below(static_cast<std::uint64_t>(rest) + 1));
        return loop_function(w, rng, in_loop, before, rest - before, f == Family::N1);
    }
    case Family::P2:
    case Family::N4: {
        const int total = rng.range(10, 16);
        const int in_loop = rng.range(4, 7);
        return loop_function(w, rng, in_loop, 0, total - in_loop, f == Family::N4);
    }
    case Family::N3: {
        const int total = rng.range(10, 16);
        const int in_loop = static_cast<int>(rng.below(2));
        const int before = rng.range(2, total - in_loop - 2);
        return loop_function(w, rng, in_loop, before, total - in_loop - before, rng.chance(0.5));
    }
    case Family::N5:
        break;
    }
    Lines body;
    const int count = rng.range(2, 5);
    for (int i = 0; i < count; ++i) {
        auto s = w.simple(1);
        body.insert(body.end(), s.begin(), s.end());
    }
    if (rng.chance(0.4)) {
        auto s = w.compound(1, 1, false);
        body.insert(body.begin() + 1, s.begin(), s.end());
    }
    return body;
}

Family pick_family(Rng& rng) {
    const auto roll = rng.below(100);
    if (roll < 20) return Family::P1;
    if (roll < 35) return Family::P2;
    if (roll < 50) return Family::N1;
    if (roll < 65) return Family::N2;
    if (roll < 80) return Family::N3;
    if (roll < 90) return Family::N4;
    return Family::N5;
}

std::string program(Rng& rng, int index) {
    std::vector<std::string> modules;
    const int imports = rng.chance(0.06) ? rng.range(6, 7) : rng.range(0, 3);
    std::vector<std::size_t> order(std::size(kModules));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (int i = 0; i < imports; ++i) modules.emplace_back(kModules[order[static_cast<std::size_t>(i)]]);
    std::sort(modules.begin(), modules.end());

    const int fillers = static_cast<int>(rng.below(3));
    std::vector<std::string> helpers;
    for (int i = 0; i < fillers; ++i) helpers.push_back("helper" + std::to_string(i));

    std::vector<Lines> functions;
    for (int i = 0; i < fillers; ++i) {
        FnWriter w(rng, {"x"}, modules, {});
        Lines fn = {"def " + helpers[static_cast<std::size_t>(i)] + "(x):"};
        Lines body = core_body(Family::N5, w, rng);
        if (rng.chance(0.5)) body.push_back("    return " + w.pick_var());
        fn.insert(fn.end(), body.begin(), body.end());
        functions.push_back(std::move(fn));
    }
    const Family f = pick_family(rng);
    const auto params = params_for(rng);
    FnWriter w(rng, params, modules, helpers);
    std::string header = "def process" + std::to_string(index) + "(";
    for (std::size_t i = 0; i < params.size(); ++i) header += (i ? ", " : "") + params[i];
    Lines fn = {header + "):"};
    Lines body = core_body(f, w, rng);
    fn.insert(fn.end(), body.begin(), body.end());
    const auto at = static_cast<std::ptrdiff_t>(rng.below(functions.size() + 1));
    functions.insert(functions.begin() + at, std::move(fn));

    std::string text;
    for (const auto& m : modules) text += "import " + m + "\n";
    for (const auto& fnl : functions) {
        if (!text.empty()) text += "\n";
        for (const auto& l : fnl) text += l + "\n";
    }
    return text;
}

} // namespace

std::vector<SynthProgram> synth_programs(int n, std::uint64_t seed) {
    if (n < 10) throw Error("synth needs n >= 10");
    Rng rng(seed);
    std::vector<SynthProgram> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        char path[32];
        std::snprintf(path, sizeof path, "synth/%05d.mpy", i);
        SynthProgram p{path, program(rng, i), {}};
        p.label = structural_label(parse_source(p.source));
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace astref
