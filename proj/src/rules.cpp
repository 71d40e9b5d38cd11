#include "astref/rules.hpp"

#include <algorithm>
#include <tuple>

namespace astref {

std::string_view to_string(Rule rule) {
    switch (rule) {
    case Rule::LongMethod: return "LongMethod";
    case Rule::HighComplexity: return "HighComplexity";
    case Rule::HighCoupling: return "HighCoupling";
    }
    return "?";
}

std::vector<Finding> analyze_rules(const AstTree& tree, const ProjectIndex& project,
                                   std::string_view self_path, const RuleThresholds& thresholds) {
    std::vector<Finding> out;
    for (const AstNode* n : tree.preorder()) {
        if (n->kind != NodeKind::FunctionDef) continue;
        const double lines = n->span.end > 0 ? n->span.end - n->span.start + 1 : 0;
        if (lines > thresholds.method_lines) {
            out.push_back({Rule::LongMethod, n->id, n->name, lines, thresholds.method_lines,
                           "extract method: '" + n->name + "' is too long"});
        }
        const double cc = cyclomatic(*n);
        if (cc > thresholds.cyclomatic) {
            out.push_back({Rule::HighComplexity, n->id, n->name, cc, thresholds.cyclomatic,
                           "extract method: '" + n->name + "' is too complex"});
        }
    }
    const double c = coupling(tree, project, self_path);
    if (c > thresholds.module_coupling) {
        out.push_back({Rule::HighCoupling, -1, "<module>", c, thresholds.module_coupling,
                       "reduce dependencies"});
    }
    std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.rule, a.target) < std::tie(b.rule, b.target);
    });
    return out;
}

int classify_rules(const AstTree& tree, const ProjectIndex& project, std::string_view self_path,
                   const RuleThresholds& thresholds) {
    return analyze_rules(tree, project, self_path, thresholds).empty() ? 0 : 1;
}

} // namespace astref
