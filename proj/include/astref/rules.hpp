#pragma once

#include "astref/metrics.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace astref {

enum class Rule : std::uint8_t { LongMethod = 0, HighComplexity, HighCoupling };

std::string_view to_string(Rule rule);

/// Flag when the measured value is strictly greater than the threshold.
struct RuleThresholds {
    double method_lines = 20;
    double cyclomatic = 10;
    double module_coupling = 5;
};

struct Finding {
    Rule rule = Rule::LongMethod;
    int target = -1;          // FunctionDef node id; -1 for the module
    std::string target_name;  // function name or "<module>"
    double measured = 0;
    double threshold = 0;
    std::string suggestion;
};

/// Findings ordered by (rule, target id). Rules name the offending function
/// only; they never propose a location to split.
std::vector<Finding> analyze_rules(const AstTree& tree, const ProjectIndex& project = {},
                                   std::string_view self_path = {},
                                   const RuleThresholds& thresholds = {});

/// 1 (refactor) iff any rule fires.
int classify_rules(const AstTree& tree, const ProjectIndex& project = {},
                   std::string_view self_path = {}, const RuleThresholds& thresholds = {});

} // namespace astref
