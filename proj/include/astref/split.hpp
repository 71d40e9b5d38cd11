#pragma once

#include "astref/ast.hpp"

#include <string>
#include <vector>

namespace astref {

struct SplitPlan {
    std::string tail_name;
    std::vector<std::string> live_vars;
};

/// Plans an extract-method split of FunctionDef `fn_id` after its first `k`
/// body statements. Live variables are names read in the tail where no
/// unconditional tail assignment precedes the read, restricted to parameters
/// and names assigned in the head, in first-use order. Throws SplitError.
SplitPlan plan_split(const AstTree& tree, int fn_id, std::size_t k);

/// Applies the split: the function keeps statements 1..k followed by
/// `return <fn>_tail(<live vars>)`; a new `<fn>_tail` FunctionDef holding the
/// remaining statements is inserted right after it. The result is re-laid-out
/// (spans and ids as if freshly printed and parsed).
AstTree extract_split(const AstTree& tree, int fn_id, std::size_t k);

} // namespace astref
