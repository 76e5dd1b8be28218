#pragma once

#include <string>
#include <vector>

#include "memax/ir.hpp"
#include "memax/resolver.hpp"

namespace memax {

/// Stable JSON rendering of parsed matrices (keys: matrices, vectors,
/// limits, left, funcs, cmp, right, meta).
std::string ast_json(const Query& query);

/// Stable JSON rendering of resolved statements.
std::string resolved_json(const std::vector<ResolvedQuery>& statements);

}  // namespace memax
