/**
 * @file oracle.hpp
 * @brief Naive reference evaluator used as ground truth
 */

#pragma once

#include "ehrgate/policy/types.hpp"

#include <span>

namespace ehrgate::policy {

/**
 * @brief Reference decision for a file-access request.
 *
 * Scans every raw tuple for every catalog field one at a time. Takes the
 * unmerged tuple list and never touches PolicyTable, so it shares no code
 * path with evaluate_access().
 */
AccessDecision oracle_evaluate(const AccessRequest& request,
                               const User& requester,
                               std::span<const PolicyTuple> tuples);

} // namespace ehrgate::policy
