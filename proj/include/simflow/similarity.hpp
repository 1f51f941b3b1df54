#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace simflow::similarity {

// Classic Levenshtein edit distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

// Ranks `names` by case-insensitive edit distance to `query` and returns the
// closest `k` distinct entries. Ties break lexicographically so the output is
// deterministic.
std::vector<std::string> rank_candidates(std::string_view query,
                                         const std::vector<std::string>& names,
                                         std::size_t k = 3);

}  // namespace simflow::similarity
