#include "simflow/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace simflow::similarity {

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<std::string> rank_candidates(std::string_view query,
                                         const std::vector<std::string>& names,
                                         std::size_t k) {
  const std::string q = lower(query);
  std::set<std::string> seen;
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& name : names) {
    if (!seen.insert(name).second) continue;
    scored.emplace_back(edit_distance(q, lower(name)), name);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (const auto& [d, name] : scored) {
    if (out.size() >= k) break;
    out.push_back(name);
  }
  return out;
}

}  // namespace simflow::similarity
