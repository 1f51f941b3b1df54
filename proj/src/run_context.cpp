#include "simflow/run_context.hpp"

namespace simflow::orch {

void RunContext::append_entry(int iter_, std::string kind, nlohmann::json payload) {
  entries_.push_back(ContextEntry{iter_, std::move(kind), std::move(payload)});
}

std::string RunContext::serialize_entries() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries_) {
    arr.push_back(nlohmann::json{{"iter", e.iter}, {"kind", e.kind}, {"payload", e.payload}});
  }
  return arr.dump();
}

void RunContext::add_tokens(long long in, long long out) {
  tokens_in_ += in;
  tokens_out_ += out;
}

void RunContext::mark_first_kpi(std::uint64_t now_us) {
  if (!first_kpi_us_) first_kpi_us_ = now_us;
}

std::optional<double> RunContext::tti_seconds() const {
  if (!first_kpi_us_) return std::nullopt;
  return static_cast<double>(*first_kpi_us_ - start_us_) / 1e6;
}

}  // namespace simflow::orch
