#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "simflow/types.hpp"

namespace simflow::orch {

// Structured run log: one JSON object per line in events.jsonl, covering
// plans, steps, backend calls, feedback injections and the final outcome.
class EventLog {
 public:
  EventLog(std::filesystem::path file, Clock* clock);

  void emit(const std::string& event, nlohmann::json fields);

  const std::filesystem::path& path() const { return file_; }

  // Loads every event line from an existing log.
  static std::vector<nlohmann::json> read_all(const std::filesystem::path& file);

 private:
  std::filesystem::path file_;
  Clock* clock_;
};

}  // namespace simflow::orch
