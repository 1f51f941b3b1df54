#include "simflow/event_log.hpp"

#include <fstream>

namespace simflow::orch {

EventLog::EventLog(std::filesystem::path file, Clock* clock) : file_(std::move(file)), clock_(clock) {
  std::ofstream out(file_, std::ios::trunc);  // fresh log per run
}

void EventLog::emit(const std::string& event, nlohmann::json fields) {
  fields["event"] = event;
  fields["ts_us"] = clock_ ? clock_->now_us() : 0;
  std::ofstream out(file_, std::ios::app);
  if (out) out << fields.dump() << "\n";
}

std::vector<nlohmann::json> EventLog::read_all(const std::filesystem::path& file) {
  std::vector<nlohmann::json> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_discarded()) out.push_back(std::move(j));
  }
  return out;
}

}  // namespace simflow::orch
