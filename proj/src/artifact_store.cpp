#include "simflow/artifact_store.hpp"

#include <algorithm>
#include <fstream>

#include "simflow/sha256.hpp"
#include "simflow/xml.hpp"

namespace simflow::store {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_token(Kind k) {
  switch (k) {
    case Kind::Network: return "network";
    case Kind::Routes: return "routes";
    case Kind::Config: return "config";
    case Kind::Tripinfo: return "tripinfo";
    case Kind::Summary: return "summary";
  }
  return "?";
}

std::optional<Kind> kind_from_token(std::string_view token) {
  if (token == "network") return Kind::Network;
  if (token == "routes") return Kind::Routes;
  if (token == "config") return Kind::Config;
  if (token == "tripinfo") return Kind::Tripinfo;
  if (token == "summary") return Kind::Summary;
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::InvalidContent: return "InvalidContent";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::DuplicateRegistration: return "DuplicateRegistration";
    case ErrorCode::BadParents: return "BadParents";
    case ErrorCode::UnknownArtifact: return "UnknownArtifact";
    case ErrorCode::ManifestError: return "ManifestError";
  }
  return "?";
}

json Artifact::to_json() const {
  return json{{"artifact_id", artifact_id},
              {"kind", std::string(to_token(kind))},
              {"path", path},
              {"content_hash", content_hash},
              {"producer_role", producer_role},
              {"step_id", step_id},
              {"iteration", iteration},
              {"parents", parents},
              {"created_at_us", created_at_us},
              {"seq", seq}};
}

const std::vector<Kind>& required_kinds(Action action) {
  static const std::vector<Kind> kNone;
  static const std::vector<Kind> kNet = {Kind::Network};
  static const std::vector<Kind> kNetRoutes = {Kind::Network, Kind::Routes};
  static const std::vector<Kind> kTrip = {Kind::Tripinfo};
  switch (action) {
    case Action::GenDemand: return kNet;
    case Action::Modify: return kNet;
    case Action::Run: return kNetRoutes;
    case Action::Analyze: return kTrip;
    case Action::BuildNet:
    case Action::Stop: return kNone;
  }
  return kNone;
}

DependencyCheck check_dependencies_against(Action action, const std::set<Kind>& present) {
  DependencyCheck out;
  for (Kind k : required_kinds(action)) {
    if (!present.count(k)) out.missing.push_back(k);
  }
  out.satisfied = out.missing.empty();
  return out;
}

Result<ArtifactStore, Error> ArtifactStore::open(fs::path run_dir, Clock* clock) {
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) return Error{ErrorCode::ManifestError, "cannot create run dir: " + run_dir.string()};
  ArtifactStore store(std::move(run_dir), clock);
  fs::path manifest = store.manifest_path();
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    if (!in) return Error{ErrorCode::ManifestError, "cannot read manifest"};
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) return Error{ErrorCode::ManifestError, "malformed manifest line"};
      if (!header_seen) {
        header_seen = true;
        if (j.value("manifest", "") != "simflow-artifacts") {
          return Error{ErrorCode::ManifestError, "unexpected manifest header"};
        }
        continue;
      }
      Artifact a;
      a.artifact_id = j.value("artifact_id", "");
      auto kind = kind_from_token(j.value("kind", ""));
      if (!kind) return Error{ErrorCode::ManifestError, "unknown kind in manifest"};
      a.kind = *kind;
      a.path = j.value("path", "");
      a.content_hash = j.value("content_hash", "");
      a.producer_role = j.value("producer_role", "");
      a.step_id = j.value("step_id", 0);
      a.iteration = j.value("iteration", 1);
      for (const auto& p : j.value("parents", json::array())) a.parents.push_back(p.get<std::string>());
      a.created_at_us = j.value("created_at_us", std::uint64_t{0});
      a.seq = j.value("seq", std::uint64_t{0});
      store.by_id_[a.artifact_id] = store.artifacts_.size();
      store.next_seq_ = std::max(store.next_seq_, a.seq + 1);
      store.last_created_us_ = std::max(store.last_created_us_, a.created_at_us);
      store.iteration_ = std::max(store.iteration_, a.iteration);
      store.artifacts_.push_back(std::move(a));
    }
  } else {
    std::ofstream out(manifest);
    if (!out) return Error{ErrorCode::ManifestError, "cannot create manifest"};
    out << json{{"manifest", "simflow-artifacts"}, {"version", 1}, {"hash", "sha256"}}.dump() << "\n";
  }
  return store;
}

fs::path ArtifactStore::manifest_path() const { return run_dir_ / "artifacts.jsonl"; }

Result<bool, Error> ArtifactStore::append_manifest(const Artifact& a) {
  std::ofstream out(manifest_path(), std::ios::app);
  if (!out) return Error{ErrorCode::ManifestError, "cannot append to manifest"};
  out << a.to_json().dump() << "\n";
  return true;
}

Result<Artifact, Error> ArtifactStore::put(Kind kind, const std::string& relative_path,
                                           const std::string& producer_role, int step_id,
                                           const std::vector<std::string>& parents) {
  fs::path full = run_dir_ / relative_path;
  if (!fs::exists(full)) return Error{ErrorCode::MissingFile, relative_path};
  std::error_code ec;
  auto size = fs::file_size(full, ec);
  if (ec) return Error{ErrorCode::MissingFile, relative_path};
  if (size == 0) return Error{ErrorCode::EmptyFile, relative_path};

  // Every tracked kind is an XML document; registration validates
  // well-formedness so downstream consumers never see a torn file.
  auto doc = xml::parse_file(full);
  if (!doc) {
    return Error{ErrorCode::InvalidContent, relative_path + ": " + doc.error().message};
  }

  for (const auto& pid : parents) {
    if (!by_id_.count(pid)) return Error{ErrorCode::UnknownParent, pid};
  }
  if (kind == Kind::Config) {
    int nets = 0, routes = 0;
    for (const auto& pid : parents) {
      Kind pk = artifacts_[by_id_.at(pid)].kind;
      if (pk == Kind::Network) ++nets;
      if (pk == Kind::Routes) ++routes;
    }
    if (nets != 1 || routes != 1 || parents.size() != 2) {
      return Error{ErrorCode::BadParents, "config requires exactly one network and one routes parent"};
    }
  }

  auto hash = crypto::sha256_file_hex(full);
  if (!hash) return Error{ErrorCode::MissingFile, relative_path};
  // Same content at the same step within one iteration is an accidental
  // double registration; identical rebuilds across iterations are expected.
  for (const auto& a : artifacts_) {
    if (a.kind == kind && a.step_id == step_id && a.iteration == iteration_ &&
        a.content_hash == *hash) {
      return Error{ErrorCode::DuplicateRegistration,
                   "artifact with identical kind, step and content already registered: " + a.artifact_id};
    }
  }

  Artifact a;
  a.seq = next_seq_++;
  char idbuf[16];
  std::snprintf(idbuf, sizeof idbuf, "art-%04llu", static_cast<unsigned long long>(a.seq));
  a.artifact_id = idbuf;
  a.kind = kind;
  a.path = relative_path;
  a.content_hash = *hash;
  a.producer_role = producer_role;
  a.step_id = step_id;
  a.iteration = iteration_;
  a.parents = parents;
  std::uint64_t now = clock_ ? clock_->now_us() : 0;
  a.created_at_us = std::max(now, last_created_us_ + 1);
  last_created_us_ = a.created_at_us;

  auto appended = append_manifest(a);
  if (!appended) return appended.error();
  by_id_[a.artifact_id] = artifacts_.size();
  artifacts_.push_back(a);
  return a;
}

std::optional<Artifact> ArtifactStore::latest(Kind kind) const {
  for (auto it = artifacts_.rbegin(); it != artifacts_.rend(); ++it) {
    if (it->kind == kind && it->iteration == iteration_) return *it;
  }
  return std::nullopt;
}

DependencyCheck ArtifactStore::check_dependencies(Action action) const {
  std::set<Kind> present;
  for (const auto& a : artifacts_) {
    if (a.iteration == iteration_) present.insert(a.kind);
  }
  return check_dependencies_against(action, present);
}

Result<std::vector<Artifact>, Error> ArtifactStore::lineage(const std::string& artifact_id) const {
  auto it = by_id_.find(artifact_id);
  if (it == by_id_.end()) return Error{ErrorCode::UnknownArtifact, artifact_id};
  std::set<std::uint64_t> seen;
  std::vector<std::size_t> stack = {it->second};
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    const Artifact& a = artifacts_[idx];
    if (!seen.insert(a.seq).second) continue;
    for (const auto& pid : a.parents) stack.push_back(by_id_.at(pid));
  }
  std::vector<Artifact> out;
  for (const auto& a : artifacts_) {
    if (seen.count(a.seq)) out.push_back(a);
  }
  return out;
}

void ArtifactStore::begin_iteration(int iteration) { iteration_ = iteration; }

std::vector<Artifact> ArtifactStore::artifacts_of_iteration(int iteration) const {
  std::vector<Artifact> out;
  for (const auto& a : artifacts_) {
    if (a.iteration == iteration) out.push_back(a);
  }
  return out;
}

std::vector<std::string> ArtifactStore::verify() const {
  std::vector<std::string> changed;
  for (const auto& a : artifacts_) {
    auto hash = crypto::sha256_file_hex(run_dir_ / a.path);
    if (!hash || *hash != a.content_hash) changed.push_back(a.artifact_id);
  }
  return changed;
}

std::string ArtifactStore::allocate_path(Kind kind) const {
  struct Naming {
    const char* stem;
    const char* ext;
  };
  Naming naming{};
  switch (kind) {
    case Kind::Network: naming = {"net", ".net.xml"}; break;
    case Kind::Routes: naming = {"routes", ".rou.xml"}; break;
    case Kind::Config: naming = {"sim", ".sumocfg"}; break;
    case Kind::Tripinfo: naming = {"tripinfo", ".xml"}; break;
    case Kind::Summary: naming = {"summary", ".xml"}; break;
  }
  std::string candidate = std::string(naming.stem) + naming.ext;
  int n = 2;
  while (fs::exists(run_dir_ / candidate)) {
    candidate = std::string(naming.stem) + "." + std::to_string(n++) + naming.ext;
  }
  return candidate;
}

}  // namespace simflow::store
