#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simflow/result.hpp"
#include "simflow/types.hpp"

namespace simflow::store {

enum class Kind { Network, Routes, Config, Tripinfo, Summary };

inline constexpr int kKindCount = 5;

std::string_view to_token(Kind k);
std::optional<Kind> kind_from_token(std::string_view token);

struct Artifact {
  std::string artifact_id;  // "art-0001", assigned in registration order
  Kind kind = Kind::Network;
  std::string path;  // relative to the run directory
  std::string content_hash;
  std::string producer_role;
  int step_id = 0;
  int iteration = 1;
  std::vector<std::string> parents;
  std::uint64_t created_at_us = 0;
  std::uint64_t seq = 0;

  nlohmann::json to_json() const;
};

enum class ErrorCode {
  MissingFile,
  EmptyFile,
  InvalidContent,
  UnknownParent,
  DuplicateRegistration,
  BadParents,
  UnknownArtifact,
  ManifestError,
};

struct Error {
  ErrorCode code;
  std::string detail;
};

std::string_view to_string(ErrorCode code);

struct DependencyCheck {
  bool satisfied = true;
  std::vector<Kind> missing;
};

// Pure form of the dependency rule table; `present` is the set of artifact
// kinds currently available.
DependencyCheck check_dependencies_against(Action action, const std::set<Kind>& present);
const std::vector<Kind>& required_kinds(Action action);

// Append-only registry of produced files, persisted as a JSON-lines manifest
// (`artifacts.jsonl`) inside the run directory. A newer artifact of a kind
// supersedes older ones; nothing is deleted, so lineage stays auditable.
// `latest` is scoped to the current iteration: each replanning round starts
// from an empty working set while prior files remain on disk.
class ArtifactStore {
 public:
  // Creates the run directory and manifest if needed; replays an existing
  // manifest so a reloaded store reproduces identical ids, hashes and lineage.
  static Result<ArtifactStore, Error> open(std::filesystem::path run_dir, Clock* clock);

  Result<Artifact, Error> put(Kind kind, const std::string& relative_path,
                              const std::string& producer_role, int step_id,
                              const std::vector<std::string>& parents);

  std::optional<Artifact> latest(Kind kind) const;
  DependencyCheck check_dependencies(Action action) const;

  // All transitive ancestors plus the artifact itself, in registration order
  // (parents always precede children).
  Result<std::vector<Artifact>, Error> lineage(const std::string& artifact_id) const;

  void begin_iteration(int iteration);
  int iteration() const { return iteration_; }

  const std::vector<Artifact>& artifacts() const { return artifacts_; }
  std::vector<Artifact> artifacts_of_iteration(int iteration) const;
  const std::filesystem::path& run_dir() const { return run_dir_; }
  std::filesystem::path manifest_path() const;

  // Re-hashes every registered file; returns ids whose bytes changed.
  std::vector<std::string> verify() const;

  // Picks the next free file name for a kind: the canonical name first
  // (net.net.xml, routes.rou.xml, sim.sumocfg, tripinfo.xml, summary.xml),
  // then numbered variants for superseding artifacts.
  std::string allocate_path(Kind kind) const;

 private:
  ArtifactStore(std::filesystem::path run_dir, Clock* clock) : run_dir_(std::move(run_dir)), clock_(clock) {}

  Result<bool, Error> append_manifest(const Artifact& a);

  std::filesystem::path run_dir_;
  Clock* clock_ = nullptr;
  std::vector<Artifact> artifacts_;
  std::map<std::string, std::size_t> by_id_;
  int iteration_ = 1;
  std::uint64_t next_seq_ = 1;
  std::uint64_t last_created_us_ = 0;
};

}  // namespace simflow::store
