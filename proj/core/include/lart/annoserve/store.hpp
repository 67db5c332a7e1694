#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lart/io/manifest.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::annoserve {

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class Conflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Status { Auto, InReview, Approved };
std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

/// Merge directive: every pixel of region `from` on `side` ("a" or "b")
/// belongs to region `into`.
struct RegionEdit {
  std::string side;
  Label from = 0;
  Label into = 0;
  bool operator==(const RegionEdit&) const = default;
};

struct AnnotationDoc {
  std::string pair_id;
  CorrSet corr;
  std::vector<RegionEdit> region_edits;
  Status status = Status::Auto;
  std::int64_t revision = 0;
};

nlohmann::json to_json(const AnnotationDoc& doc);
/// Throws BadRequest on malformed input.
AnnotationDoc doc_from_json(const nlohmann::json& j);

struct PairSummary {
  std::string id;
  Status status = Status::Auto;
  std::int64_t revision = 0;
};

/// Annotation documents of one dataset, one JSON file per pair under
/// `<dataset>/annotations/`. Writers use compare-and-set on the revision;
/// each accepted write is persisted with a temp file and atomic rename
/// before it becomes visible.
class Store {
 public:
  /// Loads `<dataset>/manifest.jsonl` and any saved documents. Pair ids are
  /// the zero-padded manifest line indices ("0000", "0001", ...).
  explicit Store(std::filesystem::path dataset_dir);

  std::vector<PairSummary> list() const;
  AnnotationDoc get(const std::string& id) const;
  const io::ManifestRecord& record(const std::string& id) const;
  /// Region map of one side; throws NotFound when the manifest has none.
  const RegionMap& regions(const std::string& id, char side) const;

  /// Replaces the correspondences iff `base_revision` is current. Throws
  /// Conflict for a stale revision or an approved document and BadRequest
  /// naming any region id missing from the pair's maps.
  AnnotationDoc put_corr(const std::string& id, std::int64_t base_revision, const CorrSet& corr,
                         const std::vector<RegionEdit>& edits);
  /// Marks the document approved (compare-and-set when a base is given).
  AnnotationDoc approve(const std::string& id, std::optional<std::int64_t> base_revision = std::nullopt);
  /// Returns an approved document to review.
  AnnotationDoc reopen(const std::string& id, std::optional<std::int64_t> base_revision = std::nullopt);

  std::filesystem::path doc_path(const std::string& id) const;

 private:
  struct Entry {
    io::ManifestRecord record;
    std::optional<RegionMap> regions_a, regions_b;
    mutable std::mutex mutex;
    AnnotationDoc doc;
  };

  Entry& entry(const std::string& id) const;
  void persist(const AnnotationDoc& doc) const;

  std::filesystem::path dir_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
};

}  // namespace lart::annoserve
