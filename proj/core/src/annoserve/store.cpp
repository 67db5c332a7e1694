#include "lart/annoserve/store.hpp"

#include <cstdio>
#include <fstream>

#include "lart/error.hpp"
#include "lart/io/formats.hpp"

namespace lart::annoserve {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Auto: return "auto";
    case Status::InReview: return "in_review";
    case Status::Approved: return "approved";
  }
  return "?";
}

Status status_from_string(std::string_view s) {
  if (s == "auto") return Status::Auto;
  if (s == "in_review") return Status::InReview;
  if (s == "approved") return Status::Approved;
  throw BadRequest("unknown status \"" + std::string(s) + "\"");
}

json to_json(const AnnotationDoc& doc) {
  json edits = json::array();
  for (const auto& e : doc.region_edits) edits.push_back({{"side", e.side}, {"from", e.from}, {"into", e.into}});
  return {{"pair_id", doc.pair_id},
          {"corr", io::corr_to_json(doc.corr)},
          {"region_edits", edits},
          {"status", std::string(to_string(doc.status))},
          {"revision", doc.revision}};
}

namespace {

std::vector<RegionEdit> edits_from_json(const json& j) {
  if (!j.is_array()) throw BadRequest("\"region_edits\" must be an array");
  std::vector<RegionEdit> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("side") || !e.contains("from") || !e.contains("into") ||
        !e.at("side").is_string() || !e.at("from").is_number_unsigned() || !e.at("into").is_number_unsigned()) {
      throw BadRequest("region edit needs \"side\", \"from\" and \"into\"");
    }
    RegionEdit r{e.at("side").get<std::string>(), 0, 0};
    const auto from = e.at("from").get<std::uint64_t>(), into = e.at("into").get<std::uint64_t>();
    if (r.side != "a" && r.side != "b") throw BadRequest("region edit side must be \"a\" or \"b\"");
    if (from < 1 || from > 65535 || into < 1 || into > 65535) throw BadRequest("region edit ids must be in 1..65535");
    r.from = static_cast<Label>(from);
    r.into = static_cast<Label>(into);
    out.push_back(r);
  }
  return out;
}

CorrSet corr_or_bad_request(const json& j) {
  try {
    return io::corr_from_json(j);
  } catch (const DataError& e) {
    throw BadRequest(e.what());
  }
}

}  // namespace

AnnotationDoc doc_from_json(const json& j) {
  if (!j.is_object()) throw BadRequest("annotation document must be an object");
  AnnotationDoc d;
  try {
    d.pair_id = j.at("pair_id").get<std::string>();
    d.revision = j.at("revision").get<std::int64_t>();
    d.status = status_from_string(j.at("status").get<std::string>());
  } catch (const json::exception& e) {
    throw BadRequest(std::string("annotation document: ") + e.what());
  }
  d.corr = corr_or_bad_request(j.contains("corr") ? j.at("corr") : json());
  if (j.contains("region_edits")) d.region_edits = edits_from_json(j.at("region_edits"));
  return d;
}

Store::Store(fs::path dataset_dir) : dir_(std::move(dataset_dir)) {
  const auto records = io::read_manifest(dir_ / "manifest.jsonl");
  for (std::size_t i = 0; i < records.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "%04zu", i);
    auto e = std::make_unique<Entry>();
    e->record = records[i];
    if (e->record.regions_a) e->regions_a = io::read_region_map(*e->record.regions_a);
    if (e->record.regions_b) e->regions_b = io::read_region_map(*e->record.regions_b);
    const fs::path saved = doc_path(name);
    if (fs::exists(saved)) {
      try {
        e->doc = doc_from_json(io::read_json(saved));
      } catch (const BadRequest& err) {
        throw DataError(saved.string() + ": " + err.what());
      }
      if (e->doc.pair_id != name) throw DataError(saved.string() + ": pair_id does not match the file name");
    } else {
      e->doc.pair_id = name;
      if (e->record.corr) e->doc.corr = io::read_corr(*e->record.corr);
    }
    entries_.emplace(name, std::move(e));
  }
}

fs::path Store::doc_path(const std::string& id) const { return dir_ / "annotations" / (id + ".json"); }

Store::Entry& Store::entry(const std::string& id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw NotFound("unknown pair \"" + id + "\"");
  return *it->second;
}

std::vector<PairSummary> Store::list() const {
  std::vector<PairSummary> out;
  for (const auto& [id, e] : entries_) {
    std::lock_guard lock(e->mutex);
    out.push_back({id, e->doc.status, e->doc.revision});
  }
  return out;
}

AnnotationDoc Store::get(const std::string& id) const {
  auto& e = entry(id);
  std::lock_guard lock(e.mutex);
  return e.doc;
}

const io::ManifestRecord& Store::record(const std::string& id) const { return entry(id).record; }

const RegionMap& Store::regions(const std::string& id, char side) const {
  const auto& e = entry(id);
  const auto& m = side == 'a' ? e.regions_a : e.regions_b;
  if (!m) throw NotFound("pair \"" + id + "\" has no region map for side " + std::string(1, side));
  return *m;
}

void Store::persist(const AnnotationDoc& doc) const {
  const fs::path target = doc_path(doc.pair_id);
  fs::path tmp = target;
  tmp += ".tmp";
  fs::create_directories(target.parent_path());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(doc).dump(2) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed to write " + tmp.string());
  }
  fs::rename(tmp, target);
}

AnnotationDoc Store::put_corr(const std::string& id, std::int64_t base_revision, const CorrSet& corr,
                              const std::vector<RegionEdit>& edits) {
  auto& e = entry(id);
  // Validation needs no lock: region maps are immutable.
  if (e.regions_a && e.regions_b) {
    try {
      corr.validate(*e.regions_a, *e.regions_b);
    } catch (const std::invalid_argument& err) {
      throw BadRequest(err.what());
    }
  }
  for (const auto& ed : edits) {
    const auto& m = ed.side == "a" ? e.regions_a : e.regions_b;
    if (!m) continue;
    for (Label id_ : {ed.from, ed.into}) {
      if (!m->contains(id_)) throw BadRequest("region edit references unknown region " + std::to_string(id_) + " in image " + ed.side);
    }
  }
  std::lock_guard lock(e.mutex);
  if (e.doc.revision != base_revision) {
    throw Conflict("stale revision " + std::to_string(base_revision) + ", current is " + std::to_string(e.doc.revision));
  }
  if (e.doc.status == Status::Approved) throw Conflict("pair \"" + id + "\" is approved; reopen it first");
  AnnotationDoc next = e.doc;
  next.corr = corr;
  next.corr.set_unmatched({}, {});
  if (e.regions_a && e.regions_b) next.corr.fill_unmatched(*e.regions_a, *e.regions_b);
  next.region_edits = edits;
  next.status = Status::InReview;
  next.revision += 1;
  persist(next);
  e.doc = next;
  return next;
}

AnnotationDoc Store::approve(const std::string& id, std::optional<std::int64_t> base_revision) {
  auto& e = entry(id);
  std::lock_guard lock(e.mutex);
  if (base_revision && *base_revision != e.doc.revision) {
    throw Conflict("stale revision " + std::to_string(*base_revision) + ", current is " + std::to_string(e.doc.revision));
  }
  if (e.doc.status == Status::Approved) return e.doc;
  AnnotationDoc next = e.doc;
  next.status = Status::Approved;
  next.revision += 1;
  persist(next);
  e.doc = next;
  return next;
}

AnnotationDoc Store::reopen(const std::string& id, std::optional<std::int64_t> base_revision) {
  auto& e = entry(id);
  std::lock_guard lock(e.mutex);
  if (base_revision && *base_revision != e.doc.revision) {
    throw Conflict("stale revision " + std::to_string(*base_revision) + ", current is " + std::to_string(e.doc.revision));
  }
  if (e.doc.status != Status::Approved) return e.doc;
  AnnotationDoc next = e.doc;
  next.status = Status::InReview;
  next.revision += 1;
  persist(next);
  e.doc = next;
  return next;
}

}  // namespace lart::annoserve
