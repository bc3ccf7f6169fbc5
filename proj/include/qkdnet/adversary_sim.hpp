#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qkdnet/flood_engine.hpp"

namespace qkdnet {

/// Dense vector over GF(2).
class Gf2Vector {
 public:
  Gf2Vector() = default;
  explicit Gf2Vector(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }
  bool is_zero() const;
  /// Index of the lowest set bit, or size() when zero.
  std::size_t lowest() const;
  Gf2Vector& operator^=(const Gf2Vector& other);

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Assigns one GF(2) variable to every bit of every key of a run.
class VariableIndex {
 public:
  VariableIndex() = default;
  explicit VariableIndex(const KeyRing& keys);

  std::size_t size() const noexcept { return total_; }
  std::size_t variable(const std::string& key_id, std::size_t bit) const;
  bool contains(const std::string& key_id) const { return offsets_.contains(key_id); }
  std::size_t key_length(const std::string& key_id) const;
  const std::map<std::string, std::pair<std::size_t, std::size_t>>& keys() const {
    return offsets_;
  }

 private:
  std::map<std::string, std::pair<std::size_t, std::size_t>> offsets_;  // offset, length
  std::size_t total_ = 0;
};

/// Linear facts a principal holds, kept in reduced row-echelon form.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(const VariableIndex& index) : index_(&index) {}

  /// Adds `row = value`; returns true when the rank grew.
  bool add(Gf2Vector row, bool value);
  void ingest_key(const KeyMaterial& key);
  void ingest_transcript(const Transcript& transcript);

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t variables() const noexcept { return index_->size(); }

  bool can_derive(const Gf2Vector& expr) const;
  bool can_derive(const std::vector<Gf2Vector>& expr) const;
  bool can_derive_key(const std::string& key_id) const;
  /// Value of a derivable expression.
  std::optional<bool> evaluate(const Gf2Vector& expr) const;

  const VariableIndex& index() const { return *index_; }

 private:
  bool reduce(Gf2Vector& row, bool& value) const;

  const VariableIndex* index_;
  std::map<std::size_t, std::pair<Gf2Vector, bool>> rows_;  // pivot -> row
};

struct AdversaryModel {
  enum class Mode {
    Trusted,     // each member reads what passes through it, alone
    Dishonest,   // members publish all their key material
    Collective,  // members pool knowledge (bounded by c_a), publish nothing
  };

  Mode mode = Mode::Collective;
  std::set<std::string> members;
  std::size_t bound = 0;

  /// Observer of the public transcript only.
  static AdversaryModel eavesdropper() { return {}; }
};

std::string to_string(AdversaryModel::Mode mode);

/// Everything a run leaves behind: all link keys (with their bits as
/// initially shared), the public transcript and the end users.
struct RunRecord {
  KeyRing keys;
  Transcript transcript;
  std::string source;
  std::string sink;
};

/// Linear expression of each bit of a key assembled from shared fragments.
std::vector<Gf2Vector> rate_key_expression(const VariableIndex& index,
                                           std::span<const KeyMaterial> shared);
std::vector<Gf2Vector> secure_key_expression(const VariableIndex& index,
                                             std::span<const KeyMaterial> shared);

struct AuditVerdict {
  bool compromised = false;
  std::string culprit;  // principal that derives the key, if any
  std::vector<std::string> derivable_key_ids;  // by the coalition
  std::size_t coalition_rank = 0;
  std::size_t variables = 0;
  std::size_t derivable_bits = 0;  // final-key bits the coalition derives
  std::size_t final_bits = 0;
};

AuditVerdict audit_run(const RunRecord& run, const AdversaryModel& adversary,
                       const std::vector<Gf2Vector>& final_key);

std::string audit_report_json(const AdversaryModel& adversary, const AuditVerdict& verdict);

}  // namespace qkdnet
