#include "qkdnet/adversary_sim.hpp"

#include <algorithm>
#include <bit>

#include <json.hpp>

#include "qkdnet/error.hpp"

namespace qkdnet {

bool Gf2Vector::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t Gf2Vector::lowest() const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
  }
  return size_;
}

Gf2Vector& Gf2Vector::operator^=(const Gf2Vector& other) {
  if (other.size_ != size_) throw InputError("GF(2) vectors of different sizes");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

VariableIndex::VariableIndex(const KeyRing& keys) {
  for (const auto& [id, key] : keys) {
    offsets_[id] = {total_, key.length()};
    total_ += key.length();
  }
}

std::size_t VariableIndex::variable(const std::string& key_id, std::size_t bit) const {
  auto it = offsets_.find(key_id);
  if (it == offsets_.end()) throw InputError("unknown key '" + key_id + "'");
  if (bit >= it->second.second) {
    throw InputError("bit " + std::to_string(bit) + " outside key '" + key_id + "'");
  }
  return it->second.first + bit;
}

std::size_t VariableIndex::key_length(const std::string& key_id) const {
  auto it = offsets_.find(key_id);
  if (it == offsets_.end()) throw InputError("unknown key '" + key_id + "'");
  return it->second.second;
}

bool KnowledgeBase::reduce(Gf2Vector& row, bool& value) const {
  // Rows are fully reduced, so one pass over the pivots is enough.
  for (const auto& [pivot, entry] : rows_) {
    if (row.get(pivot)) {
      row ^= entry.first;
      value ^= entry.second;
    }
  }
  return row.is_zero();
}

bool KnowledgeBase::add(Gf2Vector row, bool value) {
  if (row.size() != index_->size()) throw InputError("fact over the wrong variable set");
  if (reduce(row, value)) {
    if (value) throw InputError("inconsistent facts: 0 = 1");
    return false;
  }
  std::size_t pivot = row.lowest();
  for (auto& [p, entry] : rows_) {
    if (entry.first.get(pivot)) {
      entry.first ^= row;
      entry.second ^= value;
    }
  }
  rows_.emplace(pivot, std::make_pair(std::move(row), value));
  return true;
}

void KnowledgeBase::ingest_key(const KeyMaterial& key) {
  std::size_t pos = 0;
  for (const auto& f : key.origin) {
    for (std::size_t b = f.begin; b < f.end; ++b, ++pos) {
      Gf2Vector row(index_->size());
      row.set(index_->variable(f.key_id, b));
      add(std::move(row), key.bits[pos]);
    }
  }
}

void KnowledgeBase::ingest_transcript(const Transcript& transcript) {
  for (const auto& a : transcript) {
    std::vector<std::size_t> payload;
    for (const auto& f : a.payload) {
      for (std::size_t b = f.begin; b < f.end; ++b) payload.push_back(index_->variable(f.key_id, b));
    }
    if (payload.size() != a.ciphertext.size()) {
      throw InputError("announcement by " + a.announcer + " has a mismatched descriptor");
    }
    for (std::size_t j = 0; j < payload.size(); ++j) {
      Gf2Vector row(index_->size());
      row.flip(payload[j]);
      row.flip(index_->variable(a.pad_key_id, a.pad_offset + j));
      add(std::move(row), a.ciphertext[j]);
    }
  }
}

bool KnowledgeBase::can_derive(const Gf2Vector& expr) const {
  Gf2Vector row = expr;
  bool value = false;
  return reduce(row, value);
}

bool KnowledgeBase::can_derive(const std::vector<Gf2Vector>& expr) const {
  return std::all_of(expr.begin(), expr.end(), [&](const Gf2Vector& e) { return can_derive(e); });
}

bool KnowledgeBase::can_derive_key(const std::string& key_id) const {
  std::size_t len = index_->key_length(key_id);
  for (std::size_t b = 0; b < len; ++b) {
    Gf2Vector row(index_->size());
    row.set(index_->variable(key_id, b));
    if (!can_derive(row)) return false;
  }
  return true;
}

std::optional<bool> KnowledgeBase::evaluate(const Gf2Vector& expr) const {
  Gf2Vector row = expr;
  bool value = false;
  if (!reduce(row, value)) return std::nullopt;
  return value;
}

std::string to_string(AdversaryModel::Mode mode) {
  switch (mode) {
    case AdversaryModel::Mode::Trusted: return "trusted";
    case AdversaryModel::Mode::Dishonest: return "dishonest";
    case AdversaryModel::Mode::Collective: return "collective";
  }
  return "?";
}

namespace {

std::vector<std::size_t> variables_of(const VariableIndex& index, const KeyMaterial& key) {
  std::vector<std::size_t> vars;
  for (const auto& f : key.origin) {
    for (std::size_t b = f.begin; b < f.end; ++b) vars.push_back(index.variable(f.key_id, b));
  }
  return vars;
}

}  // namespace

std::vector<Gf2Vector> rate_key_expression(const VariableIndex& index,
                                           std::span<const KeyMaterial> shared) {
  std::vector<Gf2Vector> expr;
  for (const auto& key : shared) {
    for (std::size_t v : variables_of(index, key)) {
      Gf2Vector row(index.size());
      row.set(v);
      expr.push_back(std::move(row));
    }
  }
  return expr;
}

std::vector<Gf2Vector> secure_key_expression(const VariableIndex& index,
                                             std::span<const KeyMaterial> shared) {
  if (shared.empty()) throw InputError("no keys to combine");
  std::size_t shortest = shared.front().length();
  for (const auto& k : shared) shortest = std::min(shortest, k.length());
  std::vector<Gf2Vector> expr(shortest, Gf2Vector(index.size()));
  for (const auto& key : shared) {
    auto vars = variables_of(index, key);
    for (std::size_t j = 0; j < shortest; ++j) expr[j].flip(vars[j]);
  }
  return expr;
}

AuditVerdict audit_run(const RunRecord& run, const AdversaryModel& adversary,
                       const std::vector<Gf2Vector>& final_key) {
  if (adversary.mode == AdversaryModel::Mode::Collective && adversary.bound > 0 &&
      adversary.members.size() > adversary.bound) {
    throw InputError("coalition of " + std::to_string(adversary.members.size()) +
                     " exceeds the bound c_a = " + std::to_string(adversary.bound));
  }
  VariableIndex index(run.keys);
  std::set<std::string> principals;
  for (const auto& [id, key] : run.keys) {
    principals.insert(key.owners.first);
    principals.insert(key.owners.second);
  }
  for (const auto& m : adversary.members) {
    if (!principals.contains(m)) throw InputError("adversary member '" + m + "' holds no key in the run");
  }
  auto holds = [](const KeyMaterial& k, const std::string& node) {
    return k.owners.first == node || k.owners.second == node;
  };
  auto knowledge_of = [&](const std::set<std::string>& nodes) {
    KnowledgeBase kb(index);
    kb.ingest_transcript(run.transcript);
    for (const auto& [id, key] : run.keys) {
      if (std::any_of(nodes.begin(), nodes.end(), [&](const std::string& n) { return holds(key, n); })) {
        kb.ingest_key(key);
      }
    }
    return kb;
  };

  KnowledgeBase coalition = knowledge_of(adversary.members);
  AuditVerdict verdict;
  verdict.variables = index.size();
  verdict.coalition_rank = coalition.rank();
  verdict.final_bits = final_key.size();
  for (const auto& e : final_key) verdict.derivable_bits += coalition.can_derive(e) ? 1 : 0;
  for (const auto& [id, range] : index.keys()) {
    if (coalition.can_derive_key(id)) verdict.derivable_key_ids.push_back(id);
  }
  std::string coalition_name = adversary.members.empty() ? "eavesdropper" : "coalition";

  switch (adversary.mode) {
    case AdversaryModel::Mode::Collective:
      if (coalition.can_derive(final_key)) {
        verdict.compromised = true;
        verdict.culprit = coalition_name;
      }
      break;
    case AdversaryModel::Mode::Trusted:
      for (const auto& m : adversary.members) {
        if (knowledge_of({m}).can_derive(final_key)) {
          verdict.compromised = true;
          verdict.culprit = m;
          break;
        }
      }
      break;
    case AdversaryModel::Mode::Dishonest:
      if (coalition.can_derive(final_key)) {
        verdict.compromised = true;
        verdict.culprit = coalition_name;
        break;
      }
      // Published material reaches every other intermediary.
      for (const auto& node : principals) {
        if (adversary.members.contains(node) || node == run.source || node == run.sink) continue;
        KnowledgeBase kb = coalition;
        for (const auto& [id, key] : run.keys) {
          if (holds(key, node)) kb.ingest_key(key);
        }
        if (kb.can_derive(final_key)) {
          verdict.compromised = true;
          verdict.culprit = node;
          break;
        }
      }
      break;
  }
  return verdict;
}

std::string audit_report_json(const AdversaryModel& adversary, const AuditVerdict& verdict) {
  nlohmann::ordered_json doc;
  doc["adversary"] = {{"mode", to_string(adversary.mode)},
                      {"members", std::vector<std::string>(adversary.members.begin(), adversary.members.end())},
                      {"bound", adversary.bound}};
  doc["compromised"] = verdict.compromised;
  doc["culprit"] = verdict.culprit;
  doc["derivable_key_ids"] = verdict.derivable_key_ids;
  doc["rank"] = {{"coalition", verdict.coalition_rank}, {"variables", verdict.variables}};
  doc["final_bits"] = verdict.final_bits;
  doc["derivable_bits"] = verdict.derivable_bits;
  return doc.dump(2) + "\n";
}

}  // namespace qkdnet
