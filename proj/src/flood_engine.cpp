#include "qkdnet/flood_engine.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "json_util.hpp"
#include "qkdnet/error.hpp"

namespace qkdnet {

namespace {

std::string range_label(const std::string& id, std::size_t begin, std::size_t end) {
  return id + "[" + std::to_string(begin) + ":" + std::to_string(end) + "]";
}

// Fragments covering bits [begin, end) of a key with the given origin.
std::vector<Fragment> origin_slice(const std::vector<Fragment>& origin, std::size_t begin,
                                   std::size_t end) {
  std::vector<Fragment> out;
  std::size_t pos = 0;
  for (const auto& f : origin) {
    std::size_t lo = std::max(begin, pos);
    std::size_t hi = std::min(end, pos + f.length());
    if (lo < hi) out.push_back({f.key_id, f.begin + (lo - pos), f.begin + (hi - pos)});
    pos += f.length();
    if (pos >= end) break;
  }
  return out;
}

void append_fragment(std::vector<Fragment>& origin, const Fragment& f) {
  if (!origin.empty() && origin.back().key_id == f.key_id && origin.back().end == f.begin) {
    origin.back().end = f.end;
  } else {
    origin.push_back(f);
  }
}

// One shared key per fragment of a delivered piece.
void explode(const KeyMaterial& piece, const std::pair<std::string, std::string>& owners,
             std::vector<KeyMaterial>& out) {
  std::size_t pos = 0;
  for (const auto& f : piece.origin) {
    KeyMaterial k;
    k.id = range_label(f.key_id, f.begin, f.end);
    k.owners = owners;
    k.bits = piece.bits.slice(pos, pos + f.length());
    k.consumed.assign(f.length(), false);
    k.origin = {f};
    out.push_back(std::move(k));
    pos += f.length();
  }
}

void sort_canonical(std::vector<KeyMaterial>& keys) {
  std::sort(keys.begin(), keys.end(),
            [](const KeyMaterial& l, const KeyMaterial& r) { return l.origin < r.origin; });
}

}  // namespace

std::size_t KeyMaterial::available() const {
  return static_cast<std::size_t>(std::count(consumed.begin(), consumed.end(), false));
}

KeyMaterial make_key(std::string id, std::string owner_a, std::string owner_b, BitString bits) {
  KeyMaterial k;
  k.origin = {Fragment{id, 0, bits.size()}};
  k.id = std::move(id);
  k.owners = {std::move(owner_a), std::move(owner_b)};
  k.consumed.assign(bits.size(), false);
  k.bits = std::move(bits);
  return k;
}

KeyMaterial make_link_key(const std::string& a, const std::string& b, BitString bits) {
  return b < a ? make_key(link_id(a, b), b, a, std::move(bits))
               : make_key(link_id(a, b), a, b, std::move(bits));
}

std::vector<KeyMaterial> split_key(KeyMaterial& key, std::span<const std::size_t> lengths) {
  std::size_t start = static_cast<std::size_t>(
      std::find(key.consumed.begin(), key.consumed.end(), false) - key.consumed.begin());
  std::size_t total = std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  if (start + total > key.length()) {
    throw InputError("split of " + std::to_string(total) + " bits exceeds the " +
                     std::to_string(key.length() - start) + " unused bits of key " + key.id);
  }
  for (std::size_t i = start; i < start + total; ++i) {
    if (key.consumed[i]) throw InputError("bit " + std::to_string(i) + " of key " + key.id + " already used");
  }
  std::vector<KeyMaterial> out;
  std::size_t pos = start;
  for (std::size_t len : lengths) {
    KeyMaterial seg;
    seg.id = range_label(key.id, pos, pos + len);
    seg.owners = key.owners;
    seg.bits = key.bits.slice(pos, pos + len);
    seg.consumed.assign(len, false);
    seg.origin = origin_slice(key.origin, pos, pos + len);
    for (std::size_t i = pos; i < pos + len; ++i) key.consumed[i] = true;
    pos += len;
    out.push_back(std::move(seg));
  }
  return out;
}

KeyMaterial concat_keys(std::string id, std::pair<std::string, std::string> owners,
                        std::span<const KeyMaterial> parts) {
  KeyMaterial out;
  out.id = std::move(id);
  out.owners = std::move(owners);
  for (const auto& p : parts) {
    out.bits.append(p.bits);
    for (const auto& f : p.origin) append_fragment(out.origin, f);
  }
  out.consumed.assign(out.bits.size(), false);
  return out;
}

BitString xor_keys(const KeyMaterial& a, const KeyMaterial& b) { return a.bits ^ b.bits; }

std::string transcript_to_jsonl(const Transcript& transcript) {
  using nlohmann::ordered_json;
  std::string out;
  for (const auto& a : transcript) {
    ordered_json line;
    line["announcer"] = a.announcer;
    line["pad_key_id"] = a.pad_key_id;
    line["pad_offset"] = a.pad_offset;
    line["length"] = a.ciphertext.size();
    ordered_json payload = ordered_json::array();
    for (const auto& f : a.payload) {
      payload.push_back({{"key_id", f.key_id}, {"begin", f.begin}, {"end", f.end}});
    }
    line["payload_descriptor"] = std::move(payload);
    line["ciphertext"] = a.ciphertext.to_hex();
    out += line.dump();
    out += '\n';
  }
  return out;
}

Transcript transcript_from_jsonl(std::string_view text) {
  Transcript out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::string where = "line " + std::to_string(line_no);
    auto doc = detail::parse_json(line);
    detail::require_object(doc, where);
    Announcement a;
    a.announcer = detail::require_string(doc, "/announcer", where);
    a.pad_key_id = detail::require_string(doc, "/pad_key_id", where);
    a.pad_offset = static_cast<std::size_t>(detail::require_number(doc, "/pad_offset", where));
    auto length = static_cast<std::size_t>(detail::require_number(doc, "/length", where));
    for (const auto& f : detail::require_array(doc, "/payload_descriptor", where)) {
      Fragment frag{detail::require_string(f, "/key_id", where),
                    static_cast<std::size_t>(detail::require_number(f, "/begin", where)),
                    static_cast<std::size_t>(detail::require_number(f, "/end", where))};
      if (frag.end < frag.begin) throw InputError(where + ": fragment end before begin");
      a.payload.push_back(std::move(frag));
    }
    a.ciphertext = BitString::from_hex(detail::require_string(doc, "/ciphertext", where), length);
    std::size_t payload_bits = 0;
    for (const auto& f : a.payload) payload_bits += f.length();
    if (payload_bits != length) throw InputError(where + ": payload length differs from ciphertext length");
    out.push_back(std::move(a));
  }
  return out;
}

ChainResult run_linear_chain(std::vector<KeyMaterial>& keys) {
  if (keys.empty()) throw InputError("chain of length 0");
  std::size_t shortest = keys.front().length();
  for (const auto& k : keys) shortest = std::min(shortest, k.length());

  auto common_owner = [](const KeyMaterial& l, const KeyMaterial& r) {
    for (const auto& x : {l.owners.first, l.owners.second}) {
      if (x == r.owners.first || x == r.owners.second) return x;
    }
    throw InputError("keys " + l.id + " and " + r.id + " do not form a chain");
  };

  auto take = [&](KeyMaterial& k) {
    for (std::size_t i = 0; i < shortest; ++i) {
      if (k.consumed[i]) throw InputError("bit " + std::to_string(i) + " of key " + k.id + " already used");
      k.consumed[i] = true;
    }
  };

  ChainResult result;
  result.end_key = keys.front().bits.slice(0, shortest);
  take(keys.front());
  for (std::size_t i = 1; i < keys.size(); ++i) {
    Announcement a;
    a.announcer = common_owner(keys[i - 1], keys[i]);
    a.pad_key_id = keys[i].id;
    a.pad_offset = 0;
    a.payload = origin_slice(keys[i - 1].origin, 0, shortest);
    a.ciphertext = keys[i - 1].bits.slice(0, shortest) ^ keys[i].bits.slice(0, shortest);
    take(keys[i]);
    result.transcript.push_back(std::move(a));
  }
  return result;
}

FloodResult run_flood(const FloodPlan& plan, KeyRing& keys) {
  const auto& source = plan.orientation.source;
  const auto& sink = plan.orientation.sink;
  const std::pair<std::string, std::string> end_users{source, sink};

  for (const auto& f : plan.flows) {
    if (f.flow <= 0) continue;
    auto it = keys.find(link_id(f.from, f.to));
    if (it == keys.end()) throw InputError("no key material on edge " + link_id(f.from, f.to));
    if (it->second.available() < static_cast<std::size_t>(f.flow)) {
      throw InputError("insufficient key length on edge " + it->first + ": " +
                       std::to_string(it->second.available()) + " < " + std::to_string(f.flow));
    }
  }
  if (!is_acyclic(plan.orientation)) throw InputError("cyclic orientation has no topological order");

  FloodResult result;
  std::map<std::string, std::vector<std::pair<std::string, KeyMaterial>>> inbox;

  auto deliver = [&](const std::string& to, const std::string& via, KeyMaterial piece) {
    if (to == sink) {
      explode(piece, end_users, result.shared);
    } else {
      inbox[to].emplace_back(via, std::move(piece));
    }
  };

  for (const auto& f : plan.flows) {
    if (f.from != source || f.flow <= 0) continue;
    auto& key = keys.at(link_id(f.from, f.to));
    std::size_t len = static_cast<std::size_t>(f.flow);
    deliver(f.to, key.id, std::move(split_key(key, std::span(&len, 1)).front()));
  }

  for (const auto& node : plan.order) {
    auto& received = inbox[node];
    std::sort(received.begin(), received.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<KeyMaterial> parts;
    for (auto& [via, piece] : received) parts.push_back(std::move(piece));
    KeyMaterial combined = concat_keys(node + ":combined", end_users, parts);

    std::vector<std::string> expected;
    for (const auto& f : plan.flows) {
      if (f.from == node && f.flow > 0) expected.push_back(f.to);
    }
    auto outputs = plan.outputs.contains(node) ? plan.outputs.at(node) : std::vector<std::string>{};
    auto sorted_outputs = outputs;
    std::sort(sorted_outputs.begin(), sorted_outputs.end());
    std::sort(expected.begin(), expected.end());
    if (sorted_outputs != expected) {
      throw InputError("output ordering of " + node + " does not match its outgoing flows");
    }

    for (const auto& next : outputs) {
      std::size_t len = static_cast<std::size_t>(plan.flow(node, next));
      if (combined.available() < len) {
        throw InputError("node " + node + " must forward " + std::to_string(len) + " bits to " + next +
                         " but holds only " + std::to_string(combined.available()));
      }
      KeyMaterial piece = std::move(split_key(combined, std::span(&len, 1)).front());
      KeyMaterial& pad_key = keys.at(link_id(node, next));
      KeyMaterial pad = std::move(split_key(pad_key, std::span(&len, 1)).front());

      Announcement a;
      a.announcer = node;
      a.pad_key_id = pad_key.id;
      a.pad_offset = pad.origin.front().begin;
      a.payload = piece.origin;
      a.ciphertext = piece.bits ^ pad.bits;

      // The receiver removes the pad with its own copy of the link key.
      KeyMaterial decoded = piece;
      decoded.bits = a.ciphertext ^ pad_key.bits.slice(a.pad_offset, a.pad_offset + len);
      result.transcript.push_back(std::move(a));
      deliver(next, pad_key.id, std::move(decoded));
    }
    if (combined.available() > 0) {
      std::size_t used = combined.length() - combined.available();
      result.retained.push_back({node, origin_slice(combined.origin, used, combined.length())});
    }
  }

  sort_canonical(result.shared);
  return result;
}

std::vector<KeyMaterial> decode_at_sink(const FloodPlan& plan, const Transcript& transcript,
                                        const KeyRing& sink_keys) {
  const auto& source = plan.orientation.source;
  const auto& sink = plan.orientation.sink;
  const std::pair<std::string, std::string> end_users{source, sink};
  std::vector<KeyMaterial> out;
  for (const auto& a : transcript) {
    if (a.pad_key_id != link_id(a.announcer, sink)) continue;
    auto it = sink_keys.find(a.pad_key_id);
    if (it == sink_keys.end()) throw InputError("sink lacks pad key " + a.pad_key_id);
    std::size_t len = a.ciphertext.size();
    if (a.pad_offset + len > it->second.length()) throw InputError("pad range outside key " + a.pad_key_id);
    KeyMaterial piece;
    piece.bits = a.ciphertext ^ it->second.bits.slice(a.pad_offset, a.pad_offset + len);
    piece.origin = a.payload;
    explode(piece, end_users, out);
  }
  std::int64_t direct = plan.flow(source, sink);
  if (direct > 0) {
    auto it = sink_keys.find(link_id(source, sink));
    if (it == sink_keys.end()) throw InputError("sink lacks the direct key " + link_id(source, sink));
    KeyMaterial piece;
    piece.bits = it->second.bits.slice(0, static_cast<std::size_t>(direct));
    piece.origin = origin_slice(it->second.origin, 0, static_cast<std::size_t>(direct));
    explode(piece, end_users, out);
  }
  sort_canonical(out);
  return out;
}

KeyRing generate_keys(const FloodPlan& plan, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  KeyRing keys;
  for (const auto& arc : plan.orientation.arcs) {
    if (arc.capacity <= 0) continue;
    auto key = make_link_key(arc.from, arc.to,
                             BitString::random(static_cast<std::size_t>(arc.capacity), rng));
    keys.emplace(key.id, std::move(key));
  }
  return keys;
}

BitString assemble_rate(std::span<const KeyMaterial> shared) {
  BitString out;
  for (const auto& k : shared) out.append(k.bits);
  return out;
}

BitString assemble_secure(std::span<const KeyMaterial> shared) {
  if (shared.empty()) throw InputError("no keys to combine");
  std::size_t shortest = shared.front().length();
  for (const auto& k : shared) shortest = std::min(shortest, k.length());
  BitString out(shortest);
  for (const auto& k : shared) out = out ^ k.bits.slice(0, shortest);
  return out;
}

}  // namespace qkdnet
