#include "loopqrng/sequence.hpp"

#include <ctime>
#include <stdexcept>

#include "json.hpp"
#include "loopqrng/errors.hpp"
#include "loopqrng/file_io.hpp"

namespace loopqrng {

using nlohmann::ordered_json;

std::string to_string(BitLabel label) {
  switch (label) {
    case BitLabel::Private: return "private";
    case BitLabel::Public: return "public";
    case BitLabel::Extracted: return "extracted";
  }
  throw std::logic_error("unknown BitLabel");
}

BitLabel bit_label_from_string(const std::string& s) {
  if (s == "private") return BitLabel::Private;
  if (s == "public") return BitLabel::Public;
  if (s == "extracted") return BitLabel::Extracted;
  throw DataError("unknown bit label: " + s);
}

void BitSequence::push_bit(int bit) {
  if ((n_bits_ & 7) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - (n_bits_ & 7)));
  ++n_bits_;
}

int BitSequence::bit(std::uint64_t i) const {
  if (i >= n_bits_) throw std::out_of_range("bit index out of range");
  return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
}

std::vector<std::uint8_t> BitSequence::unpacked() const {
  std::vector<std::uint8_t> out(n_bits_);
  for (std::uint64_t i = 0; i < n_bits_; ++i)
    out[i] = static_cast<std::uint8_t>(bit(i));
  return out;
}

BitSequence BitSequence::from_bits(std::span<const std::uint8_t> bits,
                                   BitLabel label) {
  BitSequence seq(label);
  for (std::uint8_t b : bits) seq.push_bit(b);
  return seq;
}

BitSequence BitSequence::from_bytes(std::vector<std::uint8_t> bytes,
                                    std::uint64_t n_bits, BitLabel label) {
  if (bytes.size() != (n_bits + 7) / 8)
    throw DataError("byte payload size disagrees with n_bits");
  BitSequence seq(label);
  seq.bytes_ = std::move(bytes);
  seq.n_bits_ = n_bits;
  return seq;
}

std::vector<SelectedEvent> post_select(std::span<const DetectionEvent> events) {
  for (std::size_t k = 1; k < events.size(); ++k) {
    const auto& prev = events[k - 1];
    const auto& cur = events[k];
    if (cur.pulse_index < prev.pulse_index ||
        (cur.pulse_index == prev.pulse_index &&
         cur.loop_index <= prev.loop_index))
      throw std::invalid_argument("event stream is not sorted");
  }
  std::vector<SelectedEvent> selected;
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    while (j < events.size() && events[j].pulse_index == events[i].pulse_index)
      ++j;
    if (j - i == 1 && events[i].loop_index >= 1 && events[i].loop_index <= 4)
      selected.push_back({events[i].pulse_index, events[i].loop_index});
    i = j;
  }
  return selected;
}

std::pair<BitSequence, BitSequence> partition(
    std::span<const SelectedEvent> selected, const Provenance& provenance) {
  BitSequence priv(BitLabel::Private);
  BitSequence pub(BitLabel::Public);
  priv.provenance() = provenance;
  pub.provenance() = provenance;
  for (const SelectedEvent& event : selected) {
    switch (event.loop_index) {
      case 1: priv.push_bit(0); break;
      case 2: priv.push_bit(1); break;
      case 3: pub.push_bit(0); break;
      case 4: pub.push_bit(1); break;
      default:
        throw std::domain_error("loop index outside [1,4]: post-selection violated");
    }
  }
  return {std::move(priv), std::move(pub)};
}

std::filesystem::path sidecar_path(const std::filesystem::path& bits_path) {
  std::filesystem::path p = bits_path;
  p += ".json";
  return p;
}

namespace {

ordered_json optional_num(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

void write_bits(const BitSequence& sequence, const std::filesystem::path& path) {
  const Provenance& prov = sequence.provenance();
  ordered_json side;
  side["n_bits"] = sequence.size();
  side["label"] = to_string(sequence.label());
  side["mu"] = optional_num(prov.mu);
  side["r"] = optional_num(prov.r);
  side["eta"] = optional_num(prov.eta);
  side["l_max"] = prov.l_max ? ordered_json(*prov.l_max) : ordered_json(nullptr);
  side["seed"] = prov.seed ? ordered_json(*prov.seed) : ordered_json(nullptr);
  side["created_unix"] =
      prov.created_unix ? prov.created_unix : static_cast<std::int64_t>(std::time(nullptr));
  if (prov.extractor) {
    side["extractor"] = {{"block_n", prov.extractor->block_n},
                         {"epsilon", prov.extractor->epsilon},
                         {"h_rate", prov.extractor->h_rate},
                         {"m", prov.extractor->m},
                         {"seed", prov.extractor->seed}};
  }

  write_file_atomic(path,
                    std::string_view(reinterpret_cast<const char*>(
                                         sequence.bytes().data()),
                                     sequence.bytes().size()));
  write_file_atomic(sidecar_path(path), side.dump(2) + "\n");
}

BitSequence read_bits(const std::filesystem::path& path) {
  ordered_json side;
  try {
    side = ordered_json::parse(read_file(sidecar_path(path)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt sidecar for " + path.string() + ": " + e.what());
  }

  std::uint64_t n_bits = 0;
  BitLabel label{};
  try {
    n_bits = side.at("n_bits").get<std::uint64_t>();
    label = bit_label_from_string(side.at("label").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt sidecar for " + path.string() + ": " + e.what());
  }

  const std::string payload = read_file(path);
  if (n_bits > 8 * payload.size())
    throw DataError("sidecar n_bits exceeds payload size: " + path.string());
  if (payload.size() != (n_bits + 7) / 8)
    throw DataError("payload length disagrees with n_bits: " + path.string());

  BitSequence seq = BitSequence::from_bytes(
      std::vector<std::uint8_t>(payload.begin(), payload.end()), n_bits, label);

  Provenance prov;
  auto load_num = [&side](const char* key) -> std::optional<double> {
    if (!side.contains(key) || side[key].is_null()) return std::nullopt;
    return side[key].get<double>();
  };
  prov.mu = load_num("mu");
  prov.r = load_num("r");
  prov.eta = load_num("eta");
  if (side.contains("l_max") && !side["l_max"].is_null())
    prov.l_max = side["l_max"].get<int>();
  if (side.contains("seed") && !side["seed"].is_null())
    prov.seed = side["seed"].get<std::uint64_t>();
  if (side.contains("created_unix") && !side["created_unix"].is_null())
    prov.created_unix = side["created_unix"].get<std::int64_t>();
  if (side.contains("extractor") && !side["extractor"].is_null()) {
    const auto& ex = side["extractor"];
    ExtractorEcho echo;
    echo.block_n = ex.at("block_n").get<std::uint64_t>();
    echo.epsilon = ex.at("epsilon").get<double>();
    echo.h_rate = ex.at("h_rate").get<double>();
    echo.m = ex.at("m").get<std::uint64_t>();
    echo.seed = ex.at("seed").get<std::uint64_t>();
    prov.extractor = echo;
  }
  seq.provenance() = prov;
  return seq;
}

}  // namespace loopqrng
