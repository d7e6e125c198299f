#include "motif/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "motif/config.h"
#include "motif/errors.h"

namespace motif {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'M', 'O', 'T', 'I', 'F', 'C', 'K', 'P'};

using nlohmann::json;

template <class T>
void put(std::vector<uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T take(const std::vector<uint8_t>& in, size_t& pos, const char* what) {
  if (in.size() - pos < sizeof(T)) throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

struct Entry {
  std::string name;
  const Mat* tensor;
};

std::vector<Entry> collect(const Checkpoint& ck) {
  std::vector<Entry> entries;
  for_each_param(ck.weights, [&](const std::string& n, const Mat& m) { entries.push_back({n, &m}); });
  if (ck.optimizer) {
    for_each_param(ck.optimizer->first_moment, [&](const std::string& n, const Mat& m) { entries.push_back({"adam.m." + n, &m}); });
    for_each_param(ck.optimizer->second_moment, [&](const std::string& n, const Mat& m) { entries.push_back({"adam.v." + n, &m}); });
  }
  return entries;
}

}  // namespace

std::vector<uint8_t> serialize_checkpoint(const Checkpoint& ck) {
  const auto entries = collect(ck);
  json table = json::array();
  for (const auto& e : entries) table.push_back({{"name", e.name}, {"rows", e.tensor->rows()}, {"cols", e.tensor->cols()}});

  json header = {{"encoder", to_json(ck.encoder)},
                 {"expander", to_json(ck.expander)},
                 {"global_step", ck.global_step},
                 {"rng_state", ck.rng_state},
                 {"meta", ck.meta},
                 {"tensors", table}};
  if (ck.optimizer) {
    header["optimizer"] = {{"config", to_json(ck.optimizer->config)}, {"steps_taken", ck.optimizer->steps_taken}};
  }
  const std::string text = header.dump();

  std::vector<uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<uint32_t>(out, kCheckpointFormatVersion);
  put<uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& e : entries) {
    const size_t n = static_cast<size_t>(e.tensor->size());
    const auto* p = reinterpret_cast<const uint8_t*>(e.tensor->data());
    out.insert(out.end(), p, p + n * sizeof(double));
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  size_t pos = sizeof(kMagic);
  const auto version = take<uint32_t>(bytes, pos, "format version");
  if (version != kCheckpointFormatVersion) {
    throw CheckpointError("unsupported checkpoint format version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointFormatVersion) + ")");
  }
  const auto header_len = take<uint64_t>(bytes, pos, "header length");
  if (bytes.size() - pos < header_len) throw CheckpointError("checkpoint truncated in header");
  json header;
  try {
    header = json::parse(bytes.begin() + static_cast<long>(pos), bytes.begin() + static_cast<long>(pos + header_len));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  pos += header_len;

  Checkpoint ck;
  try {
    ck.encoder = encoder_config_from_json(header.at("encoder"));
    ck.expander = expander_config_from_json(header.at("expander"));
    ck.global_step = header.at("global_step").get<long>();
    ck.rng_state = header.at("rng_state").get<std::string>();
    ck.meta = header.at("meta");
    ck.weights = init_weights(ck.encoder, ck.expander, 0);
    if (header.contains("optimizer")) {
      OptimizerState state;
      state.config = adamw_config_from_json(header.at("optimizer").at("config"));
      state.steps_taken = header.at("optimizer").at("steps_taken").get<long>();
      state.first_moment = zeros_like(ck.weights);
      state.second_moment = zeros_like(ck.weights);
      ck.optimizer = std::move(state);
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint has an invalid architecture: ") + e.what());
  }

  const auto entries = collect(ck);
  const auto& table = header.at("tensors");
  if (table.size() != entries.size()) throw CheckpointError("checkpoint tensor table does not match its architecture");
  for (size_t i = 0; i < entries.size(); ++i) {
    Mat& m = const_cast<Mat&>(*entries[i].tensor);
    if (table[i].at("name").get<std::string>() != entries[i].name || table[i].at("rows").get<long>() != m.rows() ||
        table[i].at("cols").get<long>() != m.cols()) {
      throw CheckpointError("checkpoint tensor " + entries[i].name + " does not match its architecture");
    }
    const size_t n = static_cast<size_t>(m.size()) * sizeof(double);
    if (bytes.size() - pos < n) throw CheckpointError("checkpoint truncated in tensor " + entries[i].name);
    std::memcpy(m.data(), bytes.data() + pos, n);
    pos += n;
  }
  if (pos != bytes.size()) throw CheckpointError("checkpoint has trailing bytes");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const auto bytes = serialize_checkpoint(ck);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

Model model_from_checkpoint(const Checkpoint& ck) { return Model(ck.encoder, ck.expander, ck.weights); }

}  // namespace motif
