#include "core/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fdreg {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool consumed = false;
};

// `key = value` lines, '#' starts a comment, dotted keys form sections.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string stripped = trim(line);
      if (stripped.empty()) continue;
      const std::size_t eq = stripped.find('=');
      if (eq == std::string::npos) {
        throw ParseError(origin + ":" + std::to_string(line_no) +
                         ": expected 'key = value'");
      }
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty()) {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": empty key");
      }
      if (kv.entries_.count(key) != 0) {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                         key + "'");
      }
      kv.entries_[key] = Entry{value, line_no, false};
    }
    return kv;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.consumed = true;
    return it->second.value;
  }

  std::string require(const std::string& key) {
    auto value = take(key);
    if (!value.has_value()) {
      throw ConfigError(origin_ + ": missing required key '" + key + "'");
    }
    return *value;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& reason) const {
    auto it = entries_.find(key);
    const std::string where =
        it == entries_.end() ? origin_ : origin_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": key '" + key + "': " + reason);
  }

  double take_double(const std::string& key, double fallback) {
    auto value = take(key);
    return value.has_value() ? parse_double(key, *value) : fallback;
  }

  std::uint64_t take_unsigned(const std::string& key, std::uint64_t fallback) {
    auto value = take(key);
    return value.has_value() ? parse_unsigned(key, *value) : fallback;
  }

  bool take_bool(const std::string& key, bool fallback) {
    auto value = take(key);
    if (!value.has_value()) return fallback;
    if (*value == "true") return true;
    if (*value == "false") return false;
    fail(key, "expected 'true' or 'false', got '" + *value + "'");
  }

  std::string take_string(const std::string& key, const std::string& fallback) {
    auto value = take(key);
    return value.has_value() ? *value : fallback;
  }

  std::vector<std::string> take_list(const std::string& key) {
    auto value = take(key);
    if (!value.has_value()) return {};
    return split_list(key, *value);
  }

  double parse_double(const std::string& key, const std::string& text) const {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      fail(key, "expected a number, got '" + text + "'");
    }
    return out;
  }

  std::uint64_t parse_unsigned(const std::string& key, const std::string& text) const {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      fail(key, "expected a nonnegative integer, got '" + text + "'");
    }
    return out;
  }

  std::vector<std::string> split_list(const std::string& key, const std::string& text) const {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const std::string item =
          trim(comma == std::string::npos ? text.substr(start)
                                          : text.substr(start, comma - start));
      if (item.empty()) fail(key, "empty list item");
      items.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return items;
  }

  void finish() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.consumed) {
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                          key + "'");
      }
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, Entry> entries_;
};

}  // namespace

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kFd: return "fd";
    case Scheme::kFl: return "fl";
    case Scheme::kStandalone: return "standalone";
    case Scheme::kCentralized: return "centralized";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "fd") return Scheme::kFd;
  if (name == "fl") return Scheme::kFl;
  if (name == "standalone") return Scheme::kStandalone;
  if (name == "centralized") return Scheme::kCentralized;
  throw ConfigError("unknown scheme '" + name +
                    "' (expected fd, fl, standalone or centralized)");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  KeyValues kv = KeyValues::parse(text, origin);
  ExperimentConfig cfg;

  cfg.scheme = parse_scheme(kv.require("scheme"));
  cfg.clients = kv.take_unsigned("clients", cfg.clients);
  cfg.seed = kv.take_unsigned("seed", cfg.seed);
  cfg.output_dir = kv.take_string("output.dir", cfg.output_dir);
  cfg.dump_uploads = kv.take_bool("output.dump_uploads", cfg.dump_uploads);
  cfg.parallel_clients = kv.take_bool("runtime.parallel_clients", cfg.parallel_clients);

  const std::string source = kv.require("data.source");
  if (source == "synthetic") {
    cfg.source = DataSource::kSynthetic;
  } else if (source == "csv") {
    cfg.source = DataSource::kCsv;
  } else {
    kv.fail("data.source", "expected 'synthetic' or 'csv', got '" + source + "'");
  }
  if (kv.has("data.seed")) {
    cfg.network.seed = kv.take_unsigned("data.seed", 0);
    cfg.network_seed_set = true;
  }
  cfg.network.area_length_m = kv.take_double("data.area_length", cfg.network.area_length_m);
  cfg.network.area_width_m = kv.take_double("data.area_width", cfg.network.area_width_m);
  cfg.network.ap_count = kv.take_unsigned("data.ap_count", cfg.network.ap_count);
  cfg.network.rp_count = kv.take_unsigned("data.rp_count", cfg.network.rp_count);
  cfg.network.repetitions = kv.take_unsigned("data.repetitions", cfg.network.repetitions);
  cfg.network.path_loss_exponent =
      kv.take_double("data.path_loss_exponent", cfg.network.path_loss_exponent);
  cfg.network.shadowing_sigma_db =
      kv.take_double("data.shadowing_sigma", cfg.network.shadowing_sigma_db);
  cfg.network.frequency_hz = kv.take_double("data.frequency_hz", cfg.network.frequency_hz);
  cfg.network.tx_power_dbm = kv.take_double("data.tx_power_dbm", cfg.network.tx_power_dbm);
  cfg.network.reference_distance_m =
      kv.take_double("data.reference_distance_m", cfg.network.reference_distance_m);
  cfg.network.sensitivity_floor_dbm =
      kv.take_double("data.sensitivity_floor_dbm", cfg.network.sensitivity_floor_dbm);

  cfg.csv_path = kv.take_string("data.csv_path", "");
  cfg.csv_schema.feature_columns = kv.take_list("data.feature_columns");
  cfg.csv_schema.target_columns = kv.take_list("data.target_columns");
  cfg.csv_schema.not_detected_sentinel =
      kv.take_double("data.not_detected_sentinel", cfg.csv_schema.not_detected_sentinel);

  const std::string partition = kv.take_string("data.partition", "random");
  if (partition == "random") {
    cfg.partition_strategy = PartitionStrategy::kRandom;
  } else if (partition == "spatial") {
    cfg.partition_strategy = PartitionStrategy::kSpatial;
  } else {
    kv.fail("data.partition", "expected 'random' or 'spatial', got '" + partition + "'");
  }

  const std::string validation = kv.take_string(
      "data.validation", cfg.source == DataSource::kSynthetic ? "per_reference" : "fraction");
  if (validation == "per_reference") {
    cfg.validation = ValidationSplit::kPerReference;
  } else if (validation == "fraction") {
    cfg.validation = ValidationSplit::kFraction;
  } else {
    kv.fail("data.validation", "expected 'per_reference' or 'fraction', got '" + validation +
                                   "'");
  }
  cfg.validation_fraction =
      kv.take_double("data.validation_fraction", cfg.validation_fraction);

  cfg.input_units = kv.take_unsigned("model.input_units", cfg.input_units);
  cfg.hidden_units = kv.take_unsigned("model.hidden_units", cfg.hidden_units);
  cfg.output_units = kv.take_unsigned("model.output_units", cfg.output_units);

  cfg.schedule.rounds =
      static_cast<std::uint32_t>(kv.take_unsigned("train.rounds", cfg.schedule.rounds));
  cfg.schedule.local_epochs = static_cast<std::uint32_t>(
      kv.take_unsigned("train.local_epochs", cfg.schedule.local_epochs));
  cfg.schedule.warmup_epochs = static_cast<std::uint32_t>(
      kv.take_unsigned("train.warmup_epochs", cfg.schedule.warmup_epochs));
  cfg.schedule.batch_size =
      static_cast<std::uint32_t>(kv.take_unsigned("train.batch_size", cfg.schedule.batch_size));
  cfg.schedule.lambda = kv.take_double("train.lambda", cfg.schedule.lambda);
  cfg.schedule.learning_rate =
      kv.take_double("train.learning_rate", cfg.schedule.learning_rate);
  cfg.schedule.beta1 = kv.take_double("train.beta1", cfg.schedule.beta1);
  cfg.schedule.beta2 = kv.take_double("train.beta2", cfg.schedule.beta2);
  cfg.schedule.epsilon = kv.take_double("train.epsilon", cfg.schedule.epsilon);
  cfg.schedule.seed = cfg.seed;
  cfg.schedule.parallel_clients = cfg.parallel_clients;

  if (kv.has("segment.count")) {
    cfg.segment_count = kv.take_unsigned("segment.count", 0);
  }
  if (kv.has("segment.resolution")) {
    cfg.segment_resolution = kv.take_double("segment.resolution", 0.0);
  }
  const std::string strategy = kv.take_string("segment.strategy", "uniform");
  if (strategy == "uniform") {
    cfg.split_strategy = SplitStrategy::kUniform;
  } else if (strategy == "density") {
    cfg.split_strategy = SplitStrategy::kDensity;
  } else {
    kv.fail("segment.strategy", "expected 'uniform' or 'density', got '" + strategy + "'");
  }
  for (const std::string& item : kv.take_list("segment.y_min")) {
    cfg.segment_y_min.push_back(kv.parse_double("segment.y_min", item));
  }
  for (const std::string& item : kv.take_list("segment.y_max")) {
    cfg.segment_y_max.push_back(kv.parse_double("segment.y_max", item));
  }

  cfg.comms.bits_resolution = static_cast<std::uint32_t>(
      kv.take_unsigned("comms.bits_resolution", cfg.comms.bits_resolution));
  cfg.comms.channels = kv.take_double("comms.channels", cfg.comms.channels);
  cfg.comms.max_power_w = kv.take_double("comms.max_power_w", cfg.comms.max_power_w);
  cfg.comms.channel_gain_sq =
      kv.take_double("comms.channel_gain", cfg.comms.channel_gain_sq);
  cfg.comms.energy_per_bit_j =
      kv.take_double("comms.energy_per_bit_j", cfg.comms.energy_per_bit_j);
  cfg.comms.energy_per_param_update_j = kv.take_double(
      "comms.energy_per_param_update_j", cfg.comms.energy_per_param_update_j);

  for (const std::string& item : kv.take_list("sweep.schemes")) {
    cfg.sweep.schemes.push_back(parse_scheme(item));
  }
  for (const std::string& item : kv.take_list("sweep.clients")) {
    cfg.sweep.clients.push_back(kv.parse_unsigned("sweep.clients", item));
  }
  for (const std::string& item : kv.take_list("sweep.lambda")) {
    cfg.sweep.lambdas.push_back(kv.parse_double("sweep.lambda", item));
  }
  for (const std::string& item : kv.take_list("sweep.segments")) {
    cfg.sweep.segments.push_back(kv.parse_unsigned("sweep.segments", item));
  }

  kv.finish();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void validate(const ExperimentConfig& cfg) {
  const auto need = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  need(cfg.clients >= 1, "key 'clients': must be at least 1");
  need(cfg.scheme != Scheme::kFd || cfg.clients >= 2,
       "key 'clients': federated distillation needs at least 2 clients");
  for (const Scheme s : cfg.sweep.schemes) {
    if (s != Scheme::kFd) continue;
    for (const std::size_t k : cfg.sweep.clients) {
      need(k >= 2, "key 'sweep.clients': federated distillation needs at least 2 clients");
    }
    need(!cfg.sweep.clients.empty() || cfg.clients >= 2,
         "key 'clients': federated distillation needs at least 2 clients");
  }

  if (cfg.source == DataSource::kCsv) {
    need(!cfg.csv_path.empty(), "key 'data.csv_path': required when data.source = csv");
    need(!cfg.csv_schema.feature_columns.empty(),
         "key 'data.feature_columns': required when data.source = csv");
    need(!cfg.csv_schema.target_columns.empty(),
         "key 'data.target_columns': required when data.source = csv");
  } else {
    need(cfg.network.ap_count >= 1, "key 'data.ap_count': must be at least 1");
    need(cfg.network.rp_count >= 1, "key 'data.rp_count': must be at least 1");
    need(cfg.network.repetitions >= 1, "key 'data.repetitions': must be at least 1");
    need(cfg.network.area_length_m > 0.0 && cfg.network.area_width_m > 0.0,
         "key 'data.area_length'/'data.area_width': must be positive");
    need(cfg.network.path_loss_exponent > 0.0,
         "key 'data.path_loss_exponent': must be positive");
    need(cfg.network.shadowing_sigma_db >= 0.0,
         "key 'data.shadowing_sigma': must be nonnegative");
    need(cfg.network.reference_distance_m > 0.0,
         "key 'data.reference_distance_m': must be positive");
    need(cfg.network.frequency_hz > 0.0, "key 'data.frequency_hz': must be positive");
  }
  if (cfg.validation == ValidationSplit::kFraction) {
    need(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0,
         "key 'data.validation_fraction': must lie strictly between 0 and 1");
  }

  need(cfg.hidden_units >= 1, "key 'model.hidden_units': must be at least 1");
  need(cfg.schedule.rounds >= 1, "key 'train.rounds': must be at least 1");
  need(cfg.schedule.local_epochs >= 1, "key 'train.local_epochs': must be at least 1");
  need(cfg.schedule.batch_size >= 1, "key 'train.batch_size': must be at least 1");
  need(cfg.schedule.lambda >= 0.0, "key 'train.lambda': must be nonnegative");
  need(cfg.schedule.learning_rate > 0.0, "key 'train.learning_rate': must be positive");
  need(cfg.schedule.beta1 >= 0.0 && cfg.schedule.beta1 < 1.0,
       "key 'train.beta1': must lie in [0, 1)");
  need(cfg.schedule.beta2 >= 0.0 && cfg.schedule.beta2 < 1.0,
       "key 'train.beta2': must lie in [0, 1)");
  need(cfg.schedule.epsilon > 0.0, "key 'train.epsilon': must be positive");

  const bool needs_segments =
      cfg.scheme == Scheme::kFd ||
      std::count(cfg.sweep.schemes.begin(), cfg.sweep.schemes.end(), Scheme::kFd) > 0;
  if (needs_segments) {
    need(cfg.segment_count.has_value() || cfg.segment_resolution.has_value(),
         "key 'segment.count': required for the fd scheme "
         "(or provide 'segment.resolution')");
  }
  if (cfg.segment_count.has_value()) {
    need(*cfg.segment_count >= 1, "key 'segment.count': must be at least 1");
  }
  if (cfg.segment_resolution.has_value()) {
    need(*cfg.segment_resolution > 0.0, "key 'segment.resolution': must be positive");
  }
  need(cfg.segment_y_min.size() == cfg.segment_y_max.size(),
       "key 'segment.y_min'/'segment.y_max': bounds need matching lengths");
  for (std::size_t d = 0; d < cfg.segment_y_min.size(); ++d) {
    need(cfg.segment_y_min[d] < cfg.segment_y_max[d],
         "key 'segment.y_min'/'segment.y_max': y_min must stay below y_max");
  }

  need(cfg.comms.bits_resolution >= 1, "key 'comms.bits_resolution': must be at least 1");
  need(cfg.comms.channels >= 1.0, "key 'comms.channels': must be at least 1");
  need(cfg.comms.max_power_w >= 0.0, "key 'comms.max_power_w': must be nonnegative");
  need(cfg.comms.channel_gain_sq >= 0.0, "key 'comms.channel_gain': must be nonnegative");
  need(cfg.comms.energy_per_bit_j >= 0.0,
       "key 'comms.energy_per_bit_j': must be nonnegative");
  need(cfg.comms.energy_per_param_update_j >= 0.0,
       "key 'comms.energy_per_param_update_j': must be nonnegative");

  // Payload sanity: the distillation upload must stay below the model size.
  if (needs_segments && cfg.segment_count.has_value() && cfg.input_units >= 1) {
    check_lightweight_payload(*cfg.segment_count, cfg.input_units, cfg.hidden_units,
                              cfg.output_units >= 1 ? cfg.output_units : 2);
  }
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# resolved configuration\n";
  out << "scheme = " << scheme_name(cfg.scheme) << '\n';
  out << "clients = " << cfg.clients << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "output.dir = " << cfg.output_dir << '\n';
  out << "output.dump_uploads = " << (cfg.dump_uploads ? "true" : "false") << '\n';
  out << "runtime.parallel_clients = " << (cfg.parallel_clients ? "true" : "false") << '\n';
  out << '\n';
  out << "data.source = " << (cfg.source == DataSource::kSynthetic ? "synthetic" : "csv")
      << '\n';
  if (cfg.network_seed_set) out << "data.seed = " << cfg.network.seed << '\n';
  if (cfg.source == DataSource::kSynthetic) {
    out << "data.area_length = " << format_double(cfg.network.area_length_m) << '\n';
    out << "data.area_width = " << format_double(cfg.network.area_width_m) << '\n';
    out << "data.ap_count = " << cfg.network.ap_count << '\n';
    out << "data.rp_count = " << cfg.network.rp_count << '\n';
    out << "data.repetitions = " << cfg.network.repetitions << '\n';
    out << "data.path_loss_exponent = " << format_double(cfg.network.path_loss_exponent)
        << '\n';
    out << "data.shadowing_sigma = " << format_double(cfg.network.shadowing_sigma_db)
        << '\n';
    out << "data.frequency_hz = " << format_double(cfg.network.frequency_hz) << '\n';
    out << "data.tx_power_dbm = " << format_double(cfg.network.tx_power_dbm) << '\n';
    out << "data.reference_distance_m = "
        << format_double(cfg.network.reference_distance_m) << '\n';
    out << "data.sensitivity_floor_dbm = "
        << format_double(cfg.network.sensitivity_floor_dbm) << '\n';
  } else {
    out << "data.csv_path = " << cfg.csv_path << '\n';
    out << "data.feature_columns = ";
    for (std::size_t i = 0; i < cfg.csv_schema.feature_columns.size(); ++i) {
      out << (i == 0 ? "" : ",") << cfg.csv_schema.feature_columns[i];
    }
    out << '\n';
    out << "data.target_columns = ";
    for (std::size_t i = 0; i < cfg.csv_schema.target_columns.size(); ++i) {
      out << (i == 0 ? "" : ",") << cfg.csv_schema.target_columns[i];
    }
    out << '\n';
    out << "data.not_detected_sentinel = "
        << format_double(cfg.csv_schema.not_detected_sentinel) << '\n';
  }
  out << "data.partition = "
      << (cfg.partition_strategy == PartitionStrategy::kRandom ? "random" : "spatial")
      << '\n';
  out << "data.validation = "
      << (cfg.validation == ValidationSplit::kPerReference ? "per_reference" : "fraction")
      << '\n';
  out << "data.validation_fraction = " << format_double(cfg.validation_fraction) << '\n';
  out << '\n';
  if (cfg.input_units >= 1) out << "model.input_units = " << cfg.input_units << '\n';
  out << "model.hidden_units = " << cfg.hidden_units << '\n';
  if (cfg.output_units >= 1) out << "model.output_units = " << cfg.output_units << '\n';
  out << '\n';
  out << "train.rounds = " << cfg.schedule.rounds << '\n';
  out << "train.local_epochs = " << cfg.schedule.local_epochs << '\n';
  out << "train.warmup_epochs = " << cfg.schedule.warmup_epochs << '\n';
  out << "train.batch_size = " << cfg.schedule.batch_size << '\n';
  out << "train.lambda = " << format_double(cfg.schedule.lambda) << '\n';
  out << "train.learning_rate = " << format_double(cfg.schedule.learning_rate) << '\n';
  out << "train.beta1 = " << format_double(cfg.schedule.beta1) << '\n';
  out << "train.beta2 = " << format_double(cfg.schedule.beta2) << '\n';
  out << "train.epsilon = " << format_double(cfg.schedule.epsilon) << '\n';
  out << '\n';
  if (cfg.segment_count.has_value()) out << "segment.count = " << *cfg.segment_count << '\n';
  if (cfg.segment_resolution.has_value()) {
    out << "segment.resolution = " << format_double(*cfg.segment_resolution) << '\n';
  }
  out << "segment.strategy = "
      << (cfg.split_strategy == SplitStrategy::kUniform ? "uniform" : "density") << '\n';
  if (!cfg.segment_y_min.empty()) {
    out << "segment.y_min = ";
    for (std::size_t i = 0; i < cfg.segment_y_min.size(); ++i) {
      out << (i == 0 ? "" : ",") << format_double(cfg.segment_y_min[i]);
    }
    out << '\n';
    out << "segment.y_max = ";
    for (std::size_t i = 0; i < cfg.segment_y_max.size(); ++i) {
      out << (i == 0 ? "" : ",") << format_double(cfg.segment_y_max[i]);
    }
    out << '\n';
  }
  out << '\n';
  out << "comms.bits_resolution = " << cfg.comms.bits_resolution << '\n';
  out << "comms.channels = " << format_double(cfg.comms.channels) << '\n';
  out << "comms.max_power_w = " << format_double(cfg.comms.max_power_w) << '\n';
  out << "comms.channel_gain = " << format_double(cfg.comms.channel_gain_sq) << '\n';
  out << "comms.energy_per_bit_j = " << format_double(cfg.comms.energy_per_bit_j) << '\n';
  out << "comms.energy_per_param_update_j = "
      << format_double(cfg.comms.energy_per_param_update_j) << '\n';
  if (!cfg.sweep.empty()) {
    out << '\n';
    if (!cfg.sweep.schemes.empty()) {
      out << "sweep.schemes = ";
      for (std::size_t i = 0; i < cfg.sweep.schemes.size(); ++i) {
        out << (i == 0 ? "" : ",") << scheme_name(cfg.sweep.schemes[i]);
      }
      out << '\n';
    }
    if (!cfg.sweep.clients.empty()) {
      out << "sweep.clients = ";
      for (std::size_t i = 0; i < cfg.sweep.clients.size(); ++i) {
        out << (i == 0 ? "" : ",") << cfg.sweep.clients[i];
      }
      out << '\n';
    }
    if (!cfg.sweep.lambdas.empty()) {
      out << "sweep.lambda = ";
      for (std::size_t i = 0; i < cfg.sweep.lambdas.size(); ++i) {
        out << (i == 0 ? "" : ",") << format_double(cfg.sweep.lambdas[i]);
      }
      out << '\n';
    }
    if (!cfg.sweep.segments.empty()) {
      out << "sweep.segments = ";
      for (std::size_t i = 0; i < cfg.sweep.segments.size(); ++i) {
        out << (i == 0 ? "" : ",") << cfg.sweep.segments[i];
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace fdreg
