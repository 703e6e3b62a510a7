#include "core/config.hpp"

#include <string>

#include "core/errors.hpp"
#include "doctest.h"

using namespace fdreg;

namespace {

const char* kMinimalFd =
    "scheme = fd\n"
    "data.source = synthetic\n"
    "segment.count = 10\n";

std::string error_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config picks up the documented defaults") {
  const ExperimentConfig cfg = parse_config_text(kMinimalFd, "inline");
  CHECK(cfg.scheme == Scheme::kFd);
  CHECK(cfg.clients == 5);
  CHECK(cfg.seed == 200);
  CHECK(cfg.network.ap_count == 10);
  CHECK(cfg.network.rp_count == 100);
  CHECK(cfg.network.repetitions == 10);
  CHECK(cfg.network.path_loss_exponent == 3.23);
  CHECK(cfg.network.shadowing_sigma_db == 2.0);
  CHECK(cfg.hidden_units == 1000);
  CHECK(cfg.schedule.rounds == 100);
  CHECK(cfg.schedule.batch_size == 32);
  CHECK(cfg.schedule.lambda == 0.1);
  CHECK(cfg.schedule.learning_rate == 0.0001);
  CHECK(cfg.schedule.beta1 == 0.1);
  CHECK(cfg.schedule.beta2 == 0.99);
  CHECK(cfg.segment_count.has_value());
  CHECK(*cfg.segment_count == 10);
  CHECK(cfg.comms.bits_resolution == 32);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("comments, spacing, and overrides parse") {
  const ExperimentConfig cfg = parse_config_text(
      "# experiment\n"
      "scheme = fl   # distillation off\n"
      "clients=3\n"
      "  data.source =  synthetic \n"
      "train.lambda = 1.5\n"
      "sweep.clients = 2, 5 ,10\n",
      "inline");
  CHECK(cfg.scheme == Scheme::kFl);
  CHECK(cfg.clients == 3);
  CHECK(cfg.schedule.lambda == 1.5);
  CHECK(cfg.sweep.clients == std::vector<std::size_t>{2, 5, 10});
  CHECK_NOTHROW(validate(cfg));  // fl does not need segment.count
}

TEST_CASE("a missing segment count fails naming the key") {
  const ExperimentConfig cfg =
      parse_config_text("scheme = fd\ndata.source = synthetic\n", "inline");
  const std::string message = error_message([&] { validate(cfg); });
  CHECK(message.find("segment.count") != std::string::npos);
}

TEST_CASE("unknown, duplicate, and malformed keys are rejected with locations") {
  const std::string unknown = error_message(
      [] { parse_config_text("scheme = fd\ndata.source = synthetic\nsegm.count = 1\n", "x"); });
  CHECK(unknown.find("segm.count") != std::string::npos);
  CHECK(unknown.find("x:3") != std::string::npos);

  CHECK_THROWS_AS(parse_config_text("scheme = fd\nscheme = fl\n", "x"), ParseError);
  CHECK_THROWS_AS(parse_config_text("scheme fd\n", "x"), ParseError);
  const std::string bad_number = error_message(
      [] { parse_config_text("scheme = fd\ndata.source = synthetic\nclients = four\n", "x"); });
  CHECK(bad_number.find("clients") != std::string::npos);
}

TEST_CASE("missing required keys are named") {
  const std::string message =
      error_message([] { parse_config_text("clients = 5\n", "x"); });
  CHECK(message.find("scheme") != std::string::npos);
}

TEST_CASE("validation rules") {
  ExperimentConfig cfg = parse_config_text(kMinimalFd, "inline");
  cfg.clients = 1;  // fd needs a peer
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = parse_config_text(kMinimalFd, "inline");
  cfg.schedule.beta1 = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = parse_config_text(kMinimalFd, "inline");
  cfg.validation = ValidationSplit::kFraction;
  cfg.validation_fraction = 1.5;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = parse_config_text(kMinimalFd, "inline");
  cfg.source = DataSource::kCsv;
  const std::string message = error_message([&] { validate(cfg); });
  CHECK(message.find("data.csv_path") != std::string::npos);
}

TEST_CASE("sweeping fd demands enough clients on the axis") {
  ExperimentConfig cfg = parse_config_text(
      "scheme = fl\n"
      "data.source = synthetic\n"
      "segment.count = 10\n"
      "sweep.schemes = fd,fl\n"
      "sweep.clients = 1,5\n",
      "inline");
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("the resolved snapshot is a fixed point of parse/render") {
  const ExperimentConfig cfg = parse_config_text(
      "scheme = fd\n"
      "clients = 4\n"
      "seed = 17\n"
      "data.source = synthetic\n"
      "data.ap_count = 6\n"
      "data.shadowing_sigma = 1.25\n"
      "model.hidden_units = 64\n"
      "train.rounds = 12\n"
      "train.lambda = 0.25\n"
      "segment.count = 8\n"
      "segment.strategy = density\n"
      "sweep.lambda = 0.1,1\n",
      "inline");
  const std::string rendered = render_config(cfg);
  const ExperimentConfig reparsed = parse_config_text(rendered, "snapshot");
  CHECK(render_config(reparsed) == rendered);
  CHECK(reparsed.clients == 4);
  CHECK(reparsed.network.ap_count == 6);
  CHECK(*reparsed.segment_count == 8);
  CHECK(reparsed.split_strategy == SplitStrategy::kDensity);
  CHECK(reparsed.sweep.lambdas == std::vector<double>{0.1, 1.0});
  CHECK_NOTHROW(validate(reparsed));
}

TEST_CASE("scheme names round-trip") {
  for (const Scheme s :
       {Scheme::kFd, Scheme::kFl, Scheme::kStandalone, Scheme::kCentralized}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("federated"), ConfigError);
}
