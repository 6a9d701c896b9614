#include "ozbias/train.hpp"

#include <fstream>

#include "ozbias/adam.hpp"
#include "ozbias/errors.hpp"
#include "ozbias/io.hpp"
#include "ozbias/rng.hpp"

namespace ozbias {

namespace {

enum : std::uint64_t {
  kInitStream = 11,
  kShuffleStream = 12,
  kDropoutStream = 13,
};

std::vector<Tens<float>*> param_list(UNetParams<float>& p) {
  std::vector<Tens<float>*> list;
  p.for_each([&](const std::string&, Tens<float>& t) { list.push_back(&t); });
  return list;
}

std::vector<const Tens<float>*> grad_list(const UNetParams<float>& p) {
  std::vector<const Tens<float>*> list;
  p.for_each(
      [&](const std::string&, const Tens<float>& t) { list.push_back(&t); });
  return list;
}

}  // namespace

Tens<float> stack_to_tensor(const GridStack& stack) {
  Tens<float> t =
      Tens<float>::zeros({stack.channel_count(), stack.spec.rows(),
                          stack.spec.cols()});
  for (std::size_t i = 0; i < stack.data.size(); ++i) {
    t.v[i] = static_cast<float>(stack.data[i]);
  }
  return t;
}

double dataset_target_mean(const Dataset& ds) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& day : ds.days) {
    for (std::size_t i = 0; i < day.target.values.size(); ++i) {
      if (day.target.mask[i]) {
        sum += day.target.values[i];
        ++n;
      }
    }
  }
  if (n == 0) throw AllMasked("dataset has no valid target cells");
  return sum / static_cast<double>(n);
}

ModelCheckpoint train_unet(const Dataset& train_ds, UNetConfig cfg) {
  cfg.validate();
  if (train_ds.days.empty()) throw EmptyDataset("training set is empty");
  if (static_cast<int>(train_ds.channels.size()) != cfg.in_channels) {
    throw ChannelMismatch("config expects " +
                          std::to_string(cfg.in_channels) +
                          " channels, dataset has " +
                          std::to_string(train_ds.channels.size()));
  }

  ModelCheckpoint ckpt;
  ckpt.config = cfg;
  ckpt.channels = train_ds.channels;
  ckpt.train_target_mean = dataset_target_mean(train_ds);

  std::vector<GridStack> stacks;
  stacks.reserve(train_ds.days.size());
  for (const auto& day : train_ds.days) stacks.push_back(day.stack);
  ckpt.norm = fit_normalizer(stacks);

  std::vector<Tens<float>> inputs;
  inputs.reserve(train_ds.days.size());
  for (const auto& day : train_ds.days) {
    inputs.push_back(stack_to_tensor(apply_normalizer(ckpt.norm, day.stack)));
  }

  auto init_rng = make_rng(cfg.seed, kInitStream);
  ckpt.params = UNetParams<float>::init(cfg, init_rng);
  auto params = param_list(ckpt.params);
  auto state = AdamState<float>::for_params(params);

  auto shuffle_rng = make_rng(cfg.seed, kShuffleStream);
  auto dropout_rng = make_rng(cfg.seed, kDropoutStream);

  const int n_days = static_cast<int>(train_ds.days.size());
  std::vector<int> order(n_days);
  for (int i = 0; i < n_days; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    double epoch_loss = 0.0;
    for (int idx : order) {
      UNetCtx<float> ctx;
      Tens<float> pred = unet_forward(inputs[idx], ckpt.params, cfg, true,
                                      dropout_rng, &ctx);
      MaskedMse<float> loss = masked_mse(pred, train_ds.days[idx].target);
      epoch_loss += loss.loss;
      UNetGrads<float> grads =
          unet_backward(loss.dpred, ctx, ckpt.params, cfg);
      adam_step(params, grad_list(grads.p), state, cfg.lr, cfg.weight_decay,
                cfg.decoupled_weight_decay);
    }
    ckpt.history.push_back(epoch_loss / n_days);
  }
  return ckpt;
}

std::vector<double> predict_unet(const ModelCheckpoint& ckpt,
                                 const GridStack& stack) {
  if (stack.channels != ckpt.channels) {
    throw ChannelMismatch("stack channels differ from checkpoint");
  }
  Tens<float> x = stack_to_tensor(apply_normalizer(ckpt.norm, stack));
  std::mt19937 rng;  // unused in eval mode
  Tens<float> pred = unet_forward(x, ckpt.params, ckpt.config, false, rng);
  return std::vector<double>(pred.v.begin(), pred.v.end());
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  nlohmann::json header;
  header["format"] = "ckpt";
  header["version"] = 1;
  header["kind"] = "unet";
  header["config"] = {{"in_channels", ckpt.config.in_channels},
                      {"base_width", ckpt.config.base_width},
                      {"depth", ckpt.config.depth},
                      {"dropout_rate", ckpt.config.dropout_rate},
                      {"lr", ckpt.config.lr},
                      {"weight_decay", ckpt.config.weight_decay},
                      {"decoupled_weight_decay",
                       ckpt.config.decoupled_weight_decay},
                      {"epochs", ckpt.config.epochs},
                      {"seed", ckpt.config.seed}};
  header["channels"] = ckpt.channels;
  header["norm"] = {{"mean", ckpt.norm.mean},
                    {"stddev", ckpt.norm.stddev},
                    {"epsilon", ckpt.norm.epsilon}};
  header["history"] = ckpt.history;
  header["train_target_mean"] = ckpt.train_target_mean;
  auto params_json = nlohmann::json::array();
  ckpt.params.for_each([&](const std::string& name, const Tens<float>& t) {
    std::vector<int> shape(t.dim.begin(), t.dim.begin() + t.nd);
    params_json.push_back({{"name", name}, {"shape", shape}});
  });
  header["params"] = params_json;

  std::string payload;
  ckpt.params.for_each([&](const std::string&, const Tens<float>& t) {
    payload.append(reinterpret_cast<const char*>(t.data()),
                   t.size() * sizeof(float));
  });
  write_header_and_payload(path, header, payload);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  auto header = read_header(in, path);
  if (header.value("format", "") != "ckpt" ||
      header.value("kind", "") != "unet") {
    throw IoError(path + " is not a unet checkpoint");
  }
  ModelCheckpoint ckpt;
  const auto& jc = header.at("config");
  ckpt.config.in_channels = jc.at("in_channels").get<int>();
  ckpt.config.base_width = jc.at("base_width").get<int>();
  ckpt.config.depth = jc.at("depth").get<int>();
  ckpt.config.dropout_rate = jc.at("dropout_rate").get<double>();
  ckpt.config.lr = jc.at("lr").get<double>();
  ckpt.config.weight_decay = jc.at("weight_decay").get<double>();
  ckpt.config.decoupled_weight_decay =
      jc.at("decoupled_weight_decay").get<bool>();
  ckpt.config.epochs = jc.at("epochs").get<int>();
  ckpt.config.seed = jc.at("seed").get<std::uint64_t>();
  ckpt.config.validate();
  ckpt.channels = header.at("channels").get<std::vector<std::string>>();
  ckpt.norm.mean = header.at("norm").at("mean").get<std::vector<double>>();
  ckpt.norm.stddev = header.at("norm").at("stddev").get<std::vector<double>>();
  ckpt.norm.epsilon = header.at("norm").at("epsilon").get<double>();
  ckpt.history = header.at("history").get<std::vector<double>>();
  ckpt.train_target_mean = header.at("train_target_mean").get<double>();

  ckpt.params = UNetParams<float>::make(ckpt.config);
  std::size_t expected = 0;
  ckpt.params.for_each([&](const std::string&, const Tens<float>& t) {
    expected += t.size();
  });
  std::size_t declared = 0;
  for (const auto& e : header.at("params")) {
    std::size_t n = 1;
    for (int d : e.at("shape").get<std::vector<int>>()) n *= d;
    declared += n;
  }
  if (declared != expected) {
    throw DataError("checkpoint parameter count does not match architecture");
  }
  ckpt.params.for_each([&](const std::string&, Tens<float>& t) {
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != t.size() * sizeof(float)) {
      throw IoError("truncated parameters in " + path);
    }
  });
  char extra;
  if (in.read(&extra, 1) && in.gcount() == 1) {
    throw IoError("trailing bytes in " + path);
  }
  return ckpt;
}

}  // namespace ozbias
