#include "ikc/models.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ikc {

using nlohmann::json;

std::string to_string(Conditioning c) {
  switch (c) {
    case Conditioning::sft: return "sft";
    case Conditioning::direct_concat: return "direct-concat";
    case Conditioning::first_layer_concat: return "first-layer-concat";
  }
  return "sft";
}

Conditioning conditioning_from_string(const std::string& s) {
  if (s == "sft") return Conditioning::sft;
  if (s == "direct-concat") return Conditioning::direct_concat;
  if (s == "first-layer-concat") return Conditioning::first_layer_concat;
  throw Error::invalid_parameter("unknown conditioning mode: " + s);
}

void SftmdConfig::validate() const {
  if (scale < 2 || scale > 4) throw Error::invalid_parameter("SftmdConfig: scale must be 2, 3 or 4");
  if (feature_channels < 8) throw Error::invalid_parameter("SftmdConfig: feature_channels < 8");
  if (num_res_blocks < 1) throw Error::invalid_parameter("SftmdConfig: num_res_blocks < 1");
  if (code_dim < 1) throw Error::invalid_parameter("SftmdConfig: code_dim < 1");
}

// ---- CondSite ---------------------------------------------------------------

TensorT<float> SftmdNet::CondSite::forward(const TensorT<float>& f, const TensorT<float>& maps,
                                           bool train) {
  switch (mode) {
    case Conditioning::sft:
      return sft.forward(f, maps, train);
    case Conditioning::direct_concat:
      return fuse.forward(nn::concat_channels(f, maps), train);
    case Conditioning::first_layer_concat:
      return f;
  }
  return f;
}

TensorT<float> SftmdNet::CondSite::backward(const TensorT<float>& gy) {
  switch (mode) {
    case Conditioning::sft:
      return sft.backward(gy).first;
    case Conditioning::direct_concat:
      return nn::split_channels(fuse.backward(gy), feat_ch).first;
    case Conditioning::first_layer_concat:
      return gy;
  }
  return gy;
}

void SftmdNet::CondSite::params(nn::ParamList<float>& out) {
  if (mode == Conditioning::sft) sft.params(out);
  if (mode == Conditioning::direct_concat) fuse.params(out);
}

void SftmdNet::CondSite::init(Rng& rng) {
  if (mode == Conditioning::sft) sft.init(rng);
  if (mode == Conditioning::direct_concat) fuse.init(rng);
}

// ---- ResBlock ---------------------------------------------------------------

TensorT<float> SftmdNet::ResBlock::forward(const TensorT<float>& x, const TensorT<float>& maps,
                                           bool train) {
  TensorT<float> f = conv1.forward(x, train);
  f = site1.forward(f, maps, train);
  f = act.forward(f, train);
  f = conv2.forward(f, train);
  f = site2.forward(f, maps, train);
  for (size_t i = 0; i < f.data.size(); ++i) f.data[i] += x.data[i];
  return f;
}

TensorT<float> SftmdNet::ResBlock::backward(const TensorT<float>& gy) {
  TensorT<float> g = site2.backward(gy);
  g = conv2.backward(g);
  g = act.backward(g);
  g = site1.backward(g);
  g = conv1.backward(g);
  for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += gy.data[i];  // skip path
  return g;
}

void SftmdNet::ResBlock::params(nn::ParamList<float>& out) {
  conv1.params(out);
  site1.params(out);
  conv2.params(out);
  site2.params(out);
}

void SftmdNet::ResBlock::init(Rng& rng) {
  conv1.init(rng);
  conv2.init(rng);
  site1.init(rng);
  site2.init(rng);
}

// ---- SftmdNet ---------------------------------------------------------------

namespace {

std::vector<int> upsample_factors(int scale) {
  if (scale == 4) return {2, 2};
  return {scale};
}

}  // namespace

SftmdNet::SftmdNet(const SftmdConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int c = cfg_.feature_channels, b = cfg_.code_dim;
  const bool flc = cfg_.conditioning == Conditioning::first_layer_concat;

  head_ = nn::Conv2d<float>(flc ? 3 + b : 3, c, 3, "head");

  auto make_site = [&](const std::string& name) {
    CondSite s;
    s.mode = cfg_.conditioning;
    s.feat_ch = c;
    if (s.mode == Conditioning::sft) s.sft = nn::SftLayer<float>(c, b, name);
    if (s.mode == Conditioning::direct_concat) s.fuse = nn::Conv2d<float>(c + b, c, 3, name + ".fuse");
    return s;
  };

  blocks_.resize(size_t(cfg_.num_res_blocks));
  for (int i = 0; i < cfg_.num_res_blocks; ++i) {
    auto& blk = blocks_[size_t(i)];
    const std::string p = "block" + std::to_string(i);
    blk.conv1 = nn::Conv2d<float>(c, c, 3, p + ".conv1");
    blk.conv2 = nn::Conv2d<float>(c, c, 3, p + ".conv2");
    blk.site1 = make_site(p + ".site1");
    blk.site2 = make_site(p + ".site2");
  }

  mid_ = nn::Conv2d<float>(c, c, 3, "mid");
  global_site_ = make_site("global.site");

  int stage = 0;
  for (int r : upsample_factors(cfg_.scale)) {
    UpStage up;
    up.conv = nn::Conv2d<float>(c, c * r * r, 3, "up" + std::to_string(stage++) + ".conv");
    up.shuffle = nn::PixelShuffle<float>(r);
    up_.push_back(std::move(up));
  }

  tail1_ = nn::Conv2d<float>(c, c, 3, "tail1");
  tail2_ = nn::Conv2d<float>(c, 3, 3, "tail2");
}

void SftmdNet::init(Rng& rng) {
  head_.init(rng);
  for (auto& blk : blocks_) blk.init(rng);
  mid_.init(rng);
  global_site_.init(rng);
  for (auto& up : up_) up.conv.init(rng);
  tail1_.init(rng);
  tail2_.init(rng);
}

TensorT<float> SftmdNet::forward(const TensorT<float>& lr, const TensorT<float>& code, bool train) {
  if (int(code.numel()) != cfg_.code_dim)
    throw Error::invalid_parameter("sftmd forward: code length does not match code_dim");
  if (lr.shape.size() != 3 || lr.channels() != 3)
    throw Error::invalid_parameter("sftmd forward: expected a 3xHxW input");

  const TensorT<float> maps = nn::stretch(code, lr.height(), lr.width());

  TensorT<float> f0;
  if (cfg_.conditioning == Conditioning::first_layer_concat) {
    f0 = head_.forward(nn::concat_channels(lr, maps), train);
  } else {
    f0 = head_.forward(lr, train);
  }

  TensorT<float> f = f0;
  for (auto& blk : blocks_) f = blk.forward(f, maps, train);
  f = mid_.forward(f, train);
  for (size_t i = 0; i < f.data.size(); ++i) f.data[i] += f0.data[i];
  f = global_site_.forward(f, maps, train);

  for (auto& up : up_) {
    f = up.conv.forward(f, train);
    f = up.shuffle.forward(f, train);
    f = up.act.forward(f, train);
  }
  f = tail1_.forward(f, train);
  f = tail_act_.forward(f, train);
  return tail2_.forward(f, train);
}

void SftmdNet::backward(const TensorT<float>& gy) {
  TensorT<float> g = tail2_.backward(gy);
  g = tail_act_.backward(g);
  g = tail1_.backward(g);
  for (auto it = up_.rbegin(); it != up_.rend(); ++it) {
    g = it->act.backward(g);
    g = it->shuffle.backward(g);
    g = it->conv.backward(g);
  }
  g = global_site_.backward(g);
  TensorT<float> g_f0 = g;  // global residual skip
  g = mid_.backward(g);
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = it->backward(g);
  for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += g_f0.data[i];
  head_.backward(g);
}

nn::ParamList<float> SftmdNet::params() {
  nn::ParamList<float> out;
  head_.params(out);
  for (auto& blk : blocks_) blk.params(out);
  mid_.params(out);
  global_site_.params(out);
  for (auto& up : up_) up.conv.params(out);
  tail1_.params(out);
  tail2_.params(out);
  return out;
}

// ---- PredictorNet -----------------------------------------------------------

PredictorNet::PredictorNet(int code_dim, int base_channels)
    : code_dim_(code_dim),
      base_(base_channels),
      c1_(3, base_channels, 5, "p.conv1"),
      c2_(base_channels, base_channels, 3, "p.conv2"),
      c3_(base_channels, base_channels, 3, "p.conv3"),
      c4_(base_channels, code_dim, 3, "p.conv4") {
  if (code_dim < 1) throw Error::invalid_parameter("PredictorNet: code_dim < 1");
}

void PredictorNet::init(Rng& rng) {
  c1_.init(rng);
  c2_.init(rng);
  c3_.init(rng);
  c4_.init(rng);
}

TensorT<float> PredictorNet::forward(const TensorT<float>& lr, bool train) {
  TensorT<float> f = a1_.forward(c1_.forward(lr, train), train);
  f = a2_.forward(c2_.forward(f, train), train);
  f = a3_.forward(c3_.forward(f, train), train);
  f = a4_.forward(c4_.forward(f, train), train);
  return pool_.forward(f, train);
}

void PredictorNet::backward(const TensorT<float>& gcode) {
  TensorT<float> g = pool_.backward(gcode);
  g = c4_.backward(a4_.backward(g));
  g = c3_.backward(a3_.backward(g));
  g = c2_.backward(a2_.backward(g));
  c1_.backward(a1_.backward(g));
}

nn::ParamList<float> PredictorNet::params() {
  nn::ParamList<float> out;
  c1_.params(out);
  c2_.params(out);
  c3_.params(out);
  c4_.params(out);
  return out;
}

// ---- CorrectorNet -----------------------------------------------------------

CorrectorNet::CorrectorNet(int code_dim, int base_channels)
    : code_dim_(code_dim),
      base_(base_channels),
      s1_(3, base_channels, 3, "c.sr1"),
      s2_(base_channels, base_channels, 3, "c.sr2"),
      s3_(base_channels, base_channels, 3, "c.sr3"),
      s4_(base_channels, base_channels, 3, "c.sr4"),
      s5_(base_channels, base_channels, 3, "c.sr5"),
      f1_(code_dim, base_channels, "c.fc1"),
      f2_(base_channels, base_channels, "c.fc2"),
      m1_(2 * base_channels, base_channels, 1, "c.mix1"),
      m2_(base_channels, base_channels, 1, "c.mix2"),
      m3_(base_channels, code_dim, 1, "c.mix3") {
  if (code_dim < 1) throw Error::invalid_parameter("CorrectorNet: code_dim < 1");
}

void CorrectorNet::init(Rng& rng) {
  s1_.init(rng);
  s2_.init(rng);
  s3_.init(rng);
  s4_.init(rng);
  s5_.init(rng);
  f1_.init(rng);
  f2_.init(rng);
  m1_.init(rng);
  m2_.init(rng);
  m3_.init(rng);
}

TensorT<float> CorrectorNet::forward(const TensorT<float>& sr, const TensorT<float>& code,
                                     bool train) {
  if (int(code.numel()) != code_dim_)
    throw Error::invalid_parameter("corrector forward: code length does not match code_dim");
  sr_h_ = sr.height();
  sr_w_ = sr.width();

  TensorT<float> f = sa1_.forward(s1_.forward(sr, train), train);
  f = sa2_.forward(s2_.forward(f, train), train);
  f = sa3_.forward(s3_.forward(f, train), train);
  f = sa4_.forward(s4_.forward(f, train), train);
  f = sa5_.forward(s5_.forward(f, train), train);

  TensorT<float> fh = fa1_.forward(f1_.forward(code, train), train);
  fh = fa2_.forward(f2_.forward(fh, train), train);
  TensorT<float> fh_maps = nn::stretch(fh, sr_h_, sr_w_);

  TensorT<float> t = nn::concat_channels(f, fh_maps);
  t = ma1_.forward(m1_.forward(t, train), train);
  t = ma2_.forward(m2_.forward(t, train), train);
  t = ma3_.forward(m3_.forward(t, train), train);
  return pool_.forward(t, train);
}

void CorrectorNet::backward(const TensorT<float>& gdelta) {
  TensorT<float> g = pool_.backward(gdelta);
  g = m3_.backward(ma3_.backward(g));
  g = m2_.backward(ma2_.backward(g));
  g = m1_.backward(ma1_.backward(g));
  auto [g_sr, g_fh_maps] = nn::split_channels(g, base_);

  TensorT<float> g_fh = nn::stretch_backward(g_fh_maps);
  g_fh = f2_.backward(fa2_.backward(g_fh));
  f1_.backward(fa1_.backward(g_fh));

  g_sr = s5_.backward(sa5_.backward(g_sr));
  g_sr = s4_.backward(sa4_.backward(g_sr));
  g_sr = s3_.backward(sa3_.backward(g_sr));
  g_sr = s2_.backward(sa2_.backward(g_sr));
  s1_.backward(sa1_.backward(g_sr));
}

nn::ParamList<float> CorrectorNet::params() {
  nn::ParamList<float> out;
  s1_.params(out);
  s2_.params(out);
  s3_.params(out);
  s4_.params(out);
  s5_.params(out);
  f1_.params(out);
  f2_.params(out);
  m1_.params(out);
  m2_.params(out);
  m3_.params(out);
  return out;
}

// ---- checkpoints ------------------------------------------------------------

namespace {

constexpr uint32_t kCheckpointVersion = 1;

std::string repr_to_string(CodeRepresentation r) {
  return r == CodeRepresentation::pca ? "pca" : "width-scalar";
}

CodeRepresentation repr_from_string(const std::string& s) {
  if (s == "pca") return CodeRepresentation::pca;
  if (s == "width-scalar") return CodeRepresentation::width_scalar;
  throw Error::io("unknown code representation in checkpoint: " + s);
}

void write_raw(std::ostream& os, const void* p, size_t n) {
  os.write(reinterpret_cast<const char*>(p), std::streamsize(n));
}

void read_raw(std::istream& is, void* p, size_t n) {
  is.read(reinterpret_cast<char*>(p), std::streamsize(n));
  if (!is) throw Error::io("checkpoint truncated");
}

json header_common(const std::string& kind, const CheckpointInfo& info,
                   nn::ParamList<float>& params, bool has_adam) {
  json j;
  j["kind"] = kind;
  j["step"] = info.step;
  j["codec_fingerprint"] = info.codec_fingerprint;
  j["representation"] = repr_to_string(info.representation);
  j["width_range"] = {info.width_min, info.width_max};
  j["has_adam"] = has_adam;
  json plist = json::array();
  for (auto& p : params) plist.push_back({{"name", p.name}, {"shape", p.value->shape}});
  j["params"] = plist;
  return j;
}

void write_checkpoint_file(const std::filesystem::path& path, const json& header,
                           nn::ParamList<float>& params, Adam* adam) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error::io("cannot open checkpoint for writing: " + path.string());
  const std::string hdr = header.dump();
  os.write("IKCC", 4);
  uint32_t ver = kCheckpointVersion;
  uint64_t hlen = hdr.size();
  write_raw(os, &ver, sizeof(ver));
  write_raw(os, &hlen, sizeof(hlen));
  os.write(hdr.data(), std::streamsize(hdr.size()));
  for (auto& p : params) write_raw(os, p.value->data.data(), p.value->numel() * sizeof(float));
  if (adam) {
    uint64_t t = adam->steps();
    write_raw(os, &t, sizeof(t));
    for (auto& m : adam->moment1()) write_raw(os, m.data(), m.size() * sizeof(float));
    for (auto& v : adam->moment2()) write_raw(os, v.data(), v.size() * sizeof(float));
  }
  if (!os) throw Error::io("checkpoint write failed: " + path.string());
}

struct RawCheckpoint {
  json header;
  std::ifstream is;
};

RawCheckpoint open_checkpoint(const std::filesystem::path& path) {
  RawCheckpoint raw;
  raw.is.open(path, std::ios::binary);
  if (!raw.is) throw Error::io("cannot open checkpoint: " + path.string());
  char magic[4];
  raw.is.read(magic, 4);
  if (!raw.is || std::memcmp(magic, "IKCC", 4) != 0)
    throw Error::io("not a checkpoint file: " + path.string());
  uint32_t ver = 0;
  uint64_t hlen = 0;
  read_raw(raw.is, &ver, sizeof(ver));
  read_raw(raw.is, &hlen, sizeof(hlen));
  if (ver != kCheckpointVersion) throw Error::io("unsupported checkpoint version");
  std::string hdr(hlen, '\0');
  read_raw(raw.is, hdr.data(), hlen);
  raw.header = json::parse(hdr);
  return raw;
}

CheckpointInfo info_from_header(const json& h) {
  CheckpointInfo info;
  info.kind = h.at("kind").get<std::string>();
  info.step = h.at("step").get<uint64_t>();
  info.codec_fingerprint = h.at("codec_fingerprint").get<std::string>();
  info.representation = repr_from_string(h.at("representation").get<std::string>());
  info.width_min = h.at("width_range")[0].get<double>();
  info.width_max = h.at("width_range")[1].get<double>();
  return info;
}

void check_fingerprint(const CheckpointInfo& info, const std::string& expected,
                       const std::filesystem::path& path) {
  if (!expected.empty() && info.codec_fingerprint != expected)
    throw Error::invalid_configuration("checkpoint " + path.string() +
                                       " was trained with a different codec (fingerprint " +
                                       info.codec_fingerprint + ", expected " + expected + ")");
}

void read_params_and_adam(RawCheckpoint& raw, nn::ParamList<float>& params, Adam* adam) {
  const json& plist = raw.header.at("params");
  if (plist.size() != params.size()) throw Error::io("checkpoint parameter count mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    const auto shape = plist[i].at("shape").get<std::vector<int>>();
    if (shape != params[i].value->shape)
      throw Error::io("checkpoint parameter shape mismatch at " + params[i].name);
    read_raw(raw.is, params[i].value->data.data(), params[i].value->numel() * sizeof(float));
  }
  const bool has_adam = raw.header.value("has_adam", false);
  if (adam) {
    if (!has_adam) throw Error::io("checkpoint has no optimizer state to restore");
    uint64_t t = 0;
    read_raw(raw.is, &t, sizeof(t));
    adam->set_steps(t);
    for (auto& m : adam->moment1()) read_raw(raw.is, m.data(), m.size() * sizeof(float));
    for (auto& v : adam->moment2()) read_raw(raw.is, v.data(), v.size() * sizeof(float));
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, SftmdNet& net, const CheckpointInfo& info,
                     Adam* adam) {
  auto params = net.params();
  json h = header_common("sftmd", info, params, adam != nullptr);
  h["config"] = {{"feature_channels", net.config().feature_channels},
                 {"num_res_blocks", net.config().num_res_blocks},
                 {"scale", net.config().scale},
                 {"code_dim", net.config().code_dim},
                 {"conditioning", to_string(net.config().conditioning)}};
  write_checkpoint_file(path, h, params, adam);
}

void save_checkpoint(const std::filesystem::path& path, PredictorNet& net,
                     const CheckpointInfo& info, Adam* adam) {
  auto params = net.params();
  json h = header_common("predictor", info, params, adam != nullptr);
  h["config"] = {{"code_dim", net.code_dim()}, {"base_channels", net.base_channels()}};
  write_checkpoint_file(path, h, params, adam);
}

void save_checkpoint(const std::filesystem::path& path, CorrectorNet& net,
                     const CheckpointInfo& info, Adam* adam) {
  auto params = net.params();
  json h = header_common("corrector", info, params, adam != nullptr);
  h["config"] = {{"code_dim", net.code_dim()}, {"base_channels", net.base_channels()}};
  write_checkpoint_file(path, h, params, adam);
}

LoadedSftmd load_sftmd(const std::filesystem::path& path, const std::string& expected_fp,
                       Adam* adam_to_restore) {
  RawCheckpoint raw = open_checkpoint(path);
  if (raw.header.at("kind") != "sftmd") throw Error::io("checkpoint is not an sftmd model");
  LoadedSftmd out;
  out.info = info_from_header(raw.header);
  check_fingerprint(out.info, expected_fp, path);
  const json& c = raw.header.at("config");
  out.config.feature_channels = c.at("feature_channels").get<int>();
  out.config.num_res_blocks = c.at("num_res_blocks").get<int>();
  out.config.scale = c.at("scale").get<int>();
  out.config.code_dim = c.at("code_dim").get<int>();
  out.config.conditioning = conditioning_from_string(c.at("conditioning").get<std::string>());
  out.net = std::make_unique<SftmdNet>(out.config);
  auto params = out.net->params();
  read_params_and_adam(raw, params, adam_to_restore);
  return out;
}

LoadedPredictor load_predictor(const std::filesystem::path& path, const std::string& expected_fp,
                               Adam* adam_to_restore) {
  RawCheckpoint raw = open_checkpoint(path);
  if (raw.header.at("kind") != "predictor") throw Error::io("checkpoint is not a predictor model");
  LoadedPredictor out;
  out.info = info_from_header(raw.header);
  check_fingerprint(out.info, expected_fp, path);
  const json& c = raw.header.at("config");
  out.net = std::make_unique<PredictorNet>(c.at("code_dim").get<int>(),
                                           c.at("base_channels").get<int>());
  auto params = out.net->params();
  read_params_and_adam(raw, params, adam_to_restore);
  return out;
}

LoadedCorrector load_corrector(const std::filesystem::path& path, const std::string& expected_fp,
                               Adam* adam_to_restore) {
  RawCheckpoint raw = open_checkpoint(path);
  if (raw.header.at("kind") != "corrector") throw Error::io("checkpoint is not a corrector model");
  LoadedCorrector out;
  out.info = info_from_header(raw.header);
  check_fingerprint(out.info, expected_fp, path);
  const json& c = raw.header.at("config");
  out.net = std::make_unique<CorrectorNet>(c.at("code_dim").get<int>(),
                                           c.at("base_channels").get<int>());
  auto params = out.net->params();
  read_params_and_adam(raw, params, adam_to_restore);
  return out;
}

CheckpointInfo checkpoint_info(const std::filesystem::path& path) {
  RawCheckpoint raw = open_checkpoint(path);
  return info_from_header(raw.header);
}

uint64_t params_fingerprint(const nn::ParamList<float>& params) {
  uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.value->data.data());
    for (size_t i = 0; i < p.value->numel() * sizeof(float); ++i) {
      h ^= uint64_t(bytes[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace ikc
