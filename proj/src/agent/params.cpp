#include "pet/agent/params.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pet/rng.hpp"

namespace pet::agent {

namespace {
constexpr const char* kMagic = "pet-policy";
constexpr int kVersion = 1;
}  // namespace

void PolicyConfig::validate() const {
  if (layers < 1 || heads < 1 || hidden < 1 || embed_dim < 1 || ffn < 1)
    throw std::invalid_argument("policy dimensions must be positive");
  if (hidden % heads != 0) throw std::invalid_argument("heads must divide the hidden size");
}

Layout Layout::build(const PolicyConfig& c) {
  c.validate();
  Layout l;
  const int M = c.hidden, D = c.embed_dim, F = c.ffn;
  auto add = [&](const std::string& name, int rows, int cols) {
    l.tensors.push_back({name, rows, cols, l.total});
    l.total += static_cast<std::size_t>(rows) * cols;
    return l.tensors.back().offset;
  };
  l.w_in = add("in.W", M, D);
  l.b_in = add("in.b", 1, M);
  l.pos = add("pos", 3, M);
  l.act = add("act", 1, M);
  for (int i = 0; i < c.layers; ++i) {
    const std::string p = "l" + std::to_string(i) + ".";
    Layer y;
    y.ln1_g = add(p + "ln1.g", 1, M);
    y.ln1_b = add(p + "ln1.b", 1, M);
    y.wq = add(p + "attn.Wq", M, M);
    y.bq = add(p + "attn.bq", 1, M);
    y.wk = add(p + "attn.Wk", M, M);
    y.bk = add(p + "attn.bk", 1, M);
    y.wv = add(p + "attn.Wv", M, M);
    y.bv = add(p + "attn.bv", 1, M);
    y.wo = add(p + "attn.Wo", M, M);
    y.bo = add(p + "attn.bo", 1, M);
    y.ln2_g = add(p + "ln2.g", 1, M);
    y.ln2_b = add(p + "ln2.b", 1, M);
    y.w1 = add(p + "ffn.W1", F, M);
    y.b1 = add(p + "ffn.b1", 1, F);
    y.w2 = add(p + "ffn.W2", M, F);
    y.b2 = add(p + "ffn.b2", 1, M);
    l.layer.push_back(y);
  }
  l.lnf_g = add("lnf.g", 1, M);
  l.lnf_b = add("lnf.b", 1, M);
  l.head_q_w = add("head_q.W", M, M);
  l.head_q_b = add("head_q.b", 1, M);
  l.head_k_w = add("head_k.W", M, M);
  l.head_k_b = add("head_k.b", 1, M);
  return l;
}

const TensorInfo& Layout::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw std::out_of_range("no tensor named " + name);
}

PolicyParams PolicyParams::zeros(const PolicyConfig& config) {
  PolicyParams p;
  p.config = config;
  p.layout = Layout::build(config);
  p.values.assign(p.layout.total, 0.0);
  return p;
}

PolicyParams PolicyParams::init(const PolicyConfig& config) {
  PolicyParams p = zeros(config);
  Rng rng(config.init_seed);
  for (const auto& t : p.layout.tensors) {
    const std::string& n = t.name;
    const auto ends = [&](std::string_view s) { return n.size() >= s.size() && n.compare(n.size() - s.size(), s.size(), s) == 0; };
    double* v = p.values.data() + t.offset;
    if (ends(".g")) {
      std::fill(v, v + t.size(), 1.0);
    } else if (ends(".b") || ends(".bq") || ends(".bk") || ends(".bv") || ends(".bo") || ends(".b1") || ends(".b2")) {
      // biases start at zero
    } else {
      const int fan_in = t.cols;
      const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < t.size(); ++i) v[i] = a * (2.0 * rng.uniform() - 1.0);
    }
  }
  return p;
}

MatMap PolicyParams::tensor(const std::string& name) {
  const auto& t = layout.find(name);
  return MatMap(values.data() + t.offset, t.rows, t.cols);
}

ConstMatMap PolicyParams::tensor(const std::string& name) const {
  const auto& t = layout.find(name);
  return ConstMatMap(values.data() + t.offset, t.rows, t.cols);
}

bool PolicyParams::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

void PolicyParams::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << kMagic << ' ' << kVersion << '\n';
  out << "config layers " << config.layers << " heads " << config.heads << " hidden " << config.hidden
      << " embed_dim " << config.embed_dim << " ffn " << config.ffn << " init_seed " << config.init_seed << '\n';
  out << std::setprecision(17);
  for (const auto& t : layout.tensors) {
    out << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
    for (int r = 0; r < t.rows; ++r) {
      for (int c = 0; c < t.cols; ++c) out << (c ? " " : "") << values[t.offset + static_cast<std::size_t>(r) * t.cols + c];
      out << '\n';
    }
  }
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

PolicyParams PolicyParams::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint " + path.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic || version != kVersion) throw CheckpointError(path.string() + ": not a policy checkpoint");
  PolicyConfig c;
  std::string word;
  in >> word;
  if (word != "config") throw CheckpointError(path.string() + ": missing config line");
  std::string rest;
  std::getline(in, rest);
  std::istringstream cfg(rest);
  std::string key;
  while (cfg >> key) {
    if (key == "layers") cfg >> c.layers;
    else if (key == "heads") cfg >> c.heads;
    else if (key == "hidden") cfg >> c.hidden;
    else if (key == "embed_dim") cfg >> c.embed_dim;
    else if (key == "ffn") cfg >> c.ffn;
    else if (key == "init_seed") cfg >> c.init_seed;
    else throw CheckpointError(path.string() + ": unknown config key " + key);
  }
  PolicyParams p = zeros(c);
  for (const auto& t : p.layout.tensors) {
    std::string tag, name;
    int rows = 0, cols = 0;
    in >> tag >> name >> rows >> cols;
    if (tag != "tensor" || name != t.name || rows != t.rows || cols != t.cols)
      throw CheckpointError(path.string() + ": expected tensor " + t.name + " " + std::to_string(t.rows) + "x" +
                            std::to_string(t.cols));
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string tok;
      if (!(in >> tok)) throw CheckpointError(path.string() + ": truncated tensor " + t.name);
      p.values[t.offset + i] = std::stod(tok);
    }
  }
  if (!p.all_finite()) throw CheckpointError(path.string() + ": non-finite value");
  return p;
}

}  // namespace pet::agent
