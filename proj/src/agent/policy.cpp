#include "pet/agent/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pet::agent {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)

using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using ConstRowMap = Eigen::Map<const RowVec>;
using RowMap = Eigen::Map<RowVec>;

struct P {
  const double* base;
  ConstMatMap m(std::size_t off, int r, int c) const { return ConstMatMap(base + off, r, c); }
  ConstRowMap v(std::size_t off, int n) const { return ConstRowMap(base + off, n); }
};

struct G {
  double* base;
  MatMap m(std::size_t off, int r, int c) const { return MatMap(base + off, r, c); }
  RowMap v(std::size_t off, int n) const { return RowMap(base + off, n); }
};

Mat layer_norm(const Mat& x, const ConstRowMap& g, const ConstRowMap& b, ForwardCache::Norm& n) {
  const int cols = static_cast<int>(x.cols());
  n.xhat.resize(x.rows(), cols);
  n.rstd.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    const double rs = 1.0 / std::sqrt(var + kLnEps);
    n.rstd(r) = rs;
    n.xhat.row(r) = (x.row(r).array() - mu) * rs;
  }
  Mat y = n.xhat.array().rowwise() * g.array();
  y.rowwise() += b;
  return y;
}

// dy -> dx, accumulating gain/bias gradients.
Mat layer_norm_back(const Mat& dy, const ForwardCache::Norm& n, const ConstRowMap& g, RowMap dg, RowMap db) {
  dg += (dy.array() * n.xhat.array()).colwise().sum().matrix();
  db += dy.colwise().sum();
  Mat dxhat = dy.array().rowwise() * g.array();
  const double inv = 1.0 / static_cast<double>(dy.cols());
  Mat dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double m1 = dxhat.row(r).sum() * inv;
    const double m2 = dxhat.row(r).dot(n.xhat.row(r)) * inv;
    dx.row(r) = n.rstd(r) * (dxhat.row(r).array() - m1 - n.xhat.row(r).array() * m2);
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x))); }

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + 0.044715 * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
}

void check_finite(const Mat& m, const char* what, int layer) {
  if (!m.allFinite()) throw NumericalError(std::string("non-finite ") + what + " at layer " + std::to_string(layer), layer);
}

}  // namespace

Vec history_average(const std::vector<Vec>& past, int dim) {
  Vec out = Vec::Zero(dim);
  if (past.empty()) return out;
  for (const auto& v : past) {
    if (v.size() != dim) throw std::invalid_argument("history_average: dimension mismatch");
    out += v;
  }
  return out / static_cast<double>(past.size());
}

namespace {

Vec forward_ordered(const PolicyParams& params, const AgentInput& in, ForwardCache* cache_out) {
  const auto& c = params.config;
  const auto& L = params.layout;
  const int M = c.hidden, D = c.embed_dim, F = c.ffn, H = c.heads, dh = M / H;
  const int n = static_cast<int>(in.actions.rows());
  if (n == 0) throw std::invalid_argument("forward: no actions");
  if (in.task.size() != D || in.history.size() != D || in.obs.size() != D || in.actions.cols() != D)
    throw std::invalid_argument("forward: input dimension does not match the policy");

  ForwardCache local;
  ForwardCache& fc = cache_out ? *cache_out : local;
  const P p{params.values.data()};
  const int N = 3 + n + 4 * n;

  fc.tokens.resize(N, D);
  fc.slot.assign(N, 3);
  fc.segments.clear();
  fc.segments.emplace_back(0, 3 + n);
  auto context = [&](int row) {
    fc.tokens.row(row) = in.task.transpose();
    fc.tokens.row(row + 1) = in.history.transpose();
    fc.tokens.row(row + 2) = in.obs.transpose();
    fc.slot[row] = 0;
    fc.slot[row + 1] = 1;
    fc.slot[row + 2] = 2;
  };
  context(0);
  fc.tokens.block(3, 0, n, D) = in.actions;
  for (int i = 0; i < n; ++i) {
    const int s = 3 + n + 4 * i;
    context(s);
    fc.tokens.row(s + 3) = in.actions.row(i);
    fc.segments.emplace_back(s, 4);
  }

  Mat x = fc.tokens * p.m(L.w_in, M, D).transpose();
  x.rowwise() += p.v(L.b_in, M);
  const auto pos = p.m(L.pos, 3, M);
  const auto act = p.v(L.act, M);
  for (int r = 0; r < N; ++r) {
    if (fc.slot[r] < 3)
      x.row(r) += pos.row(fc.slot[r]);
    else
      x.row(r) += act;
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  fc.layers.resize(c.layers);
  for (int li = 0; li < c.layers; ++li) {
    const auto& y = L.layer[li];
    auto& lc = fc.layers[li];
    lc.x_in = x;
    lc.a = layer_norm(x, p.v(y.ln1_g, M), p.v(y.ln1_b, M), lc.ln1);
    lc.q = lc.a * p.m(y.wq, M, M).transpose();
    lc.q.rowwise() += p.v(y.bq, M);
    lc.k = lc.a * p.m(y.wk, M, M).transpose();
    lc.k.rowwise() += p.v(y.bk, M);
    lc.v = lc.a * p.m(y.wv, M, M).transpose();
    lc.v.rowwise() += p.v(y.bv, M);
    lc.ctx.setZero(N, M);
    lc.probs.clear();
    for (const auto& [s0, len] : fc.segments) {
      for (int h = 0; h < H; ++h) {
        Mat S = lc.q.block(s0, h * dh, len, dh) * lc.k.block(s0, h * dh, len, dh).transpose() * scale;
        for (int r = 0; r < len; ++r) {
          const double mx = S.row(r).maxCoeff();
          S.row(r) = (S.row(r).array() - mx).exp();
          S.row(r) /= S.row(r).sum();
        }
        lc.ctx.block(s0, h * dh, len, dh) = S * lc.v.block(s0, h * dh, len, dh);
        lc.probs.push_back(std::move(S));
      }
    }
    Mat att = lc.ctx * p.m(y.wo, M, M).transpose();
    att.rowwise() += p.v(y.bo, M);
    lc.x_mid = x + att;
    lc.b = layer_norm(lc.x_mid, p.v(y.ln2_g, M), p.v(y.ln2_b, M), lc.ln2);
    lc.h_pre = lc.b * p.m(y.w1, F, M).transpose();
    lc.h_pre.rowwise() += p.v(y.b1, F);
    lc.h_act = lc.h_pre.unaryExpr([](double v) { return gelu(v); });
    Mat ff = lc.h_act * p.m(y.w2, M, F).transpose();
    ff.rowwise() += p.v(y.b2, M);
    x = lc.x_mid + ff;
    check_finite(x, "activation", li);
  }
  fc.x_last = x;
  fc.xf = layer_norm(x, p.v(L.lnf_g, M), p.v(L.lnf_b, M), fc.lnf);

  fc.q = p.m(L.head_q_w, M, M) * fc.xf.row(2).transpose() + p.v(L.head_q_b, M).transpose();
  fc.k.resize(n, M);
  for (int i = 0; i < n; ++i) {
    const int row = 3 + n + 4 * i + 3;
    fc.k.row(i) = (p.m(L.head_k_w, M, M) * fc.xf.row(row).transpose()).transpose() + p.v(L.head_k_b, M);
  }
  fc.scores = fc.k * fc.q;
  if (!fc.scores.allFinite()) throw NumericalError("non-finite action scores", c.layers);
  const double mx = fc.scores.maxCoeff();
  fc.policy = (fc.scores.array() - mx).exp();
  fc.policy /= fc.policy.sum();
  return fc.policy;
}

}  // namespace

// Actions are run in lexicographic order of their embeddings so that
// floating-point sums over the action set do not depend on the caller's
// order; the policy is mapped back afterwards.
Vec forward(const PolicyParams& params, const AgentInput& in, ForwardCache* cache_out) {
  const int n = static_cast<int>(in.actions.rows());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ra = in.actions.row(a), rb = in.actions.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  AgentInput sorted{in.task, in.history, in.obs, Mat(n, in.actions.cols())};
  for (int k = 0; k < n; ++k) sorted.actions.row(k) = in.actions.row(order[k]);
  ForwardCache local;
  ForwardCache& fc = cache_out ? *cache_out : local;
  const Vec ps = forward_ordered(params, sorted, &fc);
  fc.order = order;
  Vec out(n);
  for (int k = 0; k < n; ++k) out[order[k]] = ps[k];
  return out;
}

double backward(const PolicyParams& params, const ForwardCache& fc, int expert, Buffer& grad) {
  const auto& c = params.config;
  const auto& L = params.layout;
  const int M = c.hidden, D = c.embed_dim, F = c.ffn, H = c.heads, dh = M / H;
  const int n = static_cast<int>(fc.k.rows());
  if (expert < 0 || expert >= n) throw std::invalid_argument("backward: expert index out of range");
  if (grad.size() != params.values.size()) throw std::invalid_argument("backward: gradient buffer has wrong size");
  if (!fc.order.empty()) expert = static_cast<int>(std::find(fc.order.begin(), fc.order.end(), expert) - fc.order.begin());
  const P p{params.values.data()};
  const G g{grad.data()};
  const int N = static_cast<int>(fc.tokens.rows());

  const double loss = -std::log(std::max(fc.policy(expert), 1e-300));
  Vec ds = fc.policy;
  ds(expert) -= 1.0;

  // Heads.
  const Vec dq = fc.k.transpose() * ds;  // M
  const Mat dk = ds * fc.q.transpose();  // n x M
  Mat dxf = Mat::Zero(N, M);
  g.m(L.head_q_w, M, M) += dq * fc.xf.row(2);
  g.v(L.head_q_b, M) += dq.transpose();
  dxf.row(2) += (p.m(L.head_q_w, M, M).transpose() * dq).transpose();
  for (int i = 0; i < n; ++i) {
    const int row = 3 + n + 4 * i + 3;
    g.m(L.head_k_w, M, M) += dk.row(i).transpose() * fc.xf.row(row);
    dxf.row(row) += dk.row(i) * p.m(L.head_k_w, M, M);
  }
  g.v(L.head_k_b, M) += dk.colwise().sum();

  Mat dx = layer_norm_back(dxf, fc.lnf, p.v(L.lnf_g, M), g.v(L.lnf_g, M), g.v(L.lnf_b, M));

  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int li = c.layers - 1; li >= 0; --li) {
    const auto& y = L.layer[li];
    const auto& lc = fc.layers[li];
    // Feed-forward block.
    g.m(y.w2, M, F) += dx.transpose() * lc.h_act;
    g.v(y.b2, M) += dx.colwise().sum();
    Mat dh_act = dx * p.m(y.w2, M, F);
    Mat dh_pre = dh_act.array() * lc.h_pre.unaryExpr([](double v) { return gelu_grad(v); }).array();
    g.m(y.w1, F, M) += dh_pre.transpose() * lc.b;
    g.v(y.b1, F) += dh_pre.colwise().sum();
    Mat db = dh_pre * p.m(y.w1, F, M);
    Mat dmid = dx + layer_norm_back(db, lc.ln2, p.v(y.ln2_g, M), g.v(y.ln2_g, M), g.v(y.ln2_b, M));

    // Attention block.
    g.m(y.wo, M, M) += dmid.transpose() * lc.ctx;
    g.v(y.bo, M) += dmid.colwise().sum();
    Mat dctx = dmid * p.m(y.wo, M, M);
    Mat dQ = Mat::Zero(N, M), dK = Mat::Zero(N, M), dV = Mat::Zero(N, M);
    std::size_t pi = 0;
    for (const auto& [s0, len] : fc.segments) {
      for (int h = 0; h < H; ++h) {
        const Mat& Pm = lc.probs[pi++];
        const auto dC = dctx.block(s0, h * dh, len, dh);
        dV.block(s0, h * dh, len, dh) += Pm.transpose() * dC;
        Mat dP = dC * lc.v.block(s0, h * dh, len, dh).transpose();
        Mat dS(len, len);
        for (int r = 0; r < len; ++r) {
          const double dot = dP.row(r).dot(Pm.row(r));
          dS.row(r) = Pm.row(r).array() * (dP.row(r).array() - dot);
        }
        dS *= scale;
        dQ.block(s0, h * dh, len, dh) += dS * lc.k.block(s0, h * dh, len, dh);
        dK.block(s0, h * dh, len, dh) += dS.transpose() * lc.q.block(s0, h * dh, len, dh);
      }
    }
    g.m(y.wq, M, M) += dQ.transpose() * lc.a;
    g.v(y.bq, M) += dQ.colwise().sum();
    g.m(y.wk, M, M) += dK.transpose() * lc.a;
    g.v(y.bk, M) += dK.colwise().sum();
    g.m(y.wv, M, M) += dV.transpose() * lc.a;
    g.v(y.bv, M) += dV.colwise().sum();
    Mat da = dQ * p.m(y.wq, M, M) + dK * p.m(y.wk, M, M) + dV * p.m(y.wv, M, M);
    dx = dmid + layer_norm_back(da, lc.ln1, p.v(y.ln1_g, M), g.v(y.ln1_g, M), g.v(y.ln1_b, M));
  }

  // Input projection and slot vectors.
  g.m(L.w_in, M, D) += dx.transpose() * fc.tokens;
  g.v(L.b_in, M) += dx.colwise().sum();
  auto dpos = g.m(L.pos, 3, M);
  auto dact = g.v(L.act, M);
  for (int r = 0; r < N; ++r) {
    if (fc.slot[r] < 3)
      dpos.row(fc.slot[r]) += dx.row(r);
    else
      dact += dx.row(r);
  }
  return loss;
}

}  // namespace pet::agent
