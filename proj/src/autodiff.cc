// src/autodiff.cc

// Copyright 2026  mixenh authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "autodiff.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "error.h"

namespace mixenh {
namespace {

constexpr double kNormEps = 1e-5;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

ValueRef Tape::emplace(Tensor value, bool needs_grad) {
  if (!all_finite(value)) {
    throw Error(ErrorCode::kNonFiniteActivation,
                "tape: non-finite value at node " +
                    std::to_string(nodes_.size()));
  }
  auto n = std::make_unique<Node>();
  n->value = std::move(value);
  n->needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return ValueRef{static_cast<int>(nodes_.size()) - 1};
}

ValueRef Tape::leaf(const Tensor& value, bool requires_grad) {
  return emplace(value, requires_grad);
}

const Tensor& Tape::value(ValueRef ref) const { return node(ref).value; }

const Tensor& Tape::grad(ValueRef ref) { return grad_buf(ref); }

Tensor& Tape::grad_buf(ValueRef ref) {
  Node& n = node(ref);
  if (n.grad.data.empty()) {
    n.grad = Tensor(n.value.shape);
  }
  return n.grad;
}

bool Tape::has_grad(ValueRef ref) const { return !node(ref).grad.data.empty(); }

void Tape::backward(ValueRef root) {
  require(node(root).value.numel() == 1, "backward: root is not a scalar");
  grad_buf(root).data[0] = 1.0;
  for (size_t i = nodes_.size(); i-- > 0;) {
    Node& n = *nodes_[i];
    if (n.backprop && n.needs_grad && !n.grad.data.empty()) {
      n.backprop();
    }
  }
}

ValueRef Tape::conv2d(ValueRef x, ValueRef w, ValueRef b, int stride_f) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  require(xv.shape.size() == 3 && wv.shape.size() == 4 &&
              bv.shape.size() == 1,
          "conv2d: expected x CxFxK, w OxCx3x3, b O");
  const int cin = xv.shape[0], f = xv.shape[1], k = xv.shape[2];
  const int cout = wv.shape[0];
  require(wv.shape[1] == cin && wv.shape[2] == 3 && wv.shape[3] == 3 &&
              bv.shape[0] == cout,
          "conv2d: kernel/bias shape mismatch");
  require(stride_f == 1 || stride_f == 2, "conv2d: stride must be 1 or 2");
  require(f % stride_f == 0, "conv2d: F not divisible by stride");
  const int fout = f / stride_f;

  Tensor out({cout, fout, k});
  const size_t plane_out = static_cast<size_t>(fout) * k;
  for (int co = 0; co < cout; ++co) {
    std::fill_n(out.data.begin() + static_cast<int64_t>(co * plane_out),
                plane_out, bv.data[static_cast<size_t>(co)]);
  }
  for (int co = 0; co < cout; ++co) {
    for (int ci = 0; ci < cin; ++ci) {
      for (int df = 0; df < 3; ++df) {
        for (int dk = 0; dk < 3; ++dk) {
          const double wt =
              wv.data[static_cast<size_t>(((co * cin + ci) * 3 + df) * 3 + dk)];
          const int shift = dk - 1;
          const int klo = std::max(0, -shift);
          const int khi = k - 1 - std::max(0, shift);
          for (int fo = 0; fo < fout; ++fo) {
            const int fi = stride_f * fo + df - 1;
            if (fi < 0 || fi >= f) continue;
            double* orow = &out.at3(co, fo, 0);
            const double* irow = &xv.at3(ci, fi, 0);
            for (int kk = klo; kk <= khi; ++kk) {
              orow[kk] += wt * irow[kk + shift];
            }
          }
        }
      }
    }
  }

  ValueRef y = emplace(std::move(out), true);
  node(y).backprop = [this, x, w, b, y, cin, cout, f, fout, k, stride_f] {
    const Tensor& gy = node(y).grad;
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const bool need_x = node(x).needs_grad;
    Tensor* gx = need_x ? &grad_buf(x) : nullptr;
    Tensor& gw = grad_buf(w);
    Tensor& gb = grad_buf(b);

    for (int co = 0; co < cout; ++co) {
      double acc = 0.0;
      const double* grow = &gy.at3(co, 0, 0);
      const size_t n = static_cast<size_t>(fout) * k;
      for (size_t i = 0; i < n; ++i) acc += grow[i];
      gb.data[static_cast<size_t>(co)] += acc;
    }
    for (int co = 0; co < cout; ++co) {
      for (int ci = 0; ci < cin; ++ci) {
        for (int df = 0; df < 3; ++df) {
          for (int dk = 0; dk < 3; ++dk) {
            const size_t wi =
                static_cast<size_t>(((co * cin + ci) * 3 + df) * 3 + dk);
            const double wt = wv.data[wi];
            const int shift = dk - 1;
            const int klo = std::max(0, -shift);
            const int khi = k - 1 - std::max(0, shift);
            double wacc = 0.0;
            for (int fo = 0; fo < fout; ++fo) {
              const int fi = stride_f * fo + df - 1;
              if (fi < 0 || fi >= f) continue;
              const double* grow = &gy.at3(co, fo, 0);
              const double* irow = &xv.at3(ci, fi, 0);
              double dot = 0.0;
              for (int kk = klo; kk <= khi; ++kk) {
                dot += grow[kk] * irow[kk + shift];
              }
              wacc += dot;
              if (gx != nullptr) {
                double* gxrow = &gx->at3(ci, fi, 0);
                for (int kk = klo; kk <= khi; ++kk) {
                  gxrow[kk + shift] += wt * grow[kk];
                }
              }
            }
            gw.data[wi] += wacc;
          }
        }
      }
    }
  };
  return y;
}

ValueRef Tape::depthwise_time(ValueRef x, ValueRef w, ValueRef b,
                              int dilation) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  require(xv.shape.size() == 3 && wv.shape.size() == 2 && wv.shape[1] == 3,
          "depthwise_time: expected x CxFxK, w Cx3");
  const int c = xv.shape[0], f = xv.shape[1], k = xv.shape[2];
  require(wv.shape[0] == c && bv.shape.size() == 1 && bv.shape[0] == c,
          "depthwise_time: kernel/bias shape mismatch");
  require(dilation >= 1, "depthwise_time: dilation must be >= 1");

  Tensor out({c, f, k});
  const size_t plane = static_cast<size_t>(f) * k;
  for (int ch = 0; ch < c; ++ch) {
    std::fill_n(out.data.begin() + static_cast<int64_t>(ch * plane), plane,
                bv.data[static_cast<size_t>(ch)]);
    for (int t = 0; t < 3; ++t) {
      const double wt = wv.data[static_cast<size_t>(ch * 3 + t)];
      const int shift = (t - 1) * dilation;
      const int klo = std::max(0, -shift);
      const int khi = std::min(k - 1, k - 1 - shift);
      for (int ff = 0; ff < f; ++ff) {
        double* orow = &out.at3(ch, ff, 0);
        const double* irow = &xv.at3(ch, ff, 0);
        for (int kk = klo; kk <= khi; ++kk) orow[kk] += wt * irow[kk + shift];
      }
    }
  }

  ValueRef y = emplace(std::move(out), true);
  node(y).backprop = [this, x, w, b, y, c, f, k, dilation] {
    const Tensor& gy = node(y).grad;
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const bool need_x = node(x).needs_grad;
    Tensor* gx = need_x ? &grad_buf(x) : nullptr;
    Tensor& gw = grad_buf(w);
    Tensor& gb = grad_buf(b);

    for (int ch = 0; ch < c; ++ch) {
      double acc = 0.0;
      const double* grow = &gy.at3(ch, 0, 0);
      const size_t n = static_cast<size_t>(f) * k;
      for (size_t i = 0; i < n; ++i) acc += grow[i];
      gb.data[static_cast<size_t>(ch)] += acc;

      for (int t = 0; t < 3; ++t) {
        const size_t wi = static_cast<size_t>(ch * 3 + t);
        const double wt = wv.data[wi];
        const int shift = (t - 1) * dilation;
        const int klo = std::max(0, -shift);
        const int khi = std::min(k - 1, k - 1 - shift);
        double wacc = 0.0;
        for (int ff = 0; ff < f; ++ff) {
          const double* grow = &gy.at3(ch, ff, 0);
          const double* irow = &xv.at3(ch, ff, 0);
          double dot = 0.0;
          for (int kk = klo; kk <= khi; ++kk) {
            dot += grow[kk] * irow[kk + shift];
          }
          wacc += dot;
          if (gx != nullptr) {
            double* gxrow = &gx->at3(ch, ff, 0);
            for (int kk = klo; kk <= khi; ++kk) {
              gxrow[kk + shift] += wt * grow[kk];
            }
          }
        }
        gw.data[wi] += wacc;
      }
    }
  };
  return y;
}

ValueRef Tape::pointwise(ValueRef x, ValueRef w, ValueRef b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  require(xv.shape.size() == 3 && wv.shape.size() == 2,
          "pointwise: expected x CxFxK, w OxC");
  const int cin = xv.shape[0], f = xv.shape[1], k = xv.shape[2];
  const int cout = wv.shape[0];
  require(wv.shape[1] == cin && bv.shape.size() == 1 && bv.shape[0] == cout,
          "pointwise: kernel/bias shape mismatch");
  const size_t plane = static_cast<size_t>(f) * k;

  Tensor out({cout, f, k});
  for (int co = 0; co < cout; ++co) {
    double* orow = out.data.data() + static_cast<size_t>(co) * plane;
    std::fill_n(orow, plane, bv.data[static_cast<size_t>(co)]);
    for (int ci = 0; ci < cin; ++ci) {
      const double wt = wv.data[static_cast<size_t>(co * cin + ci)];
      const double* irow = xv.data.data() + static_cast<size_t>(ci) * plane;
      for (size_t i = 0; i < plane; ++i) orow[i] += wt * irow[i];
    }
  }

  ValueRef y = emplace(std::move(out), true);
  node(y).backprop = [this, x, w, b, y, cin, cout, plane] {
    const Tensor& gy = node(y).grad;
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const bool need_x = node(x).needs_grad;
    Tensor* gx = need_x ? &grad_buf(x) : nullptr;
    Tensor& gw = grad_buf(w);
    Tensor& gb = grad_buf(b);

    for (int co = 0; co < cout; ++co) {
      const double* grow = gy.data.data() + static_cast<size_t>(co) * plane;
      double acc = 0.0;
      for (size_t i = 0; i < plane; ++i) acc += grow[i];
      gb.data[static_cast<size_t>(co)] += acc;
      for (int ci = 0; ci < cin; ++ci) {
        const size_t wi = static_cast<size_t>(co * cin + ci);
        const double wt = wv.data[wi];
        const double* irow = xv.data.data() + static_cast<size_t>(ci) * plane;
        double dot = 0.0;
        for (size_t i = 0; i < plane; ++i) dot += grow[i] * irow[i];
        gw.data[wi] += dot;
        if (gx != nullptr) {
          double* gxrow = gx->data.data() + static_cast<size_t>(ci) * plane;
          for (size_t i = 0; i < plane; ++i) gxrow[i] += wt * grow[i];
        }
      }
    }
  };
  return y;
}

ValueRef Tape::elu(ValueRef x) {
  const Tensor& xv = value(x);
  Tensor out(xv.shape);
  for (size_t i = 0; i < out.data.size(); ++i) {
    const double v = xv.data[i];
    out.data[i] = v > 0.0 ? v : std::expm1(v);
  }
  ValueRef y = emplace(std::move(out), node(x).needs_grad);
  node(y).backprop = [this, x, y] {
    if (!node(x).needs_grad) return;
    const Tensor& gy = node(y).grad;
    const Tensor& yv = node(y).value;
    Tensor& gx = grad_buf(x);
    for (size_t i = 0; i < gx.data.size(); ++i) {
      // For y <= 0, dy/dx = exp(x) = y + 1.
      gx.data[i] += gy.data[i] * (yv.data[i] > 0.0 ? 1.0 : yv.data[i] + 1.0);
    }
  };
  return y;
}

ValueRef Tape::channel_norm(ValueRef x, ValueRef gain, ValueRef bias) {
  const Tensor& xv = value(x);
  const Tensor& gv = value(gain);
  const Tensor& bv = value(bias);
  require(xv.shape.size() == 3, "channel_norm: expected x CxFxK");
  const int c = xv.shape[0];
  require(gv.shape.size() == 1 && gv.shape[0] == c && bv.shape.size() == 1 &&
              bv.shape[0] == c,
          "channel_norm: gain/bias must be C vectors");
  const size_t plane =
      static_cast<size_t>(xv.shape[1]) * static_cast<size_t>(xv.shape[2]);

  std::vector<double> mu(static_cast<size_t>(c));
  std::vector<double> sd(static_cast<size_t>(c));
  Tensor out(xv.shape);
  for (int ch = 0; ch < c; ++ch) {
    const double* row = xv.data.data() + static_cast<size_t>(ch) * plane;
    double m = 0.0;
    for (size_t i = 0; i < plane; ++i) m += row[i];
    m /= static_cast<double>(plane);
    double var = 0.0;
    for (size_t i = 0; i < plane; ++i) {
      const double d = row[i] - m;
      var += d * d;
    }
    var /= static_cast<double>(plane);
    const double s = std::sqrt(var + kNormEps);
    mu[static_cast<size_t>(ch)] = m;
    sd[static_cast<size_t>(ch)] = s;
    const double g = gv.data[static_cast<size_t>(ch)];
    const double b = bv.data[static_cast<size_t>(ch)];
    double* orow = out.data.data() + static_cast<size_t>(ch) * plane;
    for (size_t i = 0; i < plane; ++i) orow[i] = g * (row[i] - m) / s + b;
  }

  ValueRef y = emplace(std::move(out), true);
  node(y).backprop = [this, x, gain, bias, y, c, plane, mu = std::move(mu),
                      sd = std::move(sd)] {
    const Tensor& gy = node(y).grad;
    const Tensor& xv = value(x);
    const Tensor& gv = value(gain);
    const bool need_x = node(x).needs_grad;
    Tensor* gx = need_x ? &grad_buf(x) : nullptr;
    Tensor& ggain = grad_buf(gain);
    Tensor& gbias = grad_buf(bias);

    const double n = static_cast<double>(plane);
    for (int ch = 0; ch < c; ++ch) {
      const double* row = xv.data.data() + static_cast<size_t>(ch) * plane;
      const double* grow = gy.data.data() + static_cast<size_t>(ch) * plane;
      const double m = mu[static_cast<size_t>(ch)];
      const double s = sd[static_cast<size_t>(ch)];
      double sum_g = 0.0, sum_gx = 0.0;
      for (size_t i = 0; i < plane; ++i) {
        sum_g += grow[i];
        sum_gx += grow[i] * (row[i] - m) / s;
      }
      gbias.data[static_cast<size_t>(ch)] += sum_g;
      ggain.data[static_cast<size_t>(ch)] += sum_gx;
      if (gx != nullptr) {
        const double g_over_s = gv.data[static_cast<size_t>(ch)] / s;
        double* gxrow = gx->data.data() + static_cast<size_t>(ch) * plane;
        for (size_t i = 0; i < plane; ++i) {
          const double xhat = (row[i] - m) / s;
          gxrow[i] +=
              g_over_s * (grow[i] - sum_g / n - xhat * sum_gx / n);
        }
      }
    }
  };
  return y;
}

ValueRef Tape::upsample_freq2(ValueRef x) {
  const Tensor& xv = value(x);
  require(xv.shape.size() == 3, "upsample_freq2: expected CxFxK");
  const int c = xv.shape[0], f = xv.shape[1], k = xv.shape[2];
  Tensor out({c, 2 * f, k});
  for (int ch = 0; ch < c; ++ch) {
    for (int ff = 0; ff < f; ++ff) {
      const double* irow = &xv.at3(ch, ff, 0);
      std::copy_n(irow, k, &out.at3(ch, 2 * ff, 0));
      std::copy_n(irow, k, &out.at3(ch, 2 * ff + 1, 0));
    }
  }
  ValueRef y = emplace(std::move(out), node(x).needs_grad);
  node(y).backprop = [this, x, y, c, f, k] {
    if (!node(x).needs_grad) return;
    const Tensor& gy = node(y).grad;
    Tensor& gx = grad_buf(x);
    for (int ch = 0; ch < c; ++ch) {
      for (int ff = 0; ff < f; ++ff) {
        double* gxrow = &gx.at3(ch, ff, 0);
        const double* g0 = &gy.at3(ch, 2 * ff, 0);
        const double* g1 = &gy.at3(ch, 2 * ff + 1, 0);
        for (int kk = 0; kk < k; ++kk) gxrow[kk] += g0[kk] + g1[kk];
      }
    }
  };
  return y;
}

ValueRef Tape::concat_channels(ValueRef a, ValueRef b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.shape.size() == 3 && bv.shape.size() == 3 &&
              av.shape[1] == bv.shape[1] && av.shape[2] == bv.shape[2],
          "concat_channels: F/K mismatch");
  Tensor out({av.shape[0] + bv.shape[0], av.shape[1], av.shape[2]});
  std::copy(av.data.begin(), av.data.end(), out.data.begin());
  std::copy(bv.data.begin(), bv.data.end(),
            out.data.begin() + av.numel());
  ValueRef y = emplace(std::move(out), node(a).needs_grad || node(b).needs_grad);
  node(y).backprop = [this, a, b, y] {
    const Tensor& gy = node(y).grad;
    const int64_t na = value(a).numel();
    if (node(a).needs_grad) {
      Tensor& ga = grad_buf(a);
      for (int64_t i = 0; i < na; ++i) {
        ga.data[static_cast<size_t>(i)] += gy.data[static_cast<size_t>(i)];
      }
    }
    if (node(b).needs_grad) {
      Tensor& gb = grad_buf(b);
      for (size_t i = 0; i < gb.data.size(); ++i) {
        gb.data[i] += gy.data[static_cast<size_t>(na) + i];
      }
    }
  };
  return y;
}

ValueRef Tape::add(ValueRef a, ValueRef b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.same_shape(bv), "add: shape mismatch");
  Tensor out(av.shape);
  for (size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = av.data[i] + bv.data[i];
  }
  ValueRef y = emplace(std::move(out), node(a).needs_grad || node(b).needs_grad);
  node(y).backprop = [this, a, b, y] {
    const Tensor& gy = node(y).grad;
    for (ValueRef in : {a, b}) {
      if (!node(in).needs_grad) continue;
      Tensor& g = grad_buf(in);
      for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += gy.data[i];
    }
  };
  return y;
}

ValueRef Tape::scale(ValueRef x, double c) {
  const Tensor& xv = value(x);
  Tensor out(xv.shape);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = c * xv.data[i];
  ValueRef y = emplace(std::move(out), node(x).needs_grad);
  node(y).backprop = [this, x, y, c] {
    if (!node(x).needs_grad) return;
    const Tensor& gy = node(y).grad;
    Tensor& gx = grad_buf(x);
    for (size_t i = 0; i < gx.data.size(); ++i) gx.data[i] += c * gy.data[i];
  };
  return y;
}

ValueRef Tape::slice_freq(ValueRef x, int f0, int len) {
  const Tensor& xv = value(x);
  require(xv.shape.size() == 3 && f0 >= 0 && len > 0 &&
              f0 + len <= xv.shape[1],
          "slice_freq: range out of bounds");
  const int c = xv.shape[0], k = xv.shape[2];
  Tensor out({c, len, k});
  for (int ch = 0; ch < c; ++ch) {
    for (int ff = 0; ff < len; ++ff) {
      std::copy_n(&xv.at3(ch, f0 + ff, 0), k, &out.at3(ch, ff, 0));
    }
  }
  ValueRef y = emplace(std::move(out), node(x).needs_grad);
  node(y).backprop = [this, x, y, f0, len, c, k] {
    if (!node(x).needs_grad) return;
    const Tensor& gy = node(y).grad;
    Tensor& gx = grad_buf(x);
    for (int ch = 0; ch < c; ++ch) {
      for (int ff = 0; ff < len; ++ff) {
        double* gxrow = &gx.at3(ch, f0 + ff, 0);
        const double* grow = &gy.at3(ch, ff, 0);
        for (int kk = 0; kk < k; ++kk) gxrow[kk] += grow[kk];
      }
    }
  };
  return y;
}

ValueRef Tape::pad_freq(ValueRef x, int f_total) {
  const Tensor& xv = value(x);
  require(xv.shape.size() == 3 && f_total >= xv.shape[1],
          "pad_freq: target smaller than input");
  const int c = xv.shape[0], f = xv.shape[1], k = xv.shape[2];
  Tensor out({c, f_total, k});
  for (int ch = 0; ch < c; ++ch) {
    for (int ff = 0; ff < f; ++ff) {
      std::copy_n(&xv.at3(ch, ff, 0), k, &out.at3(ch, ff, 0));
    }
  }
  ValueRef y = emplace(std::move(out), node(x).needs_grad);
  node(y).backprop = [this, x, y, c, f, k] {
    if (!node(x).needs_grad) return;
    const Tensor& gy = node(y).grad;
    Tensor& gx = grad_buf(x);
    for (int ch = 0; ch < c; ++ch) {
      for (int ff = 0; ff < f; ++ff) {
        double* gxrow = &gx.at3(ch, ff, 0);
        const double* grow = &gy.at3(ch, ff, 0);
        for (int kk = 0; kk < k; ++kk) gxrow[kk] += grow[kk];
      }
    }
  };
  return y;
}

ValueRef Tape::select_channels(ValueRef x, const std::vector<int>& channels) {
  const Tensor& xv = value(x);
  require(xv.shape.size() == 3, "select_channels: expected CxFxK");
  const int f = xv.shape[1], k = xv.shape[2];
  for (int ch : channels) {
    require(ch >= 0 && ch < xv.shape[0], "select_channels: index out of range");
  }
  Tensor out({static_cast<int>(channels.size()), f, k});
  const size_t plane = static_cast<size_t>(f) * k;
  for (size_t i = 0; i < channels.size(); ++i) {
    std::copy_n(
        xv.data.data() + static_cast<size_t>(channels[i]) * plane, plane,
        out.data.data() + i * plane);
  }
  ValueRef y = emplace(std::move(out), node(x).needs_grad);
  node(y).backprop = [this, x, y, channels, plane] {
    if (!node(x).needs_grad) return;
    const Tensor& gy = node(y).grad;
    Tensor& gx = grad_buf(x);
    for (size_t i = 0; i < channels.size(); ++i) {
      double* gxrow =
          gx.data.data() + static_cast<size_t>(channels[i]) * plane;
      const double* grow = gy.data.data() + i * plane;
      for (size_t j = 0; j < plane; ++j) gxrow[j] += grow[j];
    }
  };
  return y;
}

ValueRef Tape::csm_objective(ValueRef est_re, ValueRef est_im,
                             const Tensor& ref_re, const Tensor& ref_im,
                             const Tensor& ref_mag, MinMode mode,
                             LossBreakdown* breakdown,
                             const MixingMatrix* forced) {
  const Tensor& re = value(est_re);
  const Tensor& im = value(est_im);
  require(re.same_shape(im), "csm_objective: Re/Im estimate shape mismatch");

  Tensor mag(re.shape);
  for (size_t i = 0; i < mag.data.size(); ++i) {
    mag.data[i] = std::hypot(re.data[i], im.data[i]);
  }
  const LossBreakdown bd =
      csm_loss_components(ref_re, ref_im, ref_mag, re, im, mag, mode, forced);
  if (breakdown != nullptr) *breakdown = bd;

  Tensor out({1});
  out.data[0] = bd.total;
  ValueRef y = emplace(std::move(out), true);

  const int m = re.shape[0];
  const size_t plane =
      static_cast<size_t>(re.shape[1]) * static_cast<size_t>(re.shape[2]);
  node(y).backprop = [this, est_re, est_im, y, bd, ref_re, ref_im, ref_mag,
                      mag = std::move(mag), m, plane] {
    const double g = node(y).grad.data[0];
    const double inv = g / (2.0 * static_cast<double>(plane));
    const Tensor& re = value(est_re);
    const Tensor& im = value(est_im);
    Tensor& gre = grad_buf(est_re);
    Tensor& gim = grad_buf(est_im);

    // Real and imaginary terms: plain L1 through the selected assignment.
    struct LinTerm {
      const Tensor* ref;
      const Tensor* est;
      Tensor* grad;
      const MixingMatrix* a;
    };
    const LinTerm lin[2] = {{&ref_re, &re, &gre, &bd.a_re},
                            {&ref_im, &im, &gim, &bd.a_im}};
    for (const LinTerm& t : lin) {
      for (int row = 0; row < 2; ++row) {
        const double* ref = t.ref->data.data() + static_cast<size_t>(row) * plane;
        for (size_t i = 0; i < plane; ++i) {
          double mixed = 0.0;
          for (int col = 0; col < m; ++col) {
            if (t.a->at(row, col)) {
              mixed += t.est->data[static_cast<size_t>(col) * plane + i];
            }
          }
          const double s = sgn(ref[i] - mixed);
          if (s == 0.0) continue;
          for (int col = 0; col < m; ++col) {
            if (t.a->at(row, col)) {
              t.grad->data[static_cast<size_t>(col) * plane + i] -= inv * s;
            }
          }
        }
      }
    }

    // Magnitude term: d|s|/dre = re/|s|, d|s|/dim = im/|s| (0 at the origin).
    for (int row = 0; row < 2; ++row) {
      const double* ref =
          ref_mag.data.data() + static_cast<size_t>(row) * plane;
      for (size_t i = 0; i < plane; ++i) {
        double mixed = 0.0;
        for (int col = 0; col < m; ++col) {
          if (bd.a_mag.at(row, col)) {
            mixed += mag.data[static_cast<size_t>(col) * plane + i];
          }
        }
        const double s = sgn(ref[i] - mixed);
        if (s == 0.0) continue;
        for (int col = 0; col < m; ++col) {
          if (!bd.a_mag.at(row, col)) continue;
          const size_t idx = static_cast<size_t>(col) * plane + i;
          const double mg = mag.data[idx];
          if (mg <= 0.0) continue;
          gre.data[idx] -= inv * s * re.data[idx] / mg;
          gim.data[idx] -= inv * s * im.data[idx] / mg;
        }
      }
    }
  };
  return y;
}

ValueRef Tape::mean_scalars(const std::vector<ValueRef>& xs) {
  require(!xs.empty(), "mean_scalars: empty input");
  Tensor out({1});
  bool needs = false;
  for (ValueRef x : xs) {
    require(value(x).numel() == 1, "mean_scalars: non-scalar input");
    out.data[0] += value(x).data[0];
    needs = needs || node(x).needs_grad;
  }
  out.data[0] /= static_cast<double>(xs.size());
  ValueRef y = emplace(std::move(out), needs);
  node(y).backprop = [this, xs, y] {
    const double g = node(y).grad.data[0] / static_cast<double>(xs.size());
    for (ValueRef x : xs) {
      if (node(x).needs_grad) grad_buf(x).data[0] += g;
    }
  };
  return y;
}

}  // namespace mixenh
