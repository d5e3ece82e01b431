#include "wikireading/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wikireading::nn {

namespace {

using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Vec>;
using ConstVecMap = Eigen::Map<const Vec>;

ConstMatMap as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
MatMap as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
  return MatMap(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
ConstVecMap as_vector(const Tensor& t) { return ConstVecMap(t.data(), static_cast<Eigen::Index>(t.size())); }
VecMap as_vector(Tensor& t) { return VecMap(t.data(), static_cast<Eigen::Index>(t.size())); }

Graph& graph_of(Var a) {
  if (a.graph == nullptr) throw std::invalid_argument("variable is not bound to a computation record");
  return *a.graph;
}

Graph& graph_of(Var a, Var b) {
  if (a.graph != b.graph) throw std::invalid_argument("operands belong to different computation records");
  return graph_of(a);
}

[[noreturn]] void mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b));
}

void require_rank(const char* op, const Shape& s, std::size_t rank) {
  if (s.size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " + to_string(s));
  }
}

void accumulate(Tensor& dst, const Tensor& src) { as_vector(dst) += as_vector(src); }

template <typename F, typename DF>
Var unary(Var a, OpKind kind, F f, DF df_from_output) {
  Graph& g = graph_of(a);
  Tensor out(a.shape());
  const auto in = a.value().values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  const auto ai = a.id;
  return g.record(kind, std::move(out), {ai}, [ai, df_from_output](Graph& gr, std::uint32_t self) {
    const Tensor& y = gr.value(self);
    const Tensor& x = gr.value(ai);
    const Tensor& gy = gr.grad(self);
    Tensor& gx = gr.grad(ai);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * df_from_output(x[i], y[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  require_rank("matmul", sa, 2);
  if (sb.size() == 1) {
    if (sa[1] != sb[0]) mismatch("matmul", sa, sb);
    const std::size_t m = sa[0], k = sa[1];
    Tensor out({m});
    as_vector(out).noalias() = as_matrix(a.value(), m, k) * as_vector(b.value());
    const auto ai = a.id, bi = b.id;
    return g.record(OpKind::kMatMul, std::move(out), {ai, bi}, [ai, bi, m, k](Graph& gr, std::uint32_t self) {
      const Tensor& gy = gr.grad(self);
      as_matrix(gr.grad(ai), m, k).noalias() += as_vector(gy) * as_vector(gr.value(bi)).transpose();
      as_vector(gr.grad(bi)).noalias() += as_matrix(gr.value(ai), m, k).transpose() * as_vector(gy);
    });
  }
  require_rank("matmul", sb, 2);
  if (sa[1] != sb[0]) mismatch("matmul", sa, sb);
  const std::size_t m = sa[0], k = sa[1], n = sb[1];
  Tensor out({m, n});
  as_matrix(out, m, n).noalias() = as_matrix(a.value(), m, k) * as_matrix(b.value(), k, n);
  const auto ai = a.id, bi = b.id;
  return g.record(OpKind::kMatMul, std::move(out), {ai, bi}, [ai, bi, m, k, n](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    as_matrix(gr.grad(ai), m, k).noalias() += as_matrix(gy, m, n) * as_matrix(gr.value(bi), k, n).transpose();
    as_matrix(gr.grad(bi), k, n).noalias() += as_matrix(gr.value(ai), m, k).transpose() * as_matrix(gy, m, n);
  });
}

Var linear(Var weight, Var x, Var bias) {
  Graph& g = graph_of(weight, x);
  graph_of(weight, bias);
  const Shape& sw = weight.shape();
  require_rank("linear", sw, 2);
  require_rank("linear", x.shape(), 1);
  if (sw[1] != x.size()) mismatch("linear", sw, x.shape());
  if (bias.shape() != Shape{sw[0]}) mismatch("linear", sw, bias.shape());
  const std::size_t r = sw[0], c = sw[1];
  Tensor out = bias.value();
  as_vector(out).noalias() += as_matrix(weight.value(), r, c) * as_vector(x.value());
  const auto wi = weight.id, xi = x.id, bi = bias.id;
  return g.record(OpKind::kLinear, std::move(out), {wi, xi, bi}, [wi, xi, bi, r, c](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    as_matrix(gr.grad(wi), r, c).noalias() += as_vector(gy) * as_vector(gr.value(xi)).transpose();
    as_vector(gr.grad(xi)).noalias() += as_matrix(gr.value(wi), r, c).transpose() * as_vector(gy);
    accumulate(gr.grad(bi), gy);
  });
}

Var linear(Var weight, Var x) {
  Graph& g = graph_of(weight, x);
  const Shape& sw = weight.shape();
  require_rank("linear", sw, 2);
  require_rank("linear", x.shape(), 1);
  if (sw[1] != x.size()) mismatch("linear", sw, x.shape());
  const std::size_t r = sw[0], c = sw[1];
  Tensor out({r});
  as_vector(out).noalias() = as_matrix(weight.value(), r, c) * as_vector(x.value());
  const auto wi = weight.id, xi = x.id;
  return g.record(OpKind::kLinear, std::move(out), {wi, xi}, [wi, xi, r, c](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    as_matrix(gr.grad(wi), r, c).noalias() += as_vector(gy) * as_vector(gr.value(xi)).transpose();
    as_vector(gr.grad(xi)).noalias() += as_matrix(gr.value(wi), r, c).transpose() * as_vector(gy);
  });
}

Var add(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (a.shape() != b.shape()) mismatch("add", a.shape(), b.shape());
  Tensor out = a.value();
  as_vector(out) += as_vector(b.value());
  const auto ai = a.id, bi = b.id;
  return g.record(OpKind::kAdd, std::move(out), {ai, bi}, [ai, bi](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    accumulate(gr.grad(ai), gy);
    accumulate(gr.grad(bi), gy);
  });
}

Var sub(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (a.shape() != b.shape()) mismatch("sub", a.shape(), b.shape());
  Tensor out = a.value();
  as_vector(out) -= as_vector(b.value());
  const auto ai = a.id, bi = b.id;
  return g.record(OpKind::kSub, std::move(out), {ai, bi}, [ai, bi](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    accumulate(gr.grad(ai), gy);
    as_vector(gr.grad(bi)) -= as_vector(gy);
  });
}

Var mul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (a.shape() != b.shape()) mismatch("mul", a.shape(), b.shape());
  Tensor out(a.shape());
  as_vector(out) = as_vector(a.value()).cwiseProduct(as_vector(b.value()));
  const auto ai = a.id, bi = b.id;
  return g.record(OpKind::kMul, std::move(out), {ai, bi}, [ai, bi](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    as_vector(gr.grad(ai)) += as_vector(gy).cwiseProduct(as_vector(gr.value(bi)));
    as_vector(gr.grad(bi)) += as_vector(gy).cwiseProduct(as_vector(gr.value(ai)));
  });
}

Var scale(Var a, Scalar factor) {
  Graph& g = graph_of(a);
  Tensor out = a.value();
  as_vector(out) *= factor;
  const auto ai = a.id;
  return g.record(OpKind::kScale, std::move(out), {ai}, [ai, factor](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    as_vector(gr.grad(ai)) += factor * as_vector(gy);
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  Graph& g = graph_of(parts.front());
  const Shape& first = parts.front().shape();
  const std::size_t rank = first.size();
  std::size_t rows = 1;
  for (std::size_t i = 0; i + 1 < rank; ++i) rows *= first[i];
  std::size_t total = 0;
  std::vector<std::size_t> widths;
  std::vector<std::uint32_t> ids;
  for (const Var& p : parts) {
    graph_of(parts.front(), p);
    const Shape& s = p.shape();
    if (s.size() != rank || !std::equal(s.begin(), s.end() - 1, first.begin())) mismatch("concat", first, s);
    widths.push_back(s.back());
    ids.push_back(p.id);
    total += s.back();
  }
  Shape out_shape = first;
  out_shape.back() = total;
  Tensor out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    }
    offset += widths[k];
  }
  return g.record(OpKind::kConcat, std::move(out), ids, [ids, widths, rows, total](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor& gx = gr.grad(ids[k]);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < widths[k]; ++j) gx[r * widths[k] + j] += gy[r * total + offset + j];
      }
      offset += widths[k];
    }
  });
}

Var concat(std::initializer_list<Var> parts) { return concat(std::span<const Var>(parts.begin(), parts.size())); }

Var slice(Var a, std::size_t offset, std::size_t length) {
  Graph& g = graph_of(a);
  require_rank("slice", a.shape(), 1);
  if (length == 0 || offset + length > a.size()) {
    throw ShapeError("slice: range [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                     ") outside " + to_string(a.shape()));
  }
  Tensor out({length});
  std::copy_n(a.value().data() + offset, length, out.data());
  const auto ai = a.id;
  return g.record(OpKind::kSlice, std::move(out), {ai}, [ai, offset, length](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    Tensor& gx = gr.grad(ai);
    for (std::size_t i = 0; i < length; ++i) gx[offset + i] += gy[i];
  });
}

Var row(Var a, std::size_t i) {
  Graph& g = graph_of(a);
  require_rank("row", a.shape(), 2);
  if (i >= a.shape()[0]) throw ShapeError("row: index " + std::to_string(i) + " outside " + to_string(a.shape()));
  const std::size_t cols = a.shape()[1];
  Tensor out({cols});
  std::copy_n(a.value().data() + i * cols, cols, out.data());
  const auto ai = a.id;
  return g.record(OpKind::kRow, std::move(out), {ai}, [ai, i, cols](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    Tensor& gx = gr.grad(ai);
    for (std::size_t j = 0; j < cols; ++j) gx[i * cols + j] += gy[j];
  });
}

Var stack(std::span<const Var> rows) {
  if (rows.empty()) throw ShapeError("stack: no operands");
  Graph& g = graph_of(rows.front());
  const Shape& first = rows.front().shape();
  require_rank("stack", first, 1);
  const std::size_t cols = first[0];
  Tensor out({rows.size(), cols});
  std::vector<std::uint32_t> ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    graph_of(rows.front(), rows[r]);
    if (rows[r].shape() != first) mismatch("stack", first, rows[r].shape());
    std::copy_n(rows[r].value().data(), cols, out.data() + r * cols);
    ids.push_back(rows[r].id);
  }
  return g.record(OpKind::kStack, std::move(out), ids, [ids, cols](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      Tensor& gx = gr.grad(ids[r]);
      for (std::size_t j = 0; j < cols; ++j) gx[j] += gy[r * cols + j];
    }
  });
}

Var sum(Var a) {
  Graph& g = graph_of(a);
  const auto ai = a.id;
  return g.record(OpKind::kSum, Tensor::scalar(as_vector(a.value()).sum()), {ai}, [ai](Graph& gr, std::uint32_t self) {
    const Scalar gy = gr.grad(self)[0];
    as_vector(gr.grad(ai)).array() += gy;
  });
}

Var mean(Var a) {
  Graph& g = graph_of(a);
  const auto ai = a.id;
  const auto n = static_cast<Scalar>(a.size());
  return g.record(OpKind::kMean, Tensor::scalar(as_vector(a.value()).sum() / n), {ai},
                  [ai, n](Graph& gr, std::uint32_t self) {
                    const Scalar gy = gr.grad(self)[0];
                    as_vector(gr.grad(ai)).array() += gy / n;
                  });
}

namespace {

Var reduce_rows(Var a, Scalar factor, OpKind kind) {
  Graph& g = graph_of(a);
  require_rank(to_string(kind), a.shape(), 2);
  const std::size_t rows = a.shape()[0], cols = a.shape()[1];
  Tensor out({cols});
  as_vector(out).noalias() = as_matrix(a.value(), rows, cols).colwise().sum().transpose() * factor;
  const auto ai = a.id;
  return g.record(kind, std::move(out), {ai}, [ai, rows, cols, factor](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    as_matrix(gr.grad(ai), rows, cols).rowwise() += factor * as_vector(gy).transpose();
  });
}

}  // namespace

Var sum_rows(Var a) { return reduce_rows(a, 1.0, OpKind::kSumRows); }

Var mean_rows(Var a) {
  require_rank("mean_rows", a.shape(), 2);
  return reduce_rows(a, 1.0 / static_cast<Scalar>(a.shape()[0]), OpKind::kMeanRows);
}

Var dot(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (a.shape() != b.shape()) mismatch("dot", a.shape(), b.shape());
  const auto ai = a.id, bi = b.id;
  return g.record(OpKind::kDot, Tensor::scalar(as_vector(a.value()).dot(as_vector(b.value()))), {ai, bi},
                  [ai, bi](Graph& gr, std::uint32_t self) {
                    const Scalar gy = gr.grad(self)[0];
                    as_vector(gr.grad(ai)) += gy * as_vector(gr.value(bi));
                    as_vector(gr.grad(bi)) += gy * as_vector(gr.value(ai));
                  });
}

Var tanh(Var a) {
  return unary(
      a, OpKind::kTanh, [](Scalar x) { return std::tanh(x); }, [](Scalar, Scalar y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a, OpKind::kSigmoid,
      [](Scalar x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const Scalar e = std::exp(x);
        return e / (1.0 + e);
      },
      [](Scalar, Scalar y) { return y * (1.0 - y); });
}

Var exp(Var a) {
  return unary(
      a, OpKind::kExp, [](Scalar x) { return std::exp(x); }, [](Scalar, Scalar y) { return y; });
}

Var log(Var a) {
  return unary(
      a, OpKind::kLog, [](Scalar x) { return std::log(x); }, [](Scalar x, Scalar) { return 1.0 / x; });
}

std::vector<Scalar> softmax_values(std::span<const Scalar> logits) {
  if (logits.empty()) throw ShapeError("softmax: empty input");
  const Scalar peak = *std::max_element(logits.begin(), logits.end());
  std::vector<Scalar> out(logits.size());
  Scalar total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += out[i] = std::exp(logits[i] - peak);
  for (auto& v : out) v /= total;
  return out;
}

Var softmax(Var logits) {
  Graph& g = graph_of(logits);
  require_rank("softmax", logits.shape(), 1);
  Tensor out = Tensor::vector(softmax_values(logits.value().values()));
  const auto li = logits.id;
  return g.record(OpKind::kSoftmax, std::move(out), {li}, [li](Graph& gr, std::uint32_t self) {
    const Tensor& y = gr.value(self);
    const Tensor& gy = gr.grad(self);
    const Scalar inner = as_vector(gy).dot(as_vector(y));
    Tensor& gx = gr.grad(li);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += y[i] * (gy[i] - inner);
  });
}

namespace {

Scalar log_sum_exp(std::span<const Scalar> x) {
  const Scalar peak = *std::max_element(x.begin(), x.end());
  Scalar total = 0.0;
  for (Scalar v : x) total += std::exp(v - peak);
  return peak + std::log(total);
}

}  // namespace

Var log_softmax(Var logits) {
  Graph& g = graph_of(logits);
  require_rank("log_softmax", logits.shape(), 1);
  if (logits.size() == 0) throw ShapeError("log_softmax: empty input");
  const Scalar lse = log_sum_exp(logits.value().values());
  Tensor out = logits.value();
  as_vector(out).array() -= lse;
  const auto li = logits.id;
  return g.record(OpKind::kLogSoftmax, std::move(out), {li}, [li](Graph& gr, std::uint32_t self) {
    const Tensor& y = gr.value(self);
    const Tensor& gy = gr.grad(self);
    const Scalar total = as_vector(gy).sum();
    Tensor& gx = gr.grad(li);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] - std::exp(y[i]) * total;
  });
}

Var cross_entropy(Var logits, std::size_t target) {
  Graph& g = graph_of(logits);
  require_rank("cross_entropy", logits.shape(), 1);
  if (target >= logits.size()) {
    throw ShapeError("cross_entropy: target " + std::to_string(target) + " outside " + to_string(logits.shape()));
  }
  const auto values = logits.value().values();
  const Scalar lse = log_sum_exp(values);
  const auto li = logits.id;
  return g.record(OpKind::kCrossEntropy, Tensor::scalar(lse - values[target]), {li},
                  [li, target, lse](Graph& gr, std::uint32_t self) {
                    const Scalar gy = gr.grad(self)[0];
                    const Tensor& x = gr.value(li);
                    Tensor& gx = gr.grad(li);
                    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy * std::exp(x[i] - lse);
                    gx[target] -= gy;
                  });
}

Var sigmoid_cross_entropy(Var logits, std::span<const int> labels) {
  Graph& g = graph_of(logits);
  require_rank("sigmoid_cross_entropy", logits.shape(), 1);
  if (labels.size() != logits.size()) {
    throw ShapeError("sigmoid_cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                     to_string(logits.shape()));
  }
  const auto x = logits.value().values();
  const auto n = static_cast<Scalar>(x.size());
  Scalar total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // max(x,0) - x*y + log(1 + exp(-|x|))
    total += std::max(x[i], 0.0) - x[i] * labels[i] + std::log1p(std::exp(-std::abs(x[i])));
  }
  std::vector<int> kept(labels.begin(), labels.end());
  const auto li = logits.id;
  return g.record(OpKind::kSigmoidCrossEntropy, Tensor::scalar(total / n), {li},
                  [li, kept = std::move(kept), n](Graph& gr, std::uint32_t self) {
                    const Scalar gy = gr.grad(self)[0];
                    const Tensor& x = gr.value(li);
                    Tensor& gx = gr.grad(li);
                    for (std::size_t i = 0; i < gx.size(); ++i) {
                      const Scalar p = x[i] >= 0 ? 1.0 / (1.0 + std::exp(-x[i]))
                                                 : std::exp(x[i]) / (1.0 + std::exp(x[i]));
                      gx[i] += gy * (p - kept[i]) / n;
                    }
                  });
}

namespace {

void check_ids(const Parameter& table, std::span<const int> ids) {
  require_rank("embed", table.value.shape(), 2);
  const auto vocab = static_cast<long long>(table.value.shape()[0]);
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      throw std::out_of_range("embed: id " + std::to_string(id) + " outside table " + table.name + " " +
                              to_string(table.value.shape()));
    }
  }
}

}  // namespace

Var embed(Graph& graph, Parameter& table, std::span<const int> ids) {
  if (ids.empty()) throw ShapeError("embed: empty id sequence");
  check_ids(table, ids);
  const std::size_t d = table.value.shape()[1];
  Tensor out({ids.size(), d});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    std::copy_n(table.value.data() + static_cast<std::size_t>(ids[r]) * d, d, out.data() + r * d);
  }
  std::vector<int> kept(ids.begin(), ids.end());
  Parameter* target = &table;
  return graph.record(OpKind::kEmbed, std::move(out), {}, [target, kept = std::move(kept), d](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    Scalar* dst = target->grad.data();
    for (std::size_t r = 0; r < kept.size(); ++r) {
      const Scalar* src = gy.data() + r * d;
      Scalar* row_dst = dst + static_cast<std::size_t>(kept[r]) * d;
      for (std::size_t j = 0; j < d; ++j) row_dst[j] += src[j];
    }
  });
}

Var embed(Graph& graph, Parameter& table, int id) {
  const int ids[1] = {id};
  check_ids(table, ids);
  const std::size_t d = table.value.shape()[1];
  Tensor out({d});
  std::copy_n(table.value.data() + static_cast<std::size_t>(id) * d, d, out.data());
  Parameter* target = &table;
  return graph.record(OpKind::kEmbed, std::move(out), {}, [target, id, d](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    Scalar* row_dst = target->grad.data() + static_cast<std::size_t>(id) * d;
    for (std::size_t j = 0; j < d; ++j) row_dst[j] += gy[j];
  });
}

Var weighted_sum(Var weights, std::span<const Var> vectors) {
  Graph& g = graph_of(weights);
  require_rank("weighted_sum", weights.shape(), 1);
  if (vectors.empty() || vectors.size() != weights.size()) {
    throw ShapeError("weighted_sum: " + std::to_string(vectors.size()) + " vectors for weights " +
                     to_string(weights.shape()));
  }
  const Shape& first = vectors.front().shape();
  require_rank("weighted_sum", first, 1);
  Tensor out(first);
  std::vector<std::uint32_t> ids{weights.id};
  const Tensor& w = weights.value();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    graph_of(weights, vectors[i]);
    if (vectors[i].shape() != first) mismatch("weighted_sum", first, vectors[i].shape());
    as_vector(out) += w[i] * as_vector(vectors[i].value());
    ids.push_back(vectors[i].id);
  }
  return g.record(OpKind::kWeightedSum, std::move(out), ids, [ids](Graph& gr, std::uint32_t self) {
    const Tensor& gy = gr.grad(self);
    const Tensor& w = gr.value(ids[0]);
    for (std::size_t i = 1; i < ids.size(); ++i) {
      gr.grad(ids[0])[i - 1] += as_vector(gy).dot(as_vector(gr.value(ids[i])));
      as_vector(gr.grad(ids[i])) += w[i - 1] * as_vector(gy);
    }
  });
}

Var apply_primitive(Primitive kind, std::span<const Var> inputs) {
  auto need = [&](std::size_t n, const char* name) {
    if (inputs.size() != n) {
      throw std::invalid_argument(std::string(name) + " takes " + std::to_string(n) + " operand(s), got " +
                                  std::to_string(inputs.size()));
    }
  };
  switch (kind) {
    case Primitive::kMatMul: need(2, "matmul"); return matmul(inputs[0], inputs[1]);
    case Primitive::kAdd: need(2, "add"); return add(inputs[0], inputs[1]);
    case Primitive::kMul: need(2, "mul"); return mul(inputs[0], inputs[1]);
    case Primitive::kConcat: return concat(inputs);
    case Primitive::kMean: need(1, "mean"); return mean(inputs[0]);
    case Primitive::kTanh: need(1, "tanh"); return tanh(inputs[0]);
    case Primitive::kSigmoid: need(1, "sigmoid"); return sigmoid(inputs[0]);
  }
  throw std::invalid_argument("unknown primitive");
}

}  // namespace wikireading::nn
