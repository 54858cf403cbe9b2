#include "wavecast/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "wavecast/errors.hpp"

namespace wavecast {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kTau = 1e-12;  // floor for the 2-var curvature

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double population_stdev(std::span<const double> v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

KernelSpec kernel_preset(std::string_view name, std::size_t feature_count) {
  const double root_p = std::sqrt(static_cast<double>(feature_count));
  if (name == "linear") return KernelSpec::linear();
  if (name == "quadratic") return KernelSpec::polynomial(2);
  if (name == "cubic") return KernelSpec::polynomial(3);
  if (name == "fine-gaussian") return KernelSpec::gaussian(root_p / 4.0);
  if (name == "medium-gaussian") return KernelSpec::gaussian(root_p);
  if (name == "coarse-gaussian") return KernelSpec::gaussian(4.0 * root_p);
  throw DataError("unknown kernel preset: " + std::string(name));
}

const std::vector<std::string>& kernel_preset_names() {
  static const std::vector<std::string> names = {
      "linear",         "quadratic",       "cubic",
      "fine-gaussian",  "medium-gaussian", "coarse-gaussian"};
  return names;
}

std::string kernel_name(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::kLinear: return "linear";
    case KernelKind::kPolynomial: return "polynomial";
    case KernelKind::kGaussian: return "gaussian";
  }
  return "linear";
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size())
    throw ShapeError("kernel_eval: dimension mismatch");
  switch (spec.kind) {
    case KernelKind::kLinear:
      return dot(x, y);
    case KernelKind::kPolynomial: {
      const double base = 1.0 + dot(x, y);
      double acc = 1.0;
      for (int i = 0; i < spec.degree; ++i) acc *= base;
      return acc;
    }
    case KernelKind::kGaussian: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
      }
      return std::exp(-d2 / (2.0 * spec.scale * spec.scale));
    }
  }
  return 0.0;
}

std::vector<double> FeatureScaler::apply(std::span<const double> x) const {
  if (x.size() != mean.size())
    throw ShapeError("feature scaler: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (x[i] - mean[i]) / stdev[i];
  return out;
}

FeatureScaler FeatureScaler::fit(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  FeatureScaler s;
  s.mean.assign(p, 0.0);
  s.stdev.assign(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) s.mean[c] += x(r, c);
  for (std::size_t c = 0; c < p; ++c) s.mean[c] /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      const double d = x(r, c) - s.mean[c];
      s.stdev[c] += d * d;
    }
  for (std::size_t c = 0; c < p; ++c) {
    s.stdev[c] = std::sqrt(s.stdev[c] / static_cast<double>(n));
    if (s.stdev[c] <= 0.0) s.stdev[c] = 1.0;  // constant feature
  }
  return s;
}

// Dual solver. The 2n stacked variables are a_i (plus side, sign +1) and
// a*_i (star side, sign -1); Q(s,t) = sign_s sign_t K(s mod n, t mod n).
// Pair selection is the maximal violating pair with lowest-index
// tie-breaking, so training is deterministic.
SvrModel train_svr(const Matrix& x, std::span<const double> y,
                   const KernelSpec& spec, const SvrHyperParams& hyper) {
  const std::size_t n = x.rows();
  if (n == 0) throw DataError("train_svr: empty training set");
  if (n < 2) throw DataError("train_svr: need at least 2 samples");
  if (y.size() != n) throw ShapeError("train_svr: X rows != y length");
  if (x.cols() == 0) throw DataError("train_svr: no features");
  if (hyper.c <= 0.0) throw DataError("train_svr: C must be positive");
  for (double v : x.data())
    if (!std::isfinite(v)) throw DataError("train_svr: non-finite feature");
  for (double v : y)
    if (!std::isfinite(v)) throw DataError("train_svr: non-finite target");

  const double c_box = hyper.c;
  const double eps = hyper.epsilon ? *hyper.epsilon : 0.1 * population_stdev(y);
  if (eps < 0.0) throw DataError("train_svr: epsilon must be nonnegative");

  FeatureScaler scaler = FeatureScaler::fit(x);
  Matrix xs(n, x.cols());
  for (std::size_t r = 0; r < n; ++r) {
    auto scaled = scaler.apply(x.row(r));
    std::copy(scaled.begin(), scaled.end(), xs.row(r).begin());
  }

  Matrix kernel_cache(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      kernel_cache(i, j) = kernel_cache(j, i) = kernel_eval(spec, xs.row(i), xs.row(j));

  const std::size_t m = 2 * n;
  std::vector<double> a(m, 0.0);
  std::vector<double> grad(m);
  std::vector<int8_t> sign(m);
  for (std::size_t s = 0; s < n; ++s) {
    sign[s] = 1;
    grad[s] = eps - y[s];
    sign[n + s] = -1;
    grad[n + s] = eps + y[s];
  }
  auto q = [&](std::size_t s, std::size_t t) {
    return sign[s] * sign[t] * kernel_cache(s % n, t % n);
  };

  bool converged = false;
  std::size_t iter = 0;
  for (; iter < hyper.max_iterations; ++iter) {
    // maximal violating pair
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    std::size_t i = m, j = m;
    for (std::size_t s = 0; s < m; ++s) {
      const double v = -sign[s] * grad[s];
      const bool in_up = (sign[s] > 0 && a[s] < c_box) || (sign[s] < 0 && a[s] > 0.0);
      const bool in_low = (sign[s] < 0 && a[s] < c_box) || (sign[s] > 0 && a[s] > 0.0);
      if (in_up && v > up_best) {
        up_best = v;
        i = s;
      }
      if (in_low && v < low_best) {
        low_best = v;
        j = s;
      }
    }
    if (i == m || j == m || up_best - low_best <= hyper.tolerance) {
      converged = true;
      break;
    }

    const double old_ai = a[i], old_aj = a[j];
    if (sign[i] != sign[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) { a[j] = 0.0; a[i] = diff; }
      } else {
        if (a[i] < 0.0) { a[i] = 0.0; a[j] = -diff; }
      }
      if (diff > 0.0) {
        if (a[i] > c_box) { a[i] = c_box; a[j] = c_box - diff; }
      } else {
        if (a[j] > c_box) { a[j] = c_box; a[i] = c_box + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c_box) {
        if (a[i] > c_box) { a[i] = c_box; a[j] = sum - c_box; }
      } else {
        if (a[j] < 0.0) { a[j] = 0.0; a[i] = sum; }
      }
      if (sum > c_box) {
        if (a[j] > c_box) { a[j] = c_box; a[i] = sum - c_box; }
      } else {
        if (a[i] < 0.0) { a[i] = 0.0; a[j] = sum; }
      }
    }

    const double di = a[i] - old_ai, dj = a[j] - old_aj;
    for (std::size_t t = 0; t < m; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  // bias from the gradient: average over free variables, midpoint of the
  // feasible interval otherwise
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const double yg = sign[s] * grad[s];
    if (a[s] >= c_box) {
      if (sign[s] < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (a[s] <= 0.0) {
      if (sign[s] > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                    : (upper + lower) / 2.0;

  SvrModel model;
  model.kernel = spec;
  model.c = c_box;
  model.epsilon = eps;
  model.scaler = std::move(scaler);
  model.bias = -rho;
  model.converged = converged;
  model.iterations = iter;

  std::vector<double> beta(n);
  std::vector<std::size_t> sv;
  for (std::size_t s = 0; s < n; ++s) {
    beta[s] = a[s] - a[n + s];
    if (std::abs(beta[s]) > 1e-12) sv.push_back(s);
  }
  model.support_vectors = Matrix(sv.size(), x.cols());
  model.dual_coeffs.resize(sv.size());
  model.support_indices = sv;
  for (std::size_t k = 0; k < sv.size(); ++k) {
    auto src = xs.row(sv[k]);
    std::copy(src.begin(), src.end(), model.support_vectors.row(k).begin());
    model.dual_coeffs[k] = beta[sv[k]];
  }

  double quad_term = 0.0, abs_term = 0.0, lin_term = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    if (beta[s] == 0.0) continue;
    abs_term += std::abs(beta[s]);
    lin_term += y[s] * beta[s];
    for (std::size_t t = 0; t < n; ++t)
      quad_term += beta[s] * beta[t] * kernel_cache(s, t);
  }
  model.dual_objective = -0.5 * quad_term - eps * abs_term + lin_term;
  return model;
}

double svr_predict(const SvrModel& model, std::span<const double> x) {
  const std::vector<double> xs = model.scaler.apply(x);
  double acc = model.bias;
  for (std::size_t k = 0; k < model.support_vectors.rows(); ++k)
    acc += model.dual_coeffs[k] *
           kernel_eval(model.kernel, model.support_vectors.row(k), xs);
  return acc;
}

std::string SvrModel::to_json() const {
  ordered_json j;
  j["model_type"] = "svr";
  j["kernel"] = {{"kind", kernel_name(kernel)},
                 {"degree", kernel.degree},
                 {"scale", kernel.scale}};
  j["hyperparams"] = {{"c", c}, {"epsilon", epsilon}};
  j["scaler"] = {{"mean", scaler.mean}, {"stdev", scaler.stdev}};
  auto rows = ordered_json::array();
  for (std::size_t r = 0; r < support_vectors.rows(); ++r) {
    auto row = support_vectors.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["support_vectors"] = std::move(rows);
  j["dual_coeffs"] = dual_coeffs;
  j["support_indices"] = support_indices;
  j["bias"] = bias;
  j["convergence_flag"] = converged;
  j["iterations"] = iterations;
  j["dual_objective"] = dual_objective;
  return j.dump(2);
}

SvrModel SvrModel::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("svr model: bad JSON: ") + e.what());
  }
  if (j.value("model_type", "") != "svr")
    throw DataError("svr model: model_type is not \"svr\"");

  SvrModel m;
  const std::string kind = j.at("kernel").at("kind").get<std::string>();
  if (kind == "linear") m.kernel.kind = KernelKind::kLinear;
  else if (kind == "polynomial") m.kernel.kind = KernelKind::kPolynomial;
  else if (kind == "gaussian") m.kernel.kind = KernelKind::kGaussian;
  else throw DataError("svr model: unknown kernel kind " + kind);
  m.kernel.degree = j.at("kernel").value("degree", 2);
  m.kernel.scale = j.at("kernel").value("scale", 1.0);
  m.c = j.at("hyperparams").at("c").get<double>();
  m.epsilon = j.at("hyperparams").at("epsilon").get<double>();
  m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
  m.scaler.stdev = j.at("scaler").at("stdev").get<std::vector<double>>();
  const auto& rows = j.at("support_vectors");
  m.support_vectors = Matrix(rows.size(), m.scaler.mean.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto row = rows[r].get<std::vector<double>>();
    if (row.size() != m.support_vectors.cols())
      throw DataError("svr model: ragged support vectors");
    std::copy(row.begin(), row.end(), m.support_vectors.row(r).begin());
  }
  m.dual_coeffs = j.at("dual_coeffs").get<std::vector<double>>();
  if (m.dual_coeffs.size() != m.support_vectors.rows())
    throw DataError("svr model: dual_coeffs/support_vectors mismatch");
  m.support_indices =
      j.value("support_indices", std::vector<std::size_t>{});
  m.bias = j.at("bias").get<double>();
  m.converged = j.at("convergence_flag").get<bool>();
  m.iterations = j.value("iterations", std::size_t{0});
  m.dual_objective = j.value("dual_objective", 0.0);
  return m;
}

}  // namespace wavecast
