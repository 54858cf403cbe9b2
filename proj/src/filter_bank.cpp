#include "wavecast/filter_bank.hpp"

#include <cmath>

#include "wavecast/errors.hpp"
#include "wavecast/linalg.hpp"

namespace wavecast {
namespace {

// The bank has the structure
//   alpha = [p, q, r, s, s, r, q, p]
//   beta  = [-q, -p, s, r, -r, -s, p, q]
//   gamma = alternating-sign modulation of beta
//   delta = alternating-sign modulation of alpha
// with r = 1/2 - q, s = 1/2 - p and the orthonormality constraint
// p*s + q*r = 0, i.e. (p,q) on the circle (p-1/4)^2 + (q-1/4)^2 = 1/8.
// The conventional 8-decimal listing (p = -0.06737176, q = 0.09419511)
// sits about 3e-9 off that circle, which is enough to break the 1e-10
// orthonormality of the transform matrix; these values are the projection
// of the listed pair onto the circle and round back to the same decimals.
constexpr double kP = -0.067371762801237856;
constexpr double kQ = 0.094195108624809731;
constexpr double kR = 0.40580489137519027;
constexpr double kS = 0.5673717628012378;

FilterBank structured_bank(double p, double q, double r, double s) {
  FilterBank fb;
  fb.alpha = {p, q, r, s, s, r, q, p};
  fb.beta = {-q, -p, s, r, -r, -s, p, q};
  fb.gamma = {-q, p, s, -r, -r, s, p, -q};
  fb.delta = {p, -q, r, -s, s, -r, q, -p};
  return fb;
}

double band_sum(const std::vector<double>& f) {
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc;
}

// Overlap of the second half of f against the first half of g; this is the
// inner product of two transform rows whose placements differ by 4 columns.
double shift4_overlap(const std::vector<double>& f, const std::vector<double>& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += f[i + 4] * g[i];
  return acc;
}

}  // namespace

const std::vector<double>& FilterBank::band(std::size_t i) const {
  switch (i) {
    case 0: return alpha;
    case 1: return beta;
    case 2: return gamma;
    default: return delta;
  }
}

FilterBank default_filter_bank() { return structured_bank(kP, kQ, kR, kS); }

FilterBank paper_verbatim_filter_bank() {
  FilterBank fb;
  fb.alpha = {-0.06737176, 0.09419511, 0.40580489, 0.56737176,
              0.56737176, 0.40580489, 0.09419511, -0.06737176};
  fb.beta = {-0.09419511, 0.06737176, 0.56737176, 0.40580489,
             -0.40580489, -0.56737176, -0.06737176, 0.09419511};
  // Sixth coefficient printed as -0.56737176; that sign breaks the
  // zero-sum and orthogonality conditions. Kept verbatim here.
  fb.gamma = {-0.09419511, -0.06737176, 0.56737176, -0.40580489,
              -0.40580489, -0.56737176, -0.06737176, -0.09419511};
  fb.delta = {-0.06737176, -0.09419511, 0.40580489, -0.56737176,
              0.56737176, -0.40580489, 0.09419511, 0.06737176};
  return fb;
}

bool ValidationReport::all_pass() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

double ValidationReport::max_residual() const {
  double worst = 0.0;
  for (const auto& c : conditions) worst = std::max(worst, c.residual);
  return worst;
}

const ConditionResult* ValidationReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_filter_bank(const FilterBank& fb, double tolerance) {
  static const char* kNames[4] = {"alpha", "beta", "gamma", "delta"};
  for (std::size_t i = 0; i < 4; ++i) {
    if (fb.band(i).size() != kFilterLength)
      throw ShapeError(std::string("filter bank: ") + kNames[i] +
                       " must have length 8");
  }

  ValidationReport report;
  report.tolerance = tolerance;
  auto add = [&](std::string name, double residual) {
    report.conditions.push_back(
        {std::move(name), std::abs(residual), std::abs(residual) <= tolerance});
  };

  add("sum(alpha)=2", band_sum(fb.alpha) - 2.0);
  add("sum(beta)=0", band_sum(fb.beta));
  add("sum(gamma)=0", band_sum(fb.gamma));
  add("sum(delta)=0", band_sum(fb.delta));

  for (std::size_t i = 0; i < 4; ++i)
    add(std::string("norm(") + kNames[i] + ")=1",
        std::sqrt(squared_norm(fb.band(i))) - 1.0);

  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      add(std::string(kNames[i]) + "." + kNames[j] + "=0",
          dot(fb.band(i), fb.band(j)));

  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      add(std::string("shift4(") + kNames[i] + "," + kNames[j] + ")=0",
          shift4_overlap(fb.band(i), fb.band(j)));

  return report;
}

}  // namespace wavecast
