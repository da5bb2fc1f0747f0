#include "tubeflow/deform.hpp"

#include <cmath>

namespace tubeflow {

ConformalChart::ConformalChart(std::shared_ptr<const MetricChart> base,
                               std::shared_ptr<const DeformationProfile> profile)
    : MetricChart(base->dim(), base->period(), base->tube_radius()),
      base_(std::move(base)),
      profile_(std::move(profile)) {}

void ConformalChart::eval(const Vec& p, MetricJet& jet) const {
  base_->eval(p, jet);
  // Outside the support the deformation is the identity; returning the base
  // jet unchanged keeps the two charts bit-identical there.
  if (profile_->outside_support(p)) return;
  ScalarJet h = profile_->jet(p);
  double e = std::exp(h.value);
  int n = jet.n;

  MetricJet out;
  out.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.g[i][j] = e * jet.g[i][j];
      for (int k = 0; k < n; ++k) {
        out.dg[k][i][j] = e * (h.d[k] * jet.g[i][j] + jet.dg[k][i][j]);
        for (int l = 0; l < n; ++l) {
          out.ddg[k][l][i][j] =
              e * ((h.dd[k][l] + h.d[k] * h.d[l]) * jet.g[i][j] +
                   h.d[k] * jet.dg[l][i][j] + h.d[l] * jet.dg[k][i][j] +
                   jet.ddg[k][l][i][j]);
        }
      }
    }
  }
  jet = out;
}

G00Chart::G00Chart(std::shared_ptr<const MetricChart> base,
                   std::shared_ptr<const DeformationProfile> profile)
    : MetricChart(base->dim(), base->period(), base->tube_radius()),
      base_(std::move(base)),
      profile_(std::move(profile)) {}

void G00Chart::eval(const Vec& p, MetricJet& jet) const {
  base_->eval(p, jet);
  if (profile_->outside_support(p)) return;
  ScalarJet h = profile_->jet(p);
  double e = std::exp(h.value);
  int n = jet.n;

  // Only the (0,0) component is scaled by e^h; everything else passes
  // through untouched.
  double g00 = jet.g[0][0];
  Mat dg00{};
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) dg00[k][l] = jet.ddg[k][l][0][0];
  }
  Vec d00 = zero_vec();
  for (int k = 0; k < n; ++k) d00[k] = jet.dg[k][0][0];

  jet.g[0][0] = e * g00;
  for (int k = 0; k < n; ++k) {
    jet.dg[k][0][0] = e * (h.d[k] * g00 + d00[k]);
    for (int l = 0; l < n; ++l) {
      jet.ddg[k][l][0][0] = e * ((h.dd[k][l] + h.d[k] * h.d[l]) * g00 +
                                 h.d[k] * d00[l] + h.d[l] * d00[k] +
                                 dg00[k][l]);
    }
  }
}

}  // namespace tubeflow
