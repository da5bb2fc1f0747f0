#pragma once

// The two deformed charts. Both leave the metric untouched outside supp h and
// keep the central curve x = 0 a geodesic.
//   ConformalChart: g~_ij = e^h g_ij (all components scaled).
//   G00Chart:       g~_00 = e^h g_00, every other component unchanged.

#include <memory>

#include "tubeflow/chart.hpp"
#include "tubeflow/profile.hpp"

namespace tubeflow {

class ConformalChart : public MetricChart {
 public:
  ConformalChart(std::shared_ptr<const MetricChart> base,
                 std::shared_ptr<const DeformationProfile> profile);
  void eval(const Vec& p, MetricJet& jet) const override;

  const MetricChart& base() const { return *base_; }
  const DeformationProfile& profile() const { return *profile_; }

 private:
  std::shared_ptr<const MetricChart> base_;
  std::shared_ptr<const DeformationProfile> profile_;
};

class G00Chart : public MetricChart {
 public:
  G00Chart(std::shared_ptr<const MetricChart> base,
           std::shared_ptr<const DeformationProfile> profile);
  void eval(const Vec& p, MetricJet& jet) const override;

  const MetricChart& base() const { return *base_; }
  const DeformationProfile& profile() const { return *profile_; }

 private:
  std::shared_ptr<const MetricChart> base_;
  std::shared_ptr<const DeformationProfile> profile_;
};

}  // namespace tubeflow
