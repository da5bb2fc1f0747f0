#include "tubeflow/scan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tubeflow/bump.hpp"
#include "tubeflow/kernels.hpp"
#include "tubeflow/tensor.hpp"

namespace tubeflow {

CentralTable central_curvature_table(const MetricChart& chart, int t_samples) {
  int n = chart.dim();
  CentralTable out;
  out.t_samples = t_samples;
  out.values.assign(static_cast<std::size_t>(n - 1), 0.0);
  out.t_variation.assign(static_cast<std::size_t>(n - 1), 0.0);
  for (int i = 0; i < t_samples; ++i) {
    Vec p = zero_vec();
    p[0] = chart.period() * static_cast<double>(i) / t_samples;
    PointGeometry geo;
    analyze_point(chart, p, geo, true);
    Vec e0 = zero_vec();
    e0[0] = 1.0;
    for (int k = 1; k < n; ++k) {
      Vec ek = zero_vec();
      ek[k] = 1.0;
      double K = sectional(geo.curv, geo.jet.g, ek, e0, n);
      if (i == 0) {
        out.values[static_cast<std::size_t>(k - 1)] = K;
      } else {
        double dev = std::fabs(K - out.values[static_cast<std::size_t>(k - 1)]);
        out.t_variation[static_cast<std::size_t>(k - 1)] =
            std::max(out.t_variation[static_cast<std::size_t>(k - 1)], dev);
      }
    }
  }
  return out;
}

// --- Radial profile -----------------------------------------------------------

double p_profile_value(double eps, int order, double x) {
  BumpFamily fam(order, eps);
  return fam.f(x, 2) + x * fam.f(x, 1);
}

ProfileReport p_profile(double eps, int order, int grid) {
  if (grid < 5) {
    throw std::invalid_argument("p_profile: grid too small");
  }
  BumpFamily fam(order, eps);
  double e2 = eps * eps;
  double e4 = e2 * e2;
  auto p_at = [&](double x) { return fam.f(x, 2) + x * fam.f(x, 1); };
  // p'(x) = r'''(u)/eps^2 + eps^2 (r'(u) + u r''(u)), u = x / eps^2; critical
  // points are the roots of pc(u) = r'''(u) + eps^4 (r'(u) + u r''(u)).
  auto pc_at = [&](double u) {
    return fam.r(u, 3) + e4 * (fam.r(u, 1) + u * fam.r(u, 2));
  };

  ProfileReport rep;
  rep.second_derivative_at_zero = fam.r(0.0, 4) / e4 + 2.0 * fam.r(0.0, 2);

  double cell = 2.0 * e2 / (grid - 1);
  rep.max_value = -1e300;
  rep.min_value = 1e300;
  double second_best = -1e300;
  auto consider = [&](double x) {
    double v = p_at(x);
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.max_location = x;
    }
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.min_location = x;
    }
    if (std::fabs(x) >= cell && v > second_best) second_best = v;
    rep.bound = std::max(rep.bound, std::fabs(v));
  };
  for (int i = 0; i < grid; ++i) {
    consider(-e2 + cell * i);
  }
  // Critical points of p inside the support, by sign scan plus bisection.
  int cgrid = 4001;
  double prev_u = -1.0;
  double prev_v = pc_at(prev_u);
  for (int i = 1; i < cgrid; ++i) {
    double u = -1.0 + 2.0 * i / (cgrid - 1);
    double v = pc_at(u);
    if (prev_v == 0.0) {
      consider(prev_u * e2);
    } else if (v * prev_v < 0.0) {
      double lo = prev_u, hi = u;
      double flo = prev_v;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = pc_at(mid);
        if (fmid == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fmid < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fmid;
        }
      }
      consider(0.5 * (lo + hi) * e2);
    }
    prev_u = u;
    prev_v = v;
  }
  rep.max_attained_only_at_zero =
      rep.max_location == 0.0 && second_best < rep.max_value;
  return rep;
}

PlaneBasis gram_schmidt_plane(const MetricJet& jet, int s) {
  const Mat& g = jet.g;
  double gss = g[s][s];
  double g00 = g[0][0];
  double g0s = g[0][s];
  double det = g00 * gss - g0s * g0s;
  if (det <= 0.0 || gss <= 0.0) {
    throw std::runtime_error("gram_schmidt_plane: degenerate (0,s) block");
  }
  PlaneBasis out;
  out.a_squared = gss / det;
  out.a = std::sqrt(out.a_squared);
  out.b = -out.a * g0s / gss;
  out.first = zero_vec();
  out.first[s] = 1.0 / std::sqrt(gss);
  out.second = zero_vec();
  out.second[0] = out.a;
  out.second[s] = out.b;
  return out;
}

// --- Grid scan ----------------------------------------------------------------

namespace {

struct SliceAccum {
  double max_value = -1e300;
  double min_value = 1e300;
  Vec max_location = zero_vec();
  double max_location_t = 0.0;
  std::int64_t points = 0;
  std::int64_t planes = 0;
  std::vector<NearZero> near_zeros;
};

// Evaluates the coordinate planes and nb Haar-random planes at one point,
// feeding each sectional value to sink(K, coordinate_plane).
template <typename Sink>
void point_planes(const MetricChart& chart, const Vec& p, int nb, Rng& rng,
                  bool use_simd, Sink&& sink) {
  int n = chart.dim();
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  WedgeForms wf;
  build_wedge_forms(geo.curv, geo.jet.g, n, wf);
  for (int q = 0; q < wf.dim; ++q) {
    sink(wf.rq[q][q] / wf.gq[q][q], true);
  }
  if (nb <= 0) return;

  double rqf[kMaxWedge * kMaxWedge];
  double gqf[kMaxWedge * kMaxWedge];
  for (int a = 0; a < wf.dim; ++a) {
    for (int b = 0; b < wf.dim; ++b) {
      rqf[a * wf.dim + b] = wf.rq[a][b];
      gqf[a * wf.dim + b] = wf.gq[a][b];
    }
  }
  std::vector<double> w(static_cast<std::size_t>(nb) * wf.dim);
  for (int b = 0; b < nb; ++b) {
    Vec X = zero_vec(), Y = zero_vec();
    for (int c = 0; c < n; ++c) {
      X[c] = rng.gaussian();
      Y[c] = rng.gaussian();
    }
    wedge_components(wf, X, Y, w.data() + static_cast<std::size_t>(b) * wf.dim);
  }
  std::vector<double> nums(static_cast<std::size_t>(nb));
  std::vector<double> dens(static_cast<std::size_t>(nb));
  if (use_simd) {
    kernels::quadform_pair_batch(rqf, gqf, wf.dim, w.data(), nb, nums.data(),
                                 dens.data());
  } else {
    kernels::quadform_pair_batch_scalar(rqf, gqf, wf.dim, w.data(), nb,
                                        nums.data(), dens.data());
  }
  for (int b = 0; b < nb; ++b) {
    double den = dens[static_cast<std::size_t>(b)];
    if (den <= 1e-300) continue;
    sink(nums[static_cast<std::size_t>(b)] / den, false);
  }
}

}  // namespace

CurvatureReport scan_sectional(const MetricChart& chart, int s,
                               const ScanPlan& plan) {
  int n = chart.dim();
  int G = plan.grid_per_axis;
  if (G < 3 || G % 2 == 0) {
    throw std::invalid_argument("scan_sectional: grid_per_axis must be odd, >= 3");
  }
  if (s < 1 || s >= n) {
    throw std::invalid_argument("scan_sectional: bad deformed slot");
  }
  double half = plan.half_width > 0.0 ? plan.half_width : chart.tube_radius();
  double cell = 2.0 * half / (G - 1);
  int nslice = plan.t_samples * G;
  std::vector<SliceAccum> acc(static_cast<std::size_t>(nslice));

  parallel_for(static_cast<std::size_t>(nslice), plan.threads,
               [&](std::size_t item) {
                 SliceAccum& a = acc[item];
                 int ti = static_cast<int>(item) / G;
                 int i1 = static_cast<int>(item) % G;
                 double t = chart.period() * static_cast<double>(ti) /
                            plan.t_samples;
                 Vec p = zero_vec();
                 p[0] = t;
                 p[1] = -half + cell * i1;
                 for (int i2 = 0; i2 < G; ++i2) {
                   p[2] = -half + cell * i2;
                   for (int i3 = 0; i3 < G; ++i3) {
                     p[3] = -half + cell * i3;
                     std::size_t pidx =
                         (item * static_cast<std::size_t>(G) + i2) *
                             static_cast<std::size_t>(G) +
                         i3;
                     Rng rng(mix_seed(plan.seed, pidx));
                     ++a.points;
                     point_planes(chart, p, plan.random_planes, rng,
                                  plan.use_simd, [&](double K, bool coord) {
                                    ++a.planes;
                                    if (K > a.max_value) {
                                      a.max_value = K;
                                      a.max_location = p;
                                      a.max_location_t = t;
                                    }
                                    a.min_value = std::min(a.min_value, K);
                                    if (std::fabs(K) <= plan.zero_band) {
                                      NearZero nz;
                                      nz.t = t;
                                      nz.x = p;
                                      nz.x[0] = 0.0;
                                      nz.value = K;
                                      nz.coordinate_plane = coord;
                                      a.near_zeros.push_back(nz);
                                    }
                                  });
                   }
                 }
               });

  CurvatureReport rep;
  rep.max_value = -1e300;
  rep.min_value = 1e300;
  rep.cell = cell;
  for (const SliceAccum& a : acc) {
    if (a.max_value > rep.max_value) {
      rep.max_value = a.max_value;
      rep.max_location = a.max_location;
      rep.max_location_t = a.max_location_t;
    }
    rep.min_value = std::min(rep.min_value, a.min_value);
    rep.points += a.points;
    rep.planes += a.planes;
    rep.near_zeros.insert(rep.near_zeros.end(), a.near_zeros.begin(),
                          a.near_zeros.end());
  }
  rep.near_zeros_confined = true;
  for (const NearZero& nz : rep.near_zeros) {
    double cheb = 0.0;
    for (int c = 1; c < n; ++c) cheb = std::max(cheb, std::fabs(nz.x[c]));
    rep.max_near_zero_axis_distance =
        std::max(rep.max_near_zero_axis_distance, std::fabs(nz.x[s]));
    rep.max_near_zero_radial = std::max(rep.max_near_zero_radial, cheb);
    if (cheb > cell * (1.0 + 1e-9)) rep.near_zeros_confined = false;
  }
  return rep;
}

// --- Truncation floor ---------------------------------------------------------

namespace {

// Max deviation of sampled sectional values from the band [-1, -1/4],
// over the box |x_a| <= half: returns {near-axis deviation, overall}.
// Near-axis means within near_cells grid cells of the axis in every
// coordinate.
std::pair<double, double> band_deviation_scan(const MetricChart& chart,
                                              double half, int G,
                                              int t_samples, int random_planes,
                                              int near_cells,
                                              std::uint64_t seed, int threads) {
  double cell = 2.0 * half / (G - 1);
  int nslice = t_samples * G;
  std::vector<double> near_dev(static_cast<std::size_t>(nslice), 0.0);
  std::vector<double> all_dev(static_cast<std::size_t>(nslice), 0.0);
  auto band_dev = [](double K) {
    if (K > -0.25) return K + 0.25;
    if (K < -1.0) return -1.0 - K;
    return 0.0;
  };
  parallel_for(static_cast<std::size_t>(nslice), threads, [&](std::size_t item) {
    int ti = static_cast<int>(item) / G;
    int i1 = static_cast<int>(item) % G;
    Vec p = zero_vec();
    p[0] = chart.period() * static_cast<double>(ti) / t_samples;
    p[1] = -half + cell * i1;
    double near_box = near_cells * cell * (1.0 + 1e-9);
    for (int i2 = 0; i2 < G; ++i2) {
      p[2] = -half + cell * i2;
      for (int i3 = 0; i3 < G; ++i3) {
        p[3] = -half + cell * i3;
        bool near_axis = std::fabs(p[1]) <= near_box &&
                         std::fabs(p[2]) <= near_box &&
                         std::fabs(p[3]) <= near_box;
        std::size_t pidx =
            (item * static_cast<std::size_t>(G) + i2) * static_cast<std::size_t>(G) + i3;
        Rng rng(mix_seed(seed ^ 0xa5a5a5a5ull, pidx));
        point_planes(chart, p, random_planes, rng, true,
                     [&](double K, bool) {
                       double dv = band_dev(K);
                       all_dev[item] = std::max(all_dev[item], dv);
                       if (near_axis) {
                         near_dev[item] = std::max(near_dev[item], dv);
                       }
                     });
      }
    }
  });
  double nd = 0.0, ad = 0.0;
  for (int i = 0; i < nslice; ++i) {
    nd = std::max(nd, near_dev[static_cast<std::size_t>(i)]);
    ad = std::max(ad, all_dev[static_cast<std::size_t>(i)]);
  }
  return {nd, ad};
}

}  // namespace

TruncationReport measure_truncation(const ModelSpec& spec, double eps,
                                    int fine_grid, int coarse_grid,
                                    int t_samples, int random_planes,
                                    std::uint64_t seed, int threads) {
  QuadraticChart chart = fermi_chart(spec);
  TruncationReport rep;
  auto fine = band_deviation_scan(chart, eps, fine_grid, t_samples,
                                  random_planes, 2, seed, threads);
  auto coarse = band_deviation_scan(chart, eps, coarse_grid, t_samples,
                                    random_planes, 2, seed, threads);
  auto whole = band_deviation_scan(chart, 0.9 * spec.tube_radius, coarse_grid,
                                   t_samples, random_planes, 2, seed, threads);
  rep.near_axis_deviation = fine.first;
  rep.coarse_deviation = coarse.first;
  rep.whole_tube_deviation = whole.second;
  double cell_fine = 2.0 * eps / (fine_grid - 1);
  rep.scale_constant =
      rep.near_axis_deviation / ((2.0 * cell_fine) * (2.0 * cell_fine));
  return rep;
}

BoundScan scan_deformation_bound(const MetricChart& chart, int s, double eps,
                                 int coarse_grid, int fine_grid,
                                 int t_samples, int random_planes,
                                 std::uint64_t seed, int threads) {
  ScanPlan plan;
  plan.t_samples = t_samples;
  plan.random_planes = random_planes;
  plan.zero_band = 0.0;
  plan.half_width = eps;
  plan.seed = seed;
  plan.threads = threads;

  plan.grid_per_axis = coarse_grid;
  CurvatureReport coarse = scan_sectional(chart, s, plan);
  plan.grid_per_axis = fine_grid;
  CurvatureReport fine = scan_sectional(chart, s, plan);

  BoundScan out;
  out.max_value = std::max(coarse.max_value, fine.max_value);
  out.bound_constant = coarse.max_value / eps;
  out.refined_constant = fine.max_value / eps;
  return out;
}

}  // namespace tubeflow
