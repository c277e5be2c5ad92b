#include "symstat/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "symstat/error.hpp"
#include "symstat/parallel.hpp"

namespace symstat {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::quadrature: return "quadrature";
    case Provenance::mc: return "mc";
  }
  return "unknown";
}

namespace {

const KernelTables& require_tables(const HoeffdingDecomposition& dec) {
  if (!dec.tables) throw Error(ErrorKind::unsupported_mode, "exact mode needs tabulated kernels");
  return *dec.tables;
}

void require_linear_part(double sigma2, double sigma_t2) {
  if (!(sigma2 > 1e-12 * std::max(sigma_t2, 0.0)) || !(sigma2 > 0.0))
    throw Error(ErrorKind::degenerate_linear_part, "E g^2 vanishes; the linear part is degenerate");
}

Provenance table_provenance(const HoeffdingDecomposition& dec) {
  return dec.source == TableSource::quadrature ? Provenance::quadrature : Provenance::exact;
}

CumulantSet exact_cumulants(const HoeffdingDecomposition& dec, const CumulantOptions& options) {
  const KernelTables& t = require_tables(dec);
  const Eigen::VectorXd& w = t.weights;
  const Eigen::ArrayXd g = t.g.array();
  const Eigen::MatrixXd& psi = t.psi;

  const double s2 = (w.array() * g.square()).sum();
  require_linear_part(s2, dec.variance);
  const double s = std::sqrt(s2);

  const Eigen::VectorXd wg = (w.array() * g).matrix();
  const Eigen::ArrayXd c = (psi * wg).array();  // E psi(x, X) g(X)
  const double eg3 = (w.array() * g.cube()).sum();
  const double eg4 = (w.array() * g.square().square()).sum();
  const double e_ggpsi = (wg.array() * c).sum();
  const double e_g2gpsi = (wg.array() * g * c).sum();
  const double e_ggpsipsi = (w.array() * c.square()).sum();
  double e_gggchi = 0.0;
  for (std::size_t i = 0; i < t.chi.size(); ++i) e_gggchi += wg[static_cast<Eigen::Index>(i)] * wg.dot(t.chi[i] * wg);

  CumulantSet out;
  out.provenance = table_provenance(dec);
  out.sigma2 = {s2, 0.0};
  out.beta3 = {(w.array() * g.abs().cube()).sum() / (s2 * s), 0.0};
  out.kappa3 = {(eg3 + 3.0 * e_ggpsi) / (s2 * s), 0.0};
  out.kappa4 = {(eg4 - 3.0 * s2 * s2 + 12.0 * e_g2gpsi + 12.0 * e_ggpsipsi + 4.0 * e_gggchi) / (s2 * s2), 0.0};
  for (double p : options.orders) {
    out.gamma[p] = {w.dot(psi.array().abs().pow(p).matrix() * w), 0.0};
    double z = 0.0;
    for (std::size_t i = 0; i < t.chi.size(); ++i)
      z += w[static_cast<Eigen::Index>(i)] * w.dot(t.chi[i].array().abs().pow(p).matrix() * w);
    out.zeta[p] = {z, 0.0};
  }
  return out;
}

// Term order for the MC sampler.
enum Term { kG2, kG3, kG4, kGGPsi, kG2GPsi, kGGPsiPsi, kGGGChi, kAbsG3, kFixedTerms };

CumulantSet mc_cumulants(const HoeffdingDecomposition& dec, const Distribution& dist, const ExpectMode& mode,
                         const CumulantOptions& options) {
  if (mode.reps < 2) throw Error(ErrorKind::invalid_argument, "Monte Carlo mode needs reps >= 2");
  const std::size_t orders = options.orders.size();
  const auto K = static_cast<Eigen::Index>(kFixedTerms + 2 * orders);
  const std::size_t blocks = block_count(mode.reps);
  std::vector<Eigen::VectorXd> s1(blocks);
  std::vector<Eigen::MatrixXd> s2(blocks);

  for_each_block(blocks, options.workers, [&](std::size_t block) {
    Rng rng = make_stream(mode.seed, block);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(K);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd v(K);
    double x[3];
    for (std::size_t r = 0; r < block_length(mode.reps, block); ++r) {
      dist.draw(rng, x);
      const double g1 = dec.g(x[0]), g2 = dec.g(x[1]), g3 = dec.g(x[2]);
      const double p12 = dec.psi(x[0], x[1]), p13 = dec.psi(x[0], x[2]), p23 = dec.psi(x[1], x[2]);
      const double chi = dec.chi(x[0], x[1], x[2]);
      v[kG2] = g1 * g1;
      v[kG3] = g1 * g1 * g1;
      v[kG4] = v[kG2] * v[kG2];
      v[kGGPsi] = g1 * g2 * p12;
      v[kG2GPsi] = g1 * g1 * g2 * p12;
      v[kGGPsiPsi] = g1 * g2 * p13 * p23;
      v[kGGGChi] = g1 * g2 * g3 * chi;
      v[kAbsG3] = std::abs(v[kG3]);
      for (std::size_t o = 0; o < orders; ++o) {
        v[static_cast<Eigen::Index>(kFixedTerms + o)] = std::pow(std::abs(p12), options.orders[o]);
        v[static_cast<Eigen::Index>(kFixedTerms + orders + o)] = std::pow(std::abs(chi), options.orders[o]);
      }
      sum += v;
      sq.selfadjointView<Eigen::Lower>().rankUpdate(v);
    }
    s1[block] = sum;
    s2[block] = sq.selfadjointView<Eigen::Lower>();
  });

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(K);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t b = 0; b < blocks; ++b) {
    sum += s1[b];
    sq += s2[b];
  }
  const double n = static_cast<double>(mode.reps);
  const Eigen::VectorXd m = sum / n;
  const Eigen::MatrixXd cov = (sq / n - m * m.transpose()) * (n / (n - 1.0));
  auto se = [&](const Eigen::VectorXd& grad) { return std::sqrt(std::max(0.0, grad.dot(cov * grad)) / n); };

  const double s2v = m[kG2];
  require_linear_part(s2v, dec.variance);
  const double sd = std::sqrt(s2v);

  CumulantSet out;
  out.provenance = Provenance::mc;
  out.reps = mode.reps;
  out.seed = mode.seed;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(K);

  grad[kG2] = 1.0;
  out.sigma2 = {s2v, se(grad)};

  grad.setZero();
  const double b3 = m[kAbsG3] / (s2v * sd);
  grad[kAbsG3] = 1.0 / (s2v * sd);
  grad[kG2] = -1.5 * b3 / s2v;
  out.beta3 = {b3, se(grad)};

  grad.setZero();
  const double k3 = (m[kG3] + 3.0 * m[kGGPsi]) / (s2v * sd);
  grad[kG3] = 1.0 / (s2v * sd);
  grad[kGGPsi] = 3.0 / (s2v * sd);
  grad[kG2] = -1.5 * k3 / s2v;
  out.kappa3 = {k3, se(grad)};

  grad.setZero();
  const double num4 = m[kG4] + 12.0 * m[kG2GPsi] + 12.0 * m[kGGPsiPsi] + 4.0 * m[kGGGChi];
  grad[kG4] = 1.0 / (s2v * s2v);
  grad[kG2GPsi] = 12.0 / (s2v * s2v);
  grad[kGGPsiPsi] = 12.0 / (s2v * s2v);
  grad[kGGGChi] = 4.0 / (s2v * s2v);
  grad[kG2] = -2.0 * num4 / (s2v * s2v * s2v);
  out.kappa4 = {num4 / (s2v * s2v) - 3.0, se(grad)};

  for (std::size_t o = 0; o < orders; ++o) {
    const auto gi = static_cast<Eigen::Index>(kFixedTerms + o);
    const auto zi = static_cast<Eigen::Index>(kFixedTerms + orders + o);
    out.gamma[options.orders[o]] = {m[gi], std::sqrt(std::max(0.0, cov(gi, gi)) / n)};
    out.zeta[options.orders[o]] = {m[zi], std::sqrt(std::max(0.0, cov(zi, zi)) / n)};
  }
  return out;
}

double interpolate(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x) {
  const Eigen::Index n = xs.size();
  if (n == 1) return ys[0];
  const double* begin = xs.data();
  Eigen::Index hi = std::upper_bound(begin, begin + n, x) - begin;
  hi = std::clamp<Eigen::Index>(hi, 1, n - 1);
  const Eigen::Index lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

}  // namespace

CumulantSet cumulants(const HoeffdingDecomposition& dec, const Distribution& dist, const ExpectMode& mode,
                      const CumulantOptions& options) {
  return mode.is_exact() ? exact_cumulants(dec, options) : mc_cumulants(dec, dist, mode, options);
}

double ReducibilityReport::b(double x) const { return interpolate(b_points, b_values, x); }

ReducibilityReport reducibility(const HoeffdingDecomposition& dec, const Distribution& dist, const ExpectMode& mode,
                                double tol, int workers) {
  const KernelTables& t = require_tables(dec);
  const Eigen::VectorXd& w = t.weights;
  const Eigen::VectorXd wg = w.cwiseProduct(t.g);

  ReducibilityReport out;
  out.sigma_t2 = dec.variance;
  out.sigma2 = w.dot(t.g.cwiseProduct(t.g));
  require_linear_part(out.sigma2, dec.variance);
  const Eigen::VectorXd c = t.psi * wg;
  out.kappa = wg.dot(c);
  const double s2 = out.sigma2;
  const double shift = out.kappa / (2.0 * s2 * s2);

  if (mode.is_exact()) {
    const Eigen::VectorXd b = c / s2 - shift * t.g;
    out.residual = t.psi - b * t.g.transpose() - t.g * b.transpose();
    out.delta3_sq = {w.dot(out.residual.cwiseProduct(out.residual) * w), 0.0};
    out.tolerance = tol;
    out.reducible = out.delta3_sq.value < tol * dec.variance;
    out.provenance = table_provenance(dec);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(t.points.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return t.points[i] < t.points[j]; });
    out.b_points.resize(t.points.size());
    out.b_values.resize(t.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      out.b_points[static_cast<Eigen::Index>(i)] = t.points[order[i]];
      out.b_values[static_cast<Eigen::Index>(i)] = b[order[i]];
    }
    return out;
  }

  if (mode.reps < 2) throw Error(ErrorKind::invalid_argument, "Monte Carlo mode needs reps >= 2");
  // Grid for b: the support itself, or an even grid over the bulk of a continuous law.
  Eigen::VectorXd grid;
  switch (dist.law()) {
    case Law::finite:
    case Law::rademacher: {
      grid = dist.quadrature_measure().points();
      std::sort(grid.data(), grid.data() + grid.size());
      break;
    }
    case Law::normal: {
      const auto [mu, sd] = dist.parameters();
      grid = Eigen::VectorXd::LinSpaced(kProjectionGrid, mu - 8.0 * sd, mu + 8.0 * sd);
      break;
    }
    case Law::uniform: {
      const auto [lo, hi] = dist.parameters();
      grid = Eigen::VectorXd::LinSpaced(kProjectionGrid, lo, hi);
      break;
    }
  }
  out.b_points = grid;
  out.b_values.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double cx = 0.0;
    for (Eigen::Index j = 0; j < t.points.size(); ++j) cx += wg[j] * dec.psi(grid[i], t.points[j]);
    out.b_values[i] = cx / s2 - shift * dec.g(grid[i]);
  }

  const std::size_t blocks = block_count(mode.reps);
  std::vector<std::pair<double, double>> partial(blocks);
  for_each_block(blocks, workers, [&](std::size_t block) {
    Rng rng = make_stream(mode.seed, block);
    double sum = 0.0, sq = 0.0;
    double x[2];
    for (std::size_t r = 0; r < block_length(mode.reps, block); ++r) {
      dist.draw(rng, x);
      const double res = dec.psi(x[0], x[1]) - out.b(x[0]) * dec.g(x[1]) - out.b(x[1]) * dec.g(x[0]);
      sum += res * res;
      sq += res * res * res * res;
    }
    partial[block] = {sum, sq};
  });
  double sum = 0.0, sq = 0.0;
  for (const auto& [a, b] : partial) {
    sum += a;
    sq += b;
  }
  const double n = static_cast<double>(mode.reps);
  const double mean = sum / n;
  const double var = std::max(0.0, (sq / n - mean * mean) * n / (n - 1.0));
  out.delta3_sq = {mean, std::sqrt(var / n)};
  out.tolerance = 3.0 * out.delta3_sq.std_error;
  out.reducible = out.delta3_sq.value < out.tolerance || out.delta3_sq.value == 0.0;
  out.provenance = Provenance::mc;
  return out;
}

}  // namespace symstat
