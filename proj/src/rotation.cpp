// SPDX-License-Identifier: Apache-2.0

#include "stbc/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include "stbc/channel.hpp"
#include "stbc/search.hpp"

namespace stbc {

namespace {

// Keeps one of each +-delta pair; product magnitudes are sign invariant.
RealMatrix half_set(const RealMatrix& d) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      if (d(r, c) > 0) {
        keep.push_back(c);
        break;
      }
      if (d(r, c) < 0) break;
    }
  }
  RealMatrix out(d.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = d.col(keep[i]);
  return out;
}

double min_product(const RealMatrix& r, const RealMatrix& d, Eigen::Index* arg = nullptr) {
  const RealMatrix b = (r * d).cwiseAbs();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    double p = 1.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i) p *= b(i, c);
    if (p < best) {
      best = p;
      if (arg) *arg = c;
    }
  }
  return best;
}

RealMatrix random_orthogonal(int m, RngStream& rng) {
  RealMatrix g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

RealMatrix apply_givens(RealMatrix q, const std::vector<std::pair<int, int>>& planes,
                        const std::vector<double>& theta) {
  for (size_t k = 0; k < planes.size(); ++k) {
    const auto [i, j] = planes[k];
    const double c = std::cos(theta[k]), s = std::sin(theta[k]);
    const RealVector ci = q.col(i), cj = q.col(j);
    q.col(i) = c * ci + s * cj;
    q.col(j) = -s * ci + c * cj;
  }
  return q;
}

RealMatrix nearest_orthogonal(const RealMatrix& a) {
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

RotationMatrix::RotationMatrix(RealMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw ConfigError("rotation must be square and nonempty");
  if (!is_orthogonal(m_, tol)) throw ConfigError("rotation is not orthogonal");
}

RotationMatrix RotationMatrix::identity(int m) { return RotationMatrix(RealMatrix::Identity(m, m)); }

DifferenceSet difference_set(const Constellation& constellation, const GroupLayout& layout) {
  const SearchSpace space = make_search_space(layout, constellation);
  if (space.size() > 4096) throw ConfigError("difference set: group alphabet too large");
  const double inv = 1.0 / constellation.scale();
  const RealMatrix all = inv * space.all();
  std::set<std::vector<long long>> seen;
  std::vector<RealVector> diffs;
  for (Eigen::Index a = 0; a < all.cols(); ++a) {
    for (Eigen::Index b = 0; b < all.cols(); ++b) {
      if (a == b) continue;
      const RealVector d = all.col(a) - all.col(b);
      std::vector<long long> key(static_cast<size_t>(d.size()));
      for (Eigen::Index i = 0; i < d.size(); ++i) key[static_cast<size_t>(i)] = std::llround(d(i) * 1e9);
      if (seen.insert(key).second) diffs.push_back(d);
    }
  }
  DifferenceSet out;
  out.dim = space.dim;
  out.scale = constellation.scale();
  out.unnormalized.resize(space.dim, static_cast<Eigen::Index>(diffs.size()));
  for (size_t i = 0; i < diffs.size(); ++i) out.unnormalized.col(static_cast<Eigen::Index>(i)) = diffs[i];
  return out;
}

GroupLayout default_layout(int m, const Constellation& constellation) {
  GroupLayout layout;
  if (constellation.is_cartesian()) {
    for (int i = 0; i < m; ++i) layout.push_back(Coordinate{i, false});
    return layout;
  }
  if (m % 2 != 0) {
    throw ConfigError("constellation " + constellation.name() + " needs an even rotation size");
  }
  for (int i = 0; i < m / 2; ++i) layout.push_back(Coordinate{i, false});
  for (int i = 0; i < m / 2; ++i) layout.push_back(Coordinate{i, true});
  return layout;
}

ProductDistance product_distance(const RealMatrix& effective, const DifferenceSet& diffs) {
  if (effective.cols() != diffs.dim) throw ConfigError("product_distance: dimension mismatch");
  const RealMatrix d = diffs.normalized();
  Eigen::Index arg = 0;
  ProductDistance out;
  out.dp_min = min_product(effective, d, &arg);
  out.delta = d.col(arg);
  return out;
}

RealMatrix combined_rotation_qstbc(const RealMatrix& R) { return theta4() * R; }

ComplexMatrix combined_rotation_sast(const RealMatrix& R) {
  return dft_matrix(static_cast<int>(R.rows())).adjoint() * R.cast<cdouble>();
}

OptimizedRotation optimize_rotation(const DifferenceSet& diffs, const OptimizerBudget& budget) {
  const int m = diffs.dim;
  if (m == 1) return {RotationMatrix::identity(1), diffs.normalized().cwiseAbs().minCoeff(), 1};
  const RealMatrix d = half_set(diffs.normalized());
  std::vector<std::pair<int, int>> planes;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) planes.emplace_back(i, j);
  }
  RealMatrix best_r = RealMatrix::Identity(m, m);
  double best = -1.0;
  long used = 0;
  auto evaluate = [&](const RealMatrix& r) {
    const double v = min_product(r, d);
    ++used;
    if (v > best) {
      best = v;
      best_r = r;
    }
    return v;
  };
  for (std::uint64_t restart = 0; used < budget.evaluations; ++restart) {
    RngStream rng(budget.seed, 0x0707, restart);
    const RealMatrix q = random_orthogonal(m, rng);
    const double record = best;
    std::vector<double> theta(planes.size(), 0.0);
    long end = used + budget.restart_length;
    bool extended = false;
    double cur = evaluate(q);
    double step = 0.25;
    while (used < budget.evaluations && step > 1e-9) {
      if (used >= end) {
        // A restart that beats every earlier one keeps refining for a while.
        if (extended || cur <= record) break;
        extended = true;
        end = used + 10 * budget.restart_length;
      }
      bool improved = false;
      for (size_t k = 0; k < planes.size() && used < end && used < budget.evaluations; ++k) {
        for (double sign : {1.0, -1.0}) {
          auto trial = theta;
          trial[k] += sign * step;
          const double v = evaluate(apply_givens(q, planes, trial));
          if (v > cur) {
            cur = v;
            theta = std::move(trial);
            improved = true;
            break;
          }
          if (used >= end || used >= budget.evaluations) break;
        }
      }
      if (!improved) step *= 0.5;
    }
  }
  RotationMatrix out(nearest_orthogonal(best_r));
  return {out, min_product(out.matrix(), d), used};
}

OptimizedRotation optimize_rotation(int m, const Constellation& constellation,
                                    const OptimizerBudget& budget) {
  return optimize_rotation(difference_set(constellation, default_layout(m, constellation)), budget);
}

RotationMatrix default_rotation(int m) {
  if (m < 1) throw ConfigError("rotation size must be positive");
  // Output of optimize_rotation on the 4QAM difference set (seed 7; budgets
  // 2e6, 1e7 and 2e7 evaluations for m = 2, 3, 4).
  RealMatrix r(m, m);
  switch (m) {
    case 1:
      return RotationMatrix::identity(1);
    case 2:
      r << 0.52573111211908374, 0.85065080835207063,
           0.85065080835207063, -0.52573111211908374;
      return RotationMatrix(r);
    case 3:
      r << 0.32798527766625507, 0.59100904856850855, -0.7369762290225762,
           0.7369762291578299, 0.32798527742242567, 0.59100904853516489,
           0.59100904839984969, -0.7369762291310904, -0.32798527772633795;
      return RotationMatrix(nearest_orthogonal(r));
    case 4:
      r << -0.36639236807447118, 0.22644269665356176, -0.7677001864623112, -0.47446471044196353,
           -0.31208216750732387, -0.50495957840130212, 0.42308149934044387, -0.68456014331872383,
           -0.7677001492100789, 0.47446477071737936, 0.36639224817646643, 0.22644289065263576,
           0.42308135653031836, 0.68456023158020718, 0.31208202302883242, -0.5049596676939162;
      return RotationMatrix(nearest_orthogonal(r));
    default:
      break;
  }
  static std::mutex mu;
  static std::map<int, RealMatrix> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) {
    const OptimizerBudget budget{200000, 7, 300};
    it = cache.emplace(m, optimize_rotation(m, make_qam(4), budget).rotation.matrix()).first;
  }
  return RotationMatrix(it->second);
}

RotationMatrix load_rotation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rotation file '" + path + "'");
  int m = 0;
  if (!(in >> m) || m < 1 || m > 64) throw ConfigError("rotation file '" + path + "': bad size line");
  RealMatrix r(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!(in >> r(i, j))) throw ConfigError("rotation file '" + path + "': too few entries");
    }
  }
  std::string extra;
  if (in >> extra) throw ConfigError("rotation file '" + path + "': trailing data");
  if (!is_orthogonal(r, 1e-9)) throw ConfigError("rotation file '" + path + "': matrix is not orthogonal");
  return RotationMatrix(nearest_orthogonal(r));
}

void save_rotation(const std::string& path, const RotationMatrix& rotation) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write rotation file '" + path + "'");
  const RealMatrix& r = rotation.matrix();
  out << r.rows() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) out << (j ? " " : "") << r(i, j);
    out << '\n';
  }
}

}  // namespace stbc
