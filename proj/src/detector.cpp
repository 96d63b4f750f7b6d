// SPDX-License-Identifier: Apache-2.0

#include "stbc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stbc {

namespace {

ComplexMatrix expand_deleted_rows(const ComplexMatrix& H, const std::vector<int>& deleted, int full) {
  if (H.rows() + static_cast<Eigen::Index>(deleted.size()) != full) {
    throw ConfigError("channel has " + std::to_string(H.rows()) + " rows, expected " +
                      std::to_string(full - static_cast<int>(deleted.size())));
  }
  ComplexMatrix out = ComplexMatrix::Zero(full, H.cols());
  Eigen::Index src = 0;
  for (int r = 0; r < full; ++r) {
    if (std::find(deleted.begin(), deleted.end(), r) != deleted.end()) continue;
    out.row(r) = H.row(src++);
  }
  return out;
}

void check_spectrum(const RealVector& spectrum) {
  if (!(spectrum.minCoeff() >= kSingularFloor)) {
    throw DetectionFailure("equivalent channel is singular (smallest eigenvalue " +
                           std::to_string(spectrum.minCoeff()) + ")");
  }
}

RealMatrix diag_similarity(const RealMatrix& q, const RealVector& d) {
  return q.transpose() * d.asDiagonal() * q;
}

}  // namespace

Qstbc8Equivalent qstbc8_equivalent_channel(const ComplexVector& h) {
  if (h.size() != 8) throw ConfigError("qstbc8_equivalent_channel: h must have 8 entries");
  Qstbc8Equivalent eq;
  eq.H1 = block_circulant4(h.head(4));
  eq.H2 = block_circulant4(h.tail(4));
  eq.hbar.resize(8, 8);
  eq.hbar << eq.H1, eq.H2, eq.H2.conjugate(), -eq.H1.conjugate();
  const ComplexMatrix t = 2.0 * theta4().cast<cdouble>();
  eq.lambda1 = t * h.head(4);
  eq.lambda2 = t * h.tail(4);
  return eq;
}

SastEquivalent sast_equivalent_channel(const ComplexVector& h1, const ComplexVector& h2) {
  if (h1.size() != h2.size() || h1.size() == 0) {
    throw ConfigError("sast_equivalent_channel: halves must have equal nonzero length");
  }
  const Eigen::Index m = h1.size();
  SastEquivalent eq;
  eq.H1 = circulant(h1);
  eq.H2 = circulant(h2);
  eq.hbar.resize(2 * m, 2 * m);
  eq.hbar << eq.H1, eq.H2, eq.H2.adjoint(), -eq.H1.adjoint();
  eq.lambda1 = circulant_eigenvalues(h1);
  eq.lambda2 = circulant_eigenvalues(h2);
  return eq;
}

BlockDetector::BlockDetector(TransmissionScheme scheme, Constellation constellation,
                             SearchStrategy strategy)
    : scheme_(std::move(scheme)), constellation_(std::move(constellation)), strategy_(strategy) {
  for (const auto& layout : scheme_.groups()) {
    SearchSpace space = make_search_space(layout, constellation_);
    if (strategy_ == SearchStrategy::Exhaustive) {
      exhaustive_.emplace_back(std::move(space));
    } else {
      sphere_.emplace_back(std::move(space));
    }
  }
}

DetectionResult BlockDetector::detect(const ComplexMatrix& Y, const ComplexMatrix& H,
                                      double rho) const {
  const auto obs = front_end(Y, H, rho);
  const auto& groups = scheme_.groups();
  RealVector u = RealVector::Zero(2 * scheme_.data_symbols());
  DetectionResult out;
  for (size_t g = 0; g < groups.size(); ++g) {
    const SearchResult r = strategy_ == SearchStrategy::Exhaustive
                               ? exhaustive_[g].run(obs[g].generator, obs[g].z)
                               : sphere_[g].run(obs[g].generator, obs[g].z);
    for (size_t i = 0; i < groups[g].size(); ++i) u(groups[g][i].index()) = r.u(static_cast<Eigen::Index>(i));
    out.group_metrics.push_back(r.metric);
  }
  out.symbols = complex_view(u);
  out.labels.resize(static_cast<size_t>(out.symbols.size()));
  for (Eigen::Index k = 0; k < out.symbols.size(); ++k) {
    out.labels[static_cast<size_t>(k)] = constellation_.nearest(out.symbols(k));
  }
  return out;
}

Qstbc8Detector::Qstbc8Detector(TransmissionScheme scheme, Constellation constellation,
                               SearchStrategy strategy)
    : BlockDetector(std::move(scheme), std::move(constellation), strategy),
      precoder4_(theta4() * this->scheme().rotation()) {
  if (this->scheme().family() != SchemeFamily::Qstbc8) {
    throw ConfigError("Qstbc8Detector needs a 4Gp-QSTBC scheme");
  }
}

WhitenedBlock Qstbc8Detector::whiten(const ComplexMatrix& Y, const ComplexMatrix& H) const {
  if (Y.rows() != 8 || Y.cols() != H.cols()) throw ConfigError("Qstbc8Detector: Y must be 8 x N");
  const ComplexMatrix h8 = expand_deleted_rows(H, scheme().deleted_columns, 8);
  WhitenedBlock out;
  out.spectrum = RealVector::Zero(4);
  ComplexVector ybar1 = ComplexVector::Zero(4), ybar2 = ComplexVector::Zero(4);
  ComplexVector hp(8), yhat(8);
  for (Eigen::Index n = 0; n < H.cols(); ++n) {
    for (int i = 0; i < 8; ++i) hp(i) = h8(kQstbc8Permutation[i], n);
    for (int i = 0; i < 4; ++i) {
      yhat(i) = Y(kQstbc8Permutation[i], n);
      yhat(4 + i) = std::conj(Y(kQstbc8Permutation[4 + i], n));
    }
    const auto eq = qstbc8_equivalent_channel(hp);
    const ComplexVector v = eq.hbar.adjoint() * yhat;
    ybar1 += v.head(4);
    ybar2 += v.tail(4);
    out.spectrum += eq.lambda1.cwiseAbs2() + eq.lambda2.cwiseAbs2();
  }
  check_spectrum(out.spectrum);
  const RealMatrix theta = theta4();
  out.gram = diag_similarity(theta, out.spectrum).cast<cdouble>();
  const ComplexMatrix inv_sqrt =
      diag_similarity(theta, out.spectrum.cwiseSqrt().cwiseInverse()).cast<cdouble>();
  out.whitened = {inv_sqrt * ybar1, inv_sqrt * ybar2};
  return out;
}

std::vector<GroupObservation> Qstbc8Detector::front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                                        double rho) const {
  const WhitenedBlock wb = whiten(Y, H);
  const double gain = std::sqrt(rho) * scheme().scale();
  const RealMatrix b = gain * diag_similarity(theta4(), wb.spectrum.cwiseSqrt()) * precoder4_;
  const auto& w1 = wb.whitened[0];
  const auto& w2 = wb.whitened[1];
  return {{b, w1.real()}, {b, w2.real()}, {b, w1.imag()}, {b, w2.imag()}};
}

SastDetector::SastDetector(TransmissionScheme scheme, Constellation constellation,
                           SearchStrategy strategy)
    : BlockDetector(std::move(scheme), std::move(constellation), strategy) {
  const auto f = this->scheme().family();
  if (f != SchemeFamily::Sast4Group && f != SchemeFamily::Sast2Group) {
    throw ConfigError("SastDetector needs a SAST scheme");
  }
}

WhitenedBlock SastDetector::whiten(const ComplexMatrix& Y, const ComplexMatrix& H) const {
  const int M = scheme().M();
  const int mbar = M / 2;
  if (H.rows() != M || Y.rows() != M || Y.cols() != H.cols()) {
    throw ConfigError("SastDetector: Y must be M x N and H must be M x N");
  }
  WhitenedBlock out;
  out.spectrum = RealVector::Zero(mbar);
  ComplexVector ybar1 = ComplexVector::Zero(mbar), ybar2 = ComplexVector::Zero(mbar);
  ComplexVector yhat(M);
  for (Eigen::Index n = 0; n < H.cols(); ++n) {
    const ComplexVector y1 = Y.col(n).head(mbar);
    yhat.head(mbar) = pi_permute(y1);
    yhat.tail(mbar) = Y.col(n).tail(mbar).conjugate();
    const auto eq = sast_equivalent_channel(H.col(n).head(mbar), H.col(n).tail(mbar));
    const ComplexVector v = eq.hbar.adjoint() * yhat;
    ybar1 += v.head(mbar);
    ybar2 += v.tail(mbar);
    out.spectrum += eq.lambda1.cwiseAbs2() + eq.lambda2.cwiseAbs2();
  }
  check_spectrum(out.spectrum);
  const ComplexMatrix f = dft_matrix(mbar);
  out.gram = f.adjoint() * out.spectrum.cast<cdouble>().asDiagonal() * f;
  const ComplexVector inv = out.spectrum.cwiseSqrt().cwiseInverse().cast<cdouble>();
  out.whitened = {inv.asDiagonal() * (f * ybar1), inv.asDiagonal() * (f * ybar2)};
  return out;
}

std::vector<GroupObservation> SastDetector::front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                                      double rho) const {
  const WhitenedBlock wb = whiten(Y, H);
  const double gain = std::sqrt(rho) * scheme().scale();
  const RealMatrix a = gain * wb.spectrum.cwiseSqrt().asDiagonal() * scheme().rotation();
  const auto& r1 = wb.whitened[0];
  const auto& r2 = wb.whitened[1];
  if (scheme().family() == SchemeFamily::Sast4Group) {
    return {{a, r1.real()}, {a, r1.imag()}, {a, r2.real()}, {a, r2.imag()}};
  }
  const Eigen::Index m = a.rows();
  RealMatrix b = RealMatrix::Zero(2 * m, 2 * m);
  b.topLeftCorner(m, m) = a;
  b.bottomRightCorner(m, m) = a;
  RealVector z1(2 * m), z2(2 * m);
  z1 << r1.real(), r1.imag();
  z2 << r2.real(), r2.imag();
  return {{b, z1}, {b, z2}};
}

GroupMlDetector::GroupMlDetector(TransmissionScheme scheme, Constellation constellation,
                                 SearchStrategy strategy)
    : BlockDetector(std::move(scheme), std::move(constellation), strategy) {}

std::vector<GroupObservation> GroupMlDetector::front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                                         double rho) const {
  const RealMatrix g = real_model(scheme(), H, rho);
  const RealVector y = real_vec(Y);
  if (y.size() != g.rows()) throw ConfigError("GroupMlDetector: Y has the wrong shape");
  std::vector<GroupObservation> out;
  for (const auto& layout : scheme().groups()) {
    RealMatrix gg(g.rows(), static_cast<Eigen::Index>(layout.size()));
    for (size_t i = 0; i < layout.size(); ++i) gg.col(static_cast<Eigen::Index>(i)) = g.col(layout[i].index());
    const RealMatrix gram = gg.transpose() * gg;
    Eigen::LLT<RealMatrix> llt(gram);
    if (llt.info() != Eigen::Success) throw DetectionFailure("group Gram matrix is not positive definite");
    const RealMatrix l = llt.matrixL();
    if (l.diagonal().cwiseAbs2().minCoeff() < kSingularFloor) {
      throw DetectionFailure("group Gram matrix is singular");
    }
    GroupObservation o;
    o.generator = l.transpose();
    o.z = l.triangularView<Eigen::Lower>().solve(gg.transpose() * y);
    out.push_back(std::move(o));
  }
  return out;
}

std::unique_ptr<BlockDetector> make_detector(const TransmissionScheme& scheme,
                                             const Constellation& constellation,
                                             SearchStrategy strategy) {
  switch (scheme.family()) {
    case SchemeFamily::Qstbc8:
      return std::make_unique<Qstbc8Detector>(scheme, constellation, strategy);
    case SchemeFamily::Sast4Group:
    case SchemeFamily::Sast2Group:
      return std::make_unique<SastDetector>(scheme, constellation, strategy);
    case SchemeFamily::Generic:
      break;
  }
  return std::make_unique<GroupMlDetector>(scheme, constellation, strategy);
}

RealVector real_vec(const ComplexMatrix& Y) {
  RealVector out(2 * Y.size());
  Eigen::Index k = 0;
  for (Eigen::Index n = 0; n < Y.cols(); ++n) {
    for (Eigen::Index t = 0; t < Y.rows(); ++t) {
      out(k++) = Y(t, n).real();
      out(k++) = Y(t, n).imag();
    }
  }
  return out;
}

RealMatrix real_model(const TransmissionScheme& scheme, const ComplexMatrix& H, double rho) {
  if (H.rows() != scheme.M()) throw ConfigError("channel rows must equal the transmit antenna count");
  const auto& eff = scheme.effective().dispersion;
  const double gain = std::sqrt(rho) * scheme.scale();
  RealMatrix g(2 * scheme.T() * H.cols(), static_cast<Eigen::Index>(eff.size()));
  for (size_t j = 0; j < eff.size(); ++j) {
    g.col(static_cast<Eigen::Index>(j)) = real_vec(gain * (eff[j] * H));
  }
  return g;
}

double joint_metric(const TransmissionScheme& scheme, const ComplexMatrix& Y, const ComplexMatrix& H,
                    double rho, const ComplexVector& data) {
  return (Y - std::sqrt(rho) * scheme.encode(data) * H).squaredNorm();
}

DetectionResult joint_ml_oracle(const TransmissionScheme& scheme, const Constellation& constellation,
                                const ComplexMatrix& Y, const ComplexMatrix& H, double rho) {
  const int K = scheme.data_symbols();
  const int Q = constellation.size();
  if (K * constellation.bits_per_symbol() > 20) {
    throw ConfigError("joint_ml_oracle: more than 2^20 candidates");
  }
  const RealMatrix g = real_model(scheme, H, rho);
  const RealVector y = real_vec(Y);
  // contrib[k][q]: received contribution of symbol k taking point q.
  std::vector<std::vector<RealVector>> contrib(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    for (int q = 0; q < Q; ++q) {
      const cdouble p = constellation.point(q);
      contrib[static_cast<size_t>(k)].push_back(p.real() * g.col(2 * k) + p.imag() * g.col(2 * k + 1));
    }
  }
  std::vector<RealVector> residual(static_cast<size_t>(K) + 1, y);
  std::vector<int> label(static_cast<size_t>(K), 0), best_label(static_cast<size_t>(K), 0);
  double best = std::numeric_limits<double>::infinity();
  // Odometer over labels; residual[k+1] = residual[k] - contrib[k][label[k]].
  int depth = 0;
  label[0] = -1;
  while (depth >= 0) {
    auto& l = label[static_cast<size_t>(depth)];
    if (++l >= Q) {
      --depth;
      continue;
    }
    residual[static_cast<size_t>(depth) + 1] =
        residual[static_cast<size_t>(depth)] - contrib[static_cast<size_t>(depth)][static_cast<size_t>(l)];
    if (depth + 1 == K) {
      const double m = residual[static_cast<size_t>(K)].squaredNorm();
      if (m < best) {
        best = m;
        best_label = label;
      }
    } else {
      ++depth;
      label[static_cast<size_t>(depth)] = -1;
    }
  }
  DetectionResult out;
  out.labels = best_label;
  out.symbols.resize(K);
  for (int k = 0; k < K; ++k) out.symbols(k) = constellation.point(best_label[static_cast<size_t>(k)]);
  out.group_metrics = {best};
  return out;
}

}  // namespace stbc
