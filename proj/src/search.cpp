// SPDX-License-Identifier: Apache-2.0

#include "stbc/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace stbc {

SearchStrategy search_strategy_by_name(const std::string& name) {
  if (name == "exhaustive") return SearchStrategy::Exhaustive;
  if (name == "sphere") return SearchStrategy::Sphere;
  throw ConfigError("unknown detector strategy '" + name + "' (use exhaustive or sphere)");
}

const char* to_string(SearchStrategy s) {
  return s == SearchStrategy::Exhaustive ? "exhaustive" : "sphere";
}

long SearchSpace::size() const {
  long n = 1;
  for (const auto& l : levels) n *= static_cast<long>(l.candidates.cols());
  return n;
}

RealVector SearchSpace::vector(long index, std::vector<int>* choices) const {
  RealVector u(dim);
  if (choices) choices->assign(levels.size(), 0);
  for (size_t k = levels.size(); k-- > 0;) {
    const auto& l = levels[k];
    const long n = static_cast<long>(l.candidates.cols());
    const int c = static_cast<int>(index % n);
    index /= n;
    for (size_t p = 0; p < l.positions.size(); ++p) {
      u(l.positions[p]) = l.candidates(static_cast<Eigen::Index>(p), c);
    }
    if (choices) (*choices)[k] = c;
  }
  return u;
}

RealMatrix SearchSpace::all() const {
  const long n = size();
  RealMatrix out(dim, n);
  for (long i = 0; i < n; ++i) out.col(i) = vector(i);
  return out;
}

SearchSpace make_search_space(const GroupLayout& layout, const Constellation& constellation) {
  SearchSpace space;
  space.dim = static_cast<int>(layout.size());
  for (int pos = 0; pos < space.dim; ++pos) {
    const Coordinate& c = layout[static_cast<size_t>(pos)];
    auto it = std::find_if(space.levels.begin(), space.levels.end(),
                           [&](const SearchLevel& l) { return l.symbol == c.symbol; });
    if (it == space.levels.end()) {
      SearchLevel l;
      l.symbol = c.symbol;
      l.imag = c.imag;
      l.positions.push_back(pos);
      space.levels.push_back(std::move(l));
    } else {
      if (it->full || it->imag == c.imag) throw ConfigError("group layout repeats a coordinate");
      // Keep positions in (real, imaginary) order.
      if (c.imag) {
        it->positions.push_back(pos);
      } else {
        it->positions.insert(it->positions.begin(), pos);
      }
      it->full = true;
    }
  }
  for (auto& l : space.levels) {
    if (l.full) {
      l.candidates.resize(2, constellation.size());
      for (int q = 0; q < constellation.size(); ++q) {
        l.candidates(0, q) = constellation.point(q).real();
        l.candidates(1, q) = constellation.point(q).imag();
      }
    } else {
      if (!constellation.is_cartesian()) {
        throw ConfigError("constellation " + constellation.name() +
                          " is not a product of real alphabets; it cannot be split into real and "
                          "imaginary groups");
      }
      const auto& lv = l.imag ? constellation.cartesian()->im_levels : constellation.cartesian()->re_levels;
      l.candidates.resize(1, static_cast<Eigen::Index>(lv.size()));
      for (size_t q = 0; q < lv.size(); ++q) l.candidates(0, static_cast<Eigen::Index>(q)) = lv[q];
    }
  }
  return space;
}

ExhaustiveSearch::ExhaustiveSearch(SearchSpace space) : space_(std::move(space)) {
  if (space_.size() > (1L << 22)) throw ConfigError("exhaustive search space too large");
  all_ = space_.all();
}

SearchResult ExhaustiveSearch::run(const RealMatrix& B, const RealVector& z) const {
  const RealMatrix r = (B * all_).colwise() - z;
  Eigen::Index best = 0;
  const double metric = r.colwise().squaredNorm().minCoeff(&best);
  SearchResult out;
  out.u = space_.vector(static_cast<long>(best), &out.choices);
  out.metric = metric;
  out.visited = static_cast<long>(all_.cols());
  return out;
}

SphereSearch::SphereSearch(SearchSpace space) : space_(std::move(space)) {
  for (const auto& l : space_.levels) order_.insert(order_.end(), l.positions.begin(), l.positions.end());
}

SearchResult SphereSearch::run(const RealMatrix& B, const RealVector& z) const {
  const int dim = space_.dim;
  if (B.cols() != dim || B.rows() < dim || z.size() != B.rows()) {
    throw ConfigError("sphere search: generator must be tall with one column per coordinate");
  }
  RealMatrix bp(B.rows(), dim);
  for (int i = 0; i < dim; ++i) bp.col(i) = B.col(order_[static_cast<size_t>(i)]);
  Eigen::HouseholderQR<RealMatrix> qr(bp);
  const RealMatrix r = qr.matrixQR().topRows(dim).triangularView<Eigen::Upper>();
  const RealVector qz = (qr.householderQ().transpose() * z).head(dim);
  const double base = std::max(0.0, z.squaredNorm() - qz.squaredNorm());

  const int nlev = static_cast<int>(space_.levels.size());
  std::vector<int> start(static_cast<size_t>(nlev) + 1, 0);
  for (int k = 0; k < nlev; ++k) {
    start[static_cast<size_t>(k) + 1] =
        start[static_cast<size_t>(k)] + static_cast<int>(space_.levels[static_cast<size_t>(k)].positions.size());
  }

  RealVector x = RealVector::Zero(dim);  // permuted coordinates
  std::vector<int> choice(static_cast<size_t>(nlev), 0);
  std::vector<int> best_choice(static_cast<size_t>(nlev), 0);
  double best = std::numeric_limits<double>::infinity();
  long visited = 0;

  struct Frame {
    std::vector<std::pair<double, int>> order;
    size_t next = 0;
    double partial = 0.0;
  };
  std::vector<Frame> frames(static_cast<size_t>(nlev));

  auto expand = [&](int k, double partial) {
    const auto& lev = space_.levels[static_cast<size_t>(k)];
    const int s = start[static_cast<size_t>(k)];
    const int w = start[static_cast<size_t>(k) + 1] - s;
    RealVector b = qz.segment(s, w);
    if (start[static_cast<size_t>(k) + 1] < dim) {
      const int e = start[static_cast<size_t>(k) + 1];
      b -= r.block(s, e, w, dim - e) * x.tail(dim - e);
    }
    const RealMatrix diff = (r.block(s, s, w, w) * lev.candidates).colwise() - b;
    const RealVector m = diff.colwise().squaredNorm().transpose();
    Frame& f = frames[static_cast<size_t>(k)];
    f.order.resize(static_cast<size_t>(m.size()));
    for (Eigen::Index c = 0; c < m.size(); ++c) f.order[static_cast<size_t>(c)] = {m(c), static_cast<int>(c)};
    std::sort(f.order.begin(), f.order.end());
    f.next = 0;
    f.partial = partial;
  };

  int k = nlev - 1;
  expand(k, 0.0);
  while (k < nlev) {
    Frame& f = frames[static_cast<size_t>(k)];
    if (f.next >= f.order.size() || f.partial + f.order[f.next].first >= best) {
      ++k;  // layer exhausted or pruned; candidates are sorted so the rest are worse
      continue;
    }
    const auto [m, c] = f.order[f.next++];
    ++visited;
    const auto& lev = space_.levels[static_cast<size_t>(k)];
    const int s = start[static_cast<size_t>(k)];
    x.segment(s, static_cast<Eigen::Index>(lev.positions.size())) = lev.candidates.col(c);
    choice[static_cast<size_t>(k)] = c;
    const double partial = f.partial + m;
    if (k == 0) {
      best = partial;
      best_choice = choice;
    } else {
      --k;
      expand(k, partial);
    }
  }

  SearchResult out;
  out.choices = best_choice;
  out.u.resize(dim);
  for (int lk = 0; lk < nlev; ++lk) {
    const auto& lev = space_.levels[static_cast<size_t>(lk)];
    for (size_t p = 0; p < lev.positions.size(); ++p) {
      out.u(lev.positions[p]) = lev.candidates(static_cast<Eigen::Index>(p), best_choice[static_cast<size_t>(lk)]);
    }
  }
  out.metric = best + base;
  out.visited = visited;
  return out;
}

}  // namespace stbc
