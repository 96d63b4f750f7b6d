// SPDX-License-Identifier: Apache-2.0
//
// Minimum-distance search over the candidate set of one detection group:
// find u minimizing ||z - B u||^2 where each block of u's coordinates belongs
// to a finite alphabet.

#pragma once

#include <vector>

#include "stbc/constellation.hpp"
#include "stbc/scheme.hpp"

namespace stbc {

enum class SearchStrategy { Exhaustive, Sphere };

SearchStrategy search_strategy_by_name(const std::string& name);
const char* to_string(SearchStrategy s);

/// Coordinates of one data symbol inside a group and its finite alphabet.
struct SearchLevel {
  int symbol = 0;
  std::vector<int> positions;  // 1 or 2 positions of the group vector
  bool full = false;           // both real and imaginary parts in this group
  bool imag = false;           // which part, when not full
  RealMatrix candidates;       // positions.size() x n
};

struct SearchSpace {
  int dim = 0;
  std::vector<SearchLevel> levels;

  /// Number of candidate vectors (product of level alphabet sizes).
  long size() const;
  /// Candidate vector for a mixed-radix index (last level varies fastest).
  RealVector vector(long index, std::vector<int>* choices = nullptr) const;
  /// All candidate vectors as columns, in index order.
  RealMatrix all() const;
};

/// Splits a group layout into per-symbol levels. A symbol whose real and
/// imaginary parts sit in different groups needs a Cartesian constellation;
/// otherwise ConfigError is thrown.
SearchSpace make_search_space(const GroupLayout& layout, const Constellation& constellation);

struct SearchResult {
  RealVector u;
  std::vector<int> choices;  // candidate index per level
  double metric = 0.0;       // ||z - B u||^2
  long visited = 0;
};

/// Evaluates every candidate; ties resolve to the lowest index.
class ExhaustiveSearch {
 public:
  explicit ExhaustiveSearch(SearchSpace space);
  SearchResult run(const RealMatrix& B, const RealVector& z) const;
  const SearchSpace& space() const { return space_; }

 private:
  SearchSpace space_;
  RealMatrix all_;
};

/// Depth-first Schnorr-Euchner enumeration on the QR factor of B, with the
/// levels as tree layers. The radius starts unbounded and shrinks to the best
/// leaf, so the result is always the exact minimizer.
class SphereSearch {
 public:
  explicit SphereSearch(SearchSpace space);
  SearchResult run(const RealMatrix& B, const RealVector& z) const;
  const SearchSpace& space() const { return space_; }

 private:
  SearchSpace space_;
  std::vector<int> order_;  // group positions, level by level
};

}  // namespace stbc
