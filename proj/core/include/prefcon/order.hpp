#pragma once

// Order-theoretic metric kernel: pairwise comparison matrices, the relation
// matrices read off their triangles, transitive closure and the two scores
// computed from them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace prefcon {

/// Outcome of one ordered-pair query [i, j].
enum class Preference : std::int8_t {
  kSecond = -1,     ///< the oracle picked j
  kUnresolved = 0,  ///< the answer could not be parsed
  kFirst = 1,       ///< the oracle picked i
};

/// n x n grid of ordered-pair outcomes. Cell (i, j) holds the answer to the
/// query that listed option i first and option j second. The diagonal is
/// always unresolved.
class BinaryComparisonMatrix {
 public:
  explicit BinaryComparisonMatrix(std::size_t n);

  std::size_t size() const { return n_; }

  Preference at(std::size_t i, std::size_t j) const;
  /// Throws std::out_of_range on bad indices and std::invalid_argument on
  /// an attempt to resolve a diagonal cell.
  void set(std::size_t i, std::size_t j, Preference p);

  bool operator==(const BinaryComparisonMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<Preference> cells_;
};

/// Plain n x n boolean matrix. Used for boolean matrix powers and for the
/// reachability result of a closure (which carries the identity diagonal).
class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  static BoolMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  bool at(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { bits_[i * n_ + j] = v ? 1 : 0; }

  /// AND-OR product: (a * b)[i][j] = OR_k (a[i][k] AND b[k][j]).
  BoolMatrix operator*(const BoolMatrix& rhs) const;
  /// Element-wise OR.
  BoolMatrix operator|(const BoolMatrix& rhs) const;
  BoolMatrix transposed() const;
  /// True when every set bit of this matrix is also set in `other`.
  bool contained_in(const BoolMatrix& other) const;

  bool operator==(const BoolMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

enum class Triangle { kUpper, kLower };
enum class Relation { kSucceeds, kPrecedes };

/// An irreflexive, partially resolved tournament. Each unordered pair {i, j}
/// is either unresolved (no edge) or carries exactly one direction.
class RelationMatrix {
 public:
  explicit RelationMatrix(std::size_t n);

  std::size_t size() const { return bits_.size(); }
  bool at(std::size_t i, std::size_t j) const { return bits_.at(i, j); }
  const BoolMatrix& bits() const { return bits_; }

  /// Orients the pair {from, to} as from -> to. Throws std::invalid_argument
  /// for self-loops or a pair that is already oriented.
  void add_edge(std::size_t from, std::size_t to);

  bool resolved(std::size_t i, std::size_t j) const;
  std::size_t resolved_pair_count() const;
  std::vector<std::pair<std::size_t, std::size_t>> resolved_pairs() const;

  RelationMatrix transposed() const;

  bool operator==(const RelationMatrix&) const = default;

 private:
  BoolMatrix bits_;
};

struct AsymmetryReport {
  std::optional<double> score;  ///< empty when no pair resolved in both orders
  std::size_t resolved_pairs = 0;
  std::size_t total_pairs = 0;

  bool has_signal() const { return score.has_value(); }
};

struct TransitivityReport {
  std::optional<double> score;  ///< empty when the relation has no resolved pair
  std::size_t pairs_on_cycles = 0;
  std::size_t resolved_pairs = 0;
  BoolMatrix closure{0};

  bool has_signal() const { return score.has_value(); }
};

/// Fraction of unordered pairs, resolved in both presentation orders, whose
/// winner does not depend on which option was listed first.
AsymmetryReport asymmetry_score(const BinaryComparisonMatrix& m);

/// Reads one triangle of `m` as a relation. For the upper triangle, pair
/// i < j is oriented from cell (i, j): +1 gives i -> j, -1 gives j -> i. The
/// lower triangle reads cell (j, i) with the same meaning relative to the
/// option listed first. `kPrecedes` is the transpose of `kSucceeds`.
RelationMatrix triangle_to_relation(const BinaryComparisonMatrix& m, Triangle triangle,
                                    Relation relation);

/// Reachability with identity: R^0 | R^1 | ... | R^(n-1) under the AND-OR
/// product.
BoolMatrix transitive_closure(const RelationMatrix& r);
/// Same, for an arbitrary boolean relation (cycles and loops allowed).
BoolMatrix transitive_closure(const BoolMatrix& adjacency);

/// Fraction of resolved pairs whose endpoints do not share a directed cycle.
TransitivityReport transitivity_score(const RelationMatrix& r);

}  // namespace prefcon
