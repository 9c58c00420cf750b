#include "prefcon/order.hpp"

#include <stdexcept>
#include <string>

namespace prefcon {

BinaryComparisonMatrix::BinaryComparisonMatrix(std::size_t n)
    : n_(n), cells_(n * n, Preference::kUnresolved) {
  if (n < 2) {
    throw std::invalid_argument("comparison matrix needs at least 2 options, got " +
                                std::to_string(n));
  }
}

Preference BinaryComparisonMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("comparison matrix index");
  return cells_[i * n_ + j];
}

void BinaryComparisonMatrix::set(std::size_t i, std::size_t j, Preference p) {
  if (i >= n_ || j >= n_) throw std::out_of_range("comparison matrix index");
  if (i == j && p != Preference::kUnresolved) {
    throw std::invalid_argument("diagonal of a comparison matrix is always unresolved");
  }
  cells_[i * n_ + j] = p;
}

BoolMatrix BoolMatrix::identity(std::size_t n) {
  BoolMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BoolMatrix BoolMatrix::operator*(const BoolMatrix& rhs) const {
  if (rhs.n_ != n_) throw std::invalid_argument("boolean product of mismatched sizes");
  BoolMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (!at(i, k)) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (rhs.at(k, j)) out.set(i, j, true);
      }
    }
  }
  return out;
}

BoolMatrix BoolMatrix::operator|(const BoolMatrix& rhs) const {
  if (rhs.n_ != n_) throw std::invalid_argument("boolean join of mismatched sizes");
  BoolMatrix out(n_);
  for (std::size_t k = 0; k < bits_.size(); ++k) out.bits_[k] = bits_[k] | rhs.bits_[k];
  return out;
}

BoolMatrix BoolMatrix::transposed() const {
  BoolMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) out.set(j, i, at(i, j));
  }
  return out;
}

bool BoolMatrix::contained_in(const BoolMatrix& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    if (bits_[k] && !other.bits_[k]) return false;
  }
  return true;
}

RelationMatrix::RelationMatrix(std::size_t n) : bits_(n) {}

void RelationMatrix::add_edge(std::size_t from, std::size_t to) {
  if (from >= size() || to >= size()) throw std::out_of_range("relation matrix index");
  if (from == to) throw std::invalid_argument("relation matrix must stay irreflexive");
  if (resolved(from, to)) {
    throw std::invalid_argument("pair {" + std::to_string(from) + "," + std::to_string(to) +
                                "} is already oriented");
  }
  bits_.set(from, to, true);
}

bool RelationMatrix::resolved(std::size_t i, std::size_t j) const {
  return bits_.at(i, j) || bits_.at(j, i);
}

std::size_t RelationMatrix::resolved_pair_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) count += resolved(i, j) ? 1 : 0;
  }
  return count;
}

std::vector<std::pair<std::size_t, std::size_t>> RelationMatrix::resolved_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (resolved(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

RelationMatrix RelationMatrix::transposed() const {
  RelationMatrix out(size());
  out.bits_ = bits_.transposed();
  return out;
}

AsymmetryReport asymmetry_score(const BinaryComparisonMatrix& m) {
  const std::size_t n = m.size();
  AsymmetryReport report;
  report.total_pairs = n * (n - 1) / 2;

  std::size_t consistent = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Preference forward = m.at(i, j);
      const Preference backward = m.at(j, i);
      if (forward == Preference::kUnresolved || backward == Preference::kUnresolved) continue;
      ++report.resolved_pairs;
      // Same winner from both positions means the two cells disagree in sign.
      if (forward != backward) ++consistent;
    }
  }
  if (report.resolved_pairs > 0) {
    report.score = static_cast<double>(consistent) / static_cast<double>(report.resolved_pairs);
  }
  return report;
}

RelationMatrix triangle_to_relation(const BinaryComparisonMatrix& m, Triangle triangle,
                                    Relation relation) {
  const std::size_t n = m.size();
  RelationMatrix succeeds(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // `first` is the option listed first in the query whose cell we read.
      const auto [first, second] =
          triangle == Triangle::kUpper ? std::pair{i, j} : std::pair{j, i};
      switch (m.at(first, second)) {
        case Preference::kFirst:
          succeeds.add_edge(first, second);
          break;
        case Preference::kSecond:
          succeeds.add_edge(second, first);
          break;
        case Preference::kUnresolved:
          break;
      }
    }
  }
  return relation == Relation::kSucceeds ? succeeds : succeeds.transposed();
}

BoolMatrix transitive_closure(const BoolMatrix& adjacency) {
  const std::size_t n = adjacency.size();
  BoolMatrix closure = BoolMatrix::identity(n);
  BoolMatrix power = BoolMatrix::identity(n);
  for (std::size_t k = 1; k < n; ++k) {
    power = power * adjacency;
    closure = closure | power;
  }
  return closure;
}

BoolMatrix transitive_closure(const RelationMatrix& r) { return transitive_closure(r.bits()); }

TransitivityReport transitivity_score(const RelationMatrix& r) {
  TransitivityReport report;
  report.closure = transitive_closure(r);
  for (const auto& [i, j] : r.resolved_pairs()) {
    ++report.resolved_pairs;
    if (report.closure.at(i, j) && report.closure.at(j, i)) ++report.pairs_on_cycles;
  }
  if (report.resolved_pairs > 0) {
    report.score = static_cast<double>(report.resolved_pairs - report.pairs_on_cycles) /
                   static_cast<double>(report.resolved_pairs);
  }
  return report;
}

}  // namespace prefcon
