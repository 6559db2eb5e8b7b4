#pragma once

#include <array>
#include <memory>
#include <vector>

namespace imlab {

/// Integer wave vector m on the torus (unused trailing components are 0), or
/// {n, 0, 0} for shell number n.
using Mode = std::array<int, 3>;

/// The retained index set of a Galerkin space.
///
/// Torus: every m != 0 in Z^d with |m|^2 <= cutoff, in lexicographic order.
/// The set is closed under m -> -m. Shells: n = 1..count.
class ModeSet {
 public:
  static std::shared_ptr<const ModeSet> torus(int dim, int cutoff);
  static std::shared_ptr<const ModeSet> shells(int count);

  bool is_shell() const { return shell_; }
  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int size() const { return static_cast<int>(modes_.size()); }
  /// Largest |m_i| over retained modes (torus) or the shell count.
  int max_component() const { return radius_; }

  const Mode& mode(int i) const { return modes_[static_cast<std::size_t>(i)]; }
  const std::vector<Mode>& modes() const { return modes_; }

  /// Index of m in the set, or -1.
  int index_of(const Mode& m) const;
  /// Index of -m (torus only; shells return i).
  int negated(int i) const { return negated_[static_cast<std::size_t>(i)]; }
  /// |m|^2 (torus) or n^2 (shell).
  int norm_sq(int i) const;
  /// True for the representative of each {m, -m} pair: first nonzero
  /// component positive.
  bool is_positive(int i) const;

  bool operator==(const ModeSet& other) const {
    return shell_ == other.shell_ && dim_ == other.dim_ && cutoff_ == other.cutoff_;
  }

 private:
  ModeSet() = default;

  bool shell_ = false;
  int dim_ = 0;
  int cutoff_ = 0;
  int radius_ = 0;
  std::vector<Mode> modes_;
  std::vector<int> negated_;
  std::vector<int> lookup_;  // dense (2R+1)^d table, -1 when absent
};

/// Per-axis radius K = floor(sqrt(cutoff)).
int mode_radius(int cutoff);

/// Smallest eigenvalue cutoff that retains the full cube |m_i| <= radius.
/// Used by the CLI's mode-radius convenience option.
int cutoff_for_radius(int dim, int radius);

}  // namespace imlab
