#include "imlab/mode_set.hpp"

#include <cmath>

#include "imlab/errors.hpp"

namespace imlab {

int mode_radius(int cutoff) {
  int k = static_cast<int>(std::sqrt(static_cast<double>(cutoff)));
  while ((k + 1) * (k + 1) <= cutoff) ++k;
  while (k * k > cutoff) --k;
  return k;
}

int cutoff_for_radius(int dim, int radius) { return dim * radius * radius; }

std::shared_ptr<const ModeSet> ModeSet::torus(int dim, int cutoff) {
  if (dim < 1 || dim > 3) throw ShapeError("torus dimension must be 1, 2 or 3");
  if (cutoff < 1) throw TruncationError("eigenvalue cutoff must be >= 1");

  auto set = std::shared_ptr<ModeSet>(new ModeSet());
  set->dim_ = dim;
  set->cutoff_ = cutoff;
  set->radius_ = mode_radius(cutoff);
  const int r = set->radius_;
  const int side = 2 * r + 1;
  int table = 1;
  for (int a = 0; a < dim; ++a) table *= side;
  set->lookup_.assign(static_cast<std::size_t>(table), -1);

  Mode m{0, 0, 0};
  const int lo1 = -r, hi1 = r;
  const int lo2 = dim >= 2 ? -r : 0, hi2 = dim >= 2 ? r : 0;
  const int lo3 = dim >= 3 ? -r : 0, hi3 = dim >= 3 ? r : 0;
  for (m[0] = lo1; m[0] <= hi1; ++m[0]) {
    for (m[1] = lo2; m[1] <= hi2; ++m[1]) {
      for (m[2] = lo3; m[2] <= hi3; ++m[2]) {
        const int n2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        if (n2 == 0 || n2 > cutoff) continue;
        int flat = 0;
        for (int a = 0; a < dim; ++a) flat = flat * side + (m[a] + r);
        set->lookup_[static_cast<std::size_t>(flat)] = set->size();
        set->modes_.push_back(m);
      }
    }
  }
  set->negated_.resize(set->modes_.size());
  for (int i = 0; i < set->size(); ++i) {
    const Mode& p = set->modes_[static_cast<std::size_t>(i)];
    set->negated_[static_cast<std::size_t>(i)] = set->index_of({-p[0], -p[1], -p[2]});
  }
  return set;
}

std::shared_ptr<const ModeSet> ModeSet::shells(int count) {
  if (count < 1) throw TruncationError("shell count must be >= 1");
  auto set = std::shared_ptr<ModeSet>(new ModeSet());
  set->shell_ = true;
  set->dim_ = 1;
  set->cutoff_ = count;
  set->radius_ = count;
  for (int n = 1; n <= count; ++n) {
    set->modes_.push_back({n, 0, 0});
    set->negated_.push_back(n - 1);
  }
  return set;
}

int ModeSet::index_of(const Mode& m) const {
  if (shell_) {
    return (m[0] >= 1 && m[0] <= cutoff_ && m[1] == 0 && m[2] == 0) ? m[0] - 1 : -1;
  }
  const int side = 2 * radius_ + 1;
  int flat = 0;
  for (int a = 0; a < 3; ++a) {
    if (a >= dim_) {
      if (m[a] != 0) return -1;
      continue;
    }
    if (m[a] < -radius_ || m[a] > radius_) return -1;
    flat = flat * side + (m[a] + radius_);
  }
  return lookup_[static_cast<std::size_t>(flat)];
}

int ModeSet::norm_sq(int i) const {
  const Mode& m = mode(i);
  return m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
}

bool ModeSet::is_positive(int i) const {
  if (shell_) return true;
  const Mode& m = mode(i);
  for (int a = 0; a < 3; ++a) {
    if (m[a] != 0) return m[a] > 0;
  }
  return false;
}

}  // namespace imlab
