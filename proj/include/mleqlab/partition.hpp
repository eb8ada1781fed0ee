#ifndef MLEQLAB_PARTITION_HPP
#define MLEQLAB_PARTITION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mleq {

// Set partition of the contingency indices {0, ..., count-1}, stored as a
// restricted growth string: cell_of[0] = 0 and cell_of[i] <= max(prefix)+1.
// Cell ids therefore appear in first-occurrence order, which makes the
// representation canonical (two equal partitions compare equal element-wise).
struct Partition {
  std::vector<int> cell_of;
  int num_cells = 0;

  int count() const { return static_cast<int>(cell_of.size()); }
  int size() const { return num_cells; }

  static Partition finest(int count);
  static Partition coarsest(int count);
  static Partition from_cells(int count, const std::vector<std::vector<int>>& cells);

  std::vector<std::vector<int>> cells() const;
  std::string to_string() const;

  bool operator==(const Partition& other) const { return cell_of == other.cell_of; }
  bool operator<(const Partition& other) const { return cell_of < other.cell_of; }
};

// Rewrites an arbitrary cell labeling into canonical restricted-growth form.
Partition canonical_partition(const std::vector<int>& labels);

// Enumeration is the exhaustive oracle behind ML-optimality; Bell(12) is the
// enforced desk-scale ceiling (about 4.2M partitions).
inline constexpr int kMaxEnumeration = 12;

std::uint64_t bell_number(int count);

// Visits every partition of {0..count-1} exactly once, in lexicographic
// restricted-growth-string order. The visitor returns false to stop early.
void for_each_partition(int count, const std::function<bool(const Partition&)>& visit,
                        int max_count = kMaxEnumeration);

std::vector<Partition> all_partitions(int count, int max_count = kMaxEnumeration);

}  // namespace mleq

#endif
