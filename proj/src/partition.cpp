#include "mleqlab/partition.hpp"

#include <algorithm>
#include <stdexcept>

#include "mleqlab/errors.hpp"

namespace mleq {

Partition Partition::finest(int count) {
  Partition p;
  p.cell_of.resize(count);
  for (int i = 0; i < count; ++i) p.cell_of[i] = i;
  p.num_cells = count;
  return p;
}

Partition Partition::coarsest(int count) {
  Partition p;
  p.cell_of.assign(count, 0);
  p.num_cells = count > 0 ? 1 : 0;
  return p;
}

Partition Partition::from_cells(int count, const std::vector<std::vector<int>>& cells) {
  std::vector<int> labels(count, -1);
  int next = 0;
  for (const auto& cell : cells) {
    if (cell.empty()) throw std::invalid_argument("partition cell must be non-empty");
    for (int member : cell) {
      if (member < 0 || member >= count) throw std::invalid_argument("cell member out of range");
      if (labels[member] != -1) throw std::invalid_argument("cells are not disjoint");
      labels[member] = next;
    }
    ++next;
  }
  for (int i = 0; i < count; ++i) {
    if (labels[i] == -1) throw std::invalid_argument("cells do not cover all contingencies");
  }
  return canonical_partition(labels);
}

std::vector<std::vector<int>> Partition::cells() const {
  std::vector<std::vector<int>> out(num_cells);
  for (int i = 0; i < count(); ++i) out[cell_of[i]].push_back(i);
  return out;
}

std::string Partition::to_string() const {
  std::string out;
  auto groups = cells();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    out += c == 0 ? "{" : " {";
    for (std::size_t i = 0; i < groups[c].size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(groups[c][i]);
    }
    out += "}";
  }
  return out;
}

Partition canonical_partition(const std::vector<int>& labels) {
  Partition p;
  p.cell_of.resize(labels.size());
  std::vector<int> remap;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int label = labels[i];
    int found = -1;
    for (std::size_t j = 0; j < remap.size(); ++j) {
      if (remap[j] == label) {
        found = static_cast<int>(j);
        break;
      }
    }
    if (found == -1) {
      found = static_cast<int>(remap.size());
      remap.push_back(label);
    }
    p.cell_of[i] = found;
  }
  p.num_cells = static_cast<int>(remap.size());
  return p;
}

std::uint64_t bell_number(int count) {
  if (count < 0) throw std::invalid_argument("negative count");
  if (count > 25) throw SizeError("Bell number overflows the supported range");
  // Bell triangle
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= count; ++i) {
    std::vector<std::uint64_t> next(i + 1);
    next[0] = row.back();
    for (int j = 1; j <= i; ++j) next[j] = next[j - 1] + row[j - 1];
    row = std::move(next);
  }
  return row[0];
}

void for_each_partition(int count, const std::function<bool(const Partition&)>& visit,
                        int max_count) {
  if (count < 1) throw std::invalid_argument("partition enumeration needs count >= 1");
  if (count > max_count) {
    throw SizeError("contingency count " + std::to_string(count) +
                    " exceeds the enumeration ceiling " + std::to_string(max_count));
  }
  Partition p;
  p.cell_of.assign(count, 0);
  p.num_cells = 1;
  std::vector<int> prefix_max(count, 0);  // max cell id among cell_of[0..i]
  while (true) {
    if (!visit(p)) return;
    // lexicographic successor of the restricted growth string
    int i = count - 1;
    while (i > 0 && p.cell_of[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) return;
    ++p.cell_of[i];
    prefix_max[i] = std::max(prefix_max[i - 1], p.cell_of[i]);
    for (int j = i + 1; j < count; ++j) {
      p.cell_of[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
    p.num_cells = prefix_max[count - 1] + 1;
  }
}

std::vector<Partition> all_partitions(int count, int max_count) {
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(bell_number(count)));
  for_each_partition(
      count,
      [&out](const Partition& p) {
        out.push_back(p);
        return true;
      },
      max_count);
  return out;
}

}  // namespace mleq
