#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "sparsecp/activations.hpp"

namespace sparsecp {

struct LabeledInstance {
  LogitVector logits;
  std::size_t label;
  // Position in the originating file or generator; survives shuffling so
  // callers can audit which rows ended up in which split.
  std::size_t row;
};

// Instances sharing one class count. May be empty (e.g. a header-only file);
// operations that need data report that themselves.
struct LabeledLogitDataset {
  std::size_t num_classes = 0;
  std::vector<LabeledInstance> instances;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }

  // Appends after checking width and label range.
  void add(LogitVector logits, std::size_t label, std::size_t row);
};

// CSV with header `label,z0,...,z{K-1}`. Errors carry the 1-based line number.
LabeledLogitDataset parse_dataset(std::istream& in);
LabeledLogitDataset load_dataset(const std::string& path);

void write_dataset(std::ostream& out, const LabeledLogitDataset& data);

}  // namespace sparsecp
