#include "sparsecp/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "sparsecp/error.hpp"

namespace sparsecp {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double parse_real(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(Errc::kParseError,
                at_line(line_no) + "cannot parse '" + std::string(field) + "' as a real");
  }
  return value;
}

std::size_t parse_label(std::string_view field, std::size_t line_no) {
  field = trim(field);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(Errc::kParseError,
                at_line(line_no) + "cannot parse '" + std::string(field) + "' as a label");
  }
  if (value < 0) {
    throw Error(Errc::kLabelOutOfRange, at_line(line_no) + "negative label");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

void LabeledLogitDataset::add(LogitVector logits, std::size_t label, std::size_t row) {
  if (logits.size() != num_classes) {
    throw Error(Errc::kInconsistentWidth, "instance has " + std::to_string(logits.size()) +
                                              " logits, dataset has " +
                                              std::to_string(num_classes) + " classes");
  }
  if (label >= num_classes) {
    throw Error(Errc::kLabelOutOfRange, "label " + std::to_string(label) + " outside 0.." +
                                            std::to_string(num_classes - 1));
  }
  instances.push_back({std::move(logits), label, row});
}

LabeledLogitDataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  // Skip a UTF-8 byte order mark and leading blank lines.
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  const auto header = split_fields(trim(line));
  if (header.empty() || trim(header[0]) != "label") {
    throw Error(Errc::kParseError, at_line(line_no) + "header must start with 'label'");
  }
  if (header.size() < 3) {
    throw Error(Errc::kParseError, at_line(line_no) + "header needs at least two logit columns");
  }

  LabeledLogitDataset data;
  data.num_classes = header.size() - 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (fields.size() != header.size()) {
      throw Error(Errc::kInconsistentWidth,
                  at_line(line_no) + "expected " + std::to_string(data.num_classes) +
                      " logits, found " + std::to_string(fields.size() - 1));
    }
    const std::size_t label = parse_label(fields[0], line_no);
    if (label >= data.num_classes) {
      throw Error(Errc::kLabelOutOfRange, at_line(line_no) + "label " + std::to_string(label) +
                                              " outside 0.." +
                                              std::to_string(data.num_classes - 1));
    }
    std::vector<double> logits(data.num_classes);
    for (std::size_t j = 0; j < data.num_classes; ++j) {
      logits[j] = parse_real(fields[j + 1], line_no);
    }
    try {
      data.add(LogitVector(std::move(logits)), label, data.size());
    } catch (const Error& e) {
      throw Error(Errc::kParseError, at_line(line_no) + e.what());
    }
  }
  return data;
}

LabeledLogitDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path);
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const LabeledLogitDataset& data) {
  out << "label";
  for (std::size_t j = 0; j < data.num_classes; ++j) out << ",z" << j;
  out << '\n';
  char buf[32];
  for (const auto& inst : data.instances) {
    out << inst.label;
    for (double v : inst.logits.values()) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace sparsecp
