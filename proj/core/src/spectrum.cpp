#include "plim/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "plim/error.hpp"

namespace plim {

int SpectrumList::total_multiplicity() const {
  int total = 0;
  for (const auto& e : entries) total += e.multiplicity;
  return total;
}

std::vector<double> SpectrumList::expanded() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total_multiplicity()));
  for (const auto& e : entries) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.value);
  return out;
}

void SpectrumList::check() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].multiplicity < 1) throw Error(ErrorCode::invalid_graph, "multiplicity below 1");
    if (!std::isfinite(entries[i].value)) throw Error(ErrorCode::invalid_graph, "non-finite eigenvalue");
    if (i > 0 && !(entries[i].value > entries[i - 1].value))
      throw Error(ErrorCode::invalid_graph, "eigenvalues are not strictly increasing");
  }
}

namespace {

bool same_cluster(double prev, double next, double rel_tol, double abs_tol) {
  return next - prev <= rel_tol * std::max(std::abs(prev), std::abs(next)) + abs_tol;
}

SpectrumList cluster_impl(std::span<const double> sorted, const std::string* tags, double rel_tol, double abs_tol) {
  SpectrumList out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && same_cluster(sorted[j - 1], sorted[j], rel_tol, abs_tol)) ++j;
    double sum = 0.0;
    for (std::size_t k = i; k < j; ++k) sum += sorted[k];
    SpectrumEntry entry;
    entry.value = sum / static_cast<double>(j - i);
    entry.multiplicity = static_cast<int>(j - i);
    if (tags != nullptr) {
      std::map<std::string, int> counts;
      for (std::size_t k = i; k < j; ++k) ++counts[tags[k]];
      for (const auto& [tag, count] : counts) {
        if (!entry.tag.empty()) {
          entry.tag += '+';
          entry.source += ';';
        }
        entry.tag += tag;
        entry.source += tag + "=" + std::to_string(count);
      }
    }
    out.entries.push_back(std::move(entry));
    i = j;
  }
  out.truncation = sorted.empty() ? 0.0 : sorted.back();
  return out;
}

}  // namespace

SpectrumList cluster(std::span<const double> sorted, double rel_tol, double abs_tol) {
  return cluster_impl(sorted, nullptr, rel_tol, abs_tol);
}

SpectrumList cluster(std::span<const double> sorted, std::span<const std::string> tags, double rel_tol,
                     double abs_tol) {
  if (tags.size() != sorted.size()) throw Error(ErrorCode::dimension_mismatch, "one tag per eigenvalue");
  return cluster_impl(sorted, tags.data(), rel_tol, abs_tol);
}

int counting_function(const SpectrumList& s, double lambda) {
  if (lambda > s.truncation)
    throw Error(ErrorCode::beyond_truncation, "N(" + format_double(lambda) + ") requested beyond truncation " +
                                                  format_double(s.truncation));
  int n = 0;
  for (const auto& e : s.entries) {
    if (e.value > lambda) break;
    n += e.multiplicity;
  }
  return n;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

constexpr const char* kCsvHeader = "eigenvalue,multiplicity,tag,source";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": bad number '" + text + "'");
  return value;
}

}  // namespace

std::string to_csv(const SpectrumList& s) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& e : s.entries) {
    out += format_double(e.value);
    out += ',';
    out += std::to_string(e.multiplicity);
    out += ',';
    out += e.tag;
    out += ',';
    out += e.source;
    out += '\n';
  }
  return out;
}

SpectrumList spectrum_from_csv(const std::string& text, SpectrumOrigin origin, double truncation) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw Error(ErrorCode::parse_error, "missing spectrum CSV header");
  SpectrumList s;
  s.origin = std::move(origin);
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 4)
      throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": expected 4 fields");
    SpectrumEntry e;
    e.value = parse_number<double>(fields[0], number);
    e.multiplicity = parse_number<int>(fields[1], number);
    e.tag = fields[2];
    e.source = fields[3];
    s.entries.push_back(std::move(e));
  }
  try {
    s.check();
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  s.truncation = truncation > 0.0 ? truncation : (s.entries.empty() ? 0.0 : s.entries.back().value);
  return s;
}

nlohmann::json to_json(const SpectrumList& s) {
  nlohmann::json origin;
  if (s.origin.kind == SpectrumOrigin::Kind::numeric) {
    origin = {{"kind", "numeric"}, {"level", s.origin.level}, {"pitch", s.origin.pitch}};
  } else {
    origin = {{"kind", "analytic"}, {"formula", s.origin.formula}};
  }
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries)
    entries.push_back({{"value", e.value}, {"multiplicity", e.multiplicity}, {"tag", e.tag}, {"source", e.source}});
  return {{"origin", std::move(origin)}, {"truncation", s.truncation}, {"entries", std::move(entries)}};
}

SpectrumList spectrum_from_json(const nlohmann::json& j) {
  try {
    SpectrumList s;
    const auto& o = j.at("origin");
    if (o.at("kind").get<std::string>() == "numeric") {
      s.origin = SpectrumOrigin::numeric(o.at("level").get<int>(), o.at("pitch").get<double>());
    } else {
      s.origin = SpectrumOrigin::analytic(o.at("formula").get<std::string>());
    }
    s.truncation = j.at("truncation").get<double>();
    for (const auto& e : j.at("entries"))
      s.entries.push_back({e.at("value").get<double>(), e.at("multiplicity").get<int>(),
                           e.value("tag", std::string{}), e.value("source", std::string{})});
    s.check();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

}  // namespace plim
