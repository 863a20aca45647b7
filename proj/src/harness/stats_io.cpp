#include <array>
#include <charconv>
#include <sstream>

#include "dkheap/harness.hpp"

namespace dkheap::harness {

namespace {

using Field = std::uint64_t StatsReport::*;
constexpr std::array<std::pair<std::string_view, Field>, 9> kFields{{
    {"n", &StatsReport::n},
    {"max_rank", &StatsReport::max_rank},
    {"phi_A", &StatsReport::phi_A},
    {"phi_L", &StatsReport::phi_L},
    {"comparisons", &StatsReport::comparisons},
    {"reductions_CA", &StatsReport::reductions_CA},
    {"reductions_CL", &StatsReport::reductions_CL},
    {"structural_mutations", &StatsReport::structural_mutations},
    {"registry_mutations", &StatsReport::registry_mutations},
}};

}  // namespace

std::string emit_stats(const StatsReport& report) {
  std::ostringstream out;
  for (const auto& [name, field] : kFields) out << name << '=' << report.*field << '\n';
  return out.str();
}

StatsReport parse_stats(std::string_view text) {
  StatsReport r;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("stats: missing '=' in '" + std::string(line) + "'");
    const std::string_view name = line.substr(0, eq);
    const std::string_view value = line.substr(eq + 1);
    bool known = false;
    for (const auto& [fname, field] : kFields) {
      if (fname != name) continue;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), r.*field);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw std::invalid_argument("stats: bad value for " + std::string(name));
      known = true;
    }
    if (!known) throw std::invalid_argument("stats: unknown counter " + std::string(name));
  }
  return r;
}

}  // namespace dkheap::harness
