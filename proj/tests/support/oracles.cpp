// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace facetlens::oracles {

long double llr(std::uint64_t n11, std::uint64_t n12, std::uint64_t n21, std::uint64_t n22) {
  const long double n[2][2] = {{static_cast<long double>(n11), static_cast<long double>(n12)},
                               {static_cast<long double>(n21), static_cast<long double>(n22)}};
  const long double N = n[0][0] + n[0][1] + n[1][0] + n[1][1];
  long double g = 0.0L;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (n[i][j] == 0.0L) continue;
      const long double row = n[i][0] + n[i][1];
      const long double col = n[0][j] + n[1][j];
      g += n[i][j] * std::log(n[i][j] * N / (row * col));
    }
  }
  return 2.0L * g;
}

long double pmi(std::uint64_t n11, std::uint64_t n12, std::uint64_t n21, std::uint64_t n22) {
  const long double N = static_cast<long double>(n11 + n12 + n21 + n22);
  const long double row = static_cast<long double>(n11 + n12);
  const long double col = static_cast<long double>(n11 + n21);
  return std::log(static_cast<long double>(n11) * N / (row * col));
}

long double entropy(std::size_t pos, std::size_t neg) {
  const long double total = static_cast<long double>(pos + neg);
  long double h = 0.0L;
  for (std::size_t c : {pos, neg}) {
    if (c == 0) continue;
    const long double p = static_cast<long double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

long double informationGain(const std::string& word, const std::vector<std::string>& positives,
                            const std::vector<std::string>& negatives,
                            const std::map<std::string, std::set<std::string>>& presence) {
  struct Item {
    std::string id;
    bool positive;
  };
  std::vector<Item> all;
  for (const auto& p : positives) all.push_back({p, true});
  for (const auto& n : negatives) all.push_back({n, false});
  std::vector<Item> with;
  std::vector<Item> without;
  for (const auto& item : all) {
    const auto it = presence.find(item.id);
    const bool has = it != presence.end() && it->second.contains(word);
    (has ? with : without).push_back(item);
  }
  auto h = [](const std::vector<Item>& subset) {
    if (subset.empty()) return 0.0L;
    const auto pos = static_cast<std::size_t>(
        std::count_if(subset.begin(), subset.end(), [](const Item& i) { return i.positive; }));
    return entropy(pos, subset.size() - pos);
  };
  const long double n = static_cast<long double>(all.size());
  return h(all) - static_cast<long double>(with.size()) / n * h(with) -
         static_cast<long double>(without.size()) / n * h(without);
}

std::vector<std::string> minMargin(const supervised::LinearModel& model,
                                   const std::vector<std::string>& pool,
                                   const supervised::FeatureTable& features, std::size_t n) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& id : pool) {
    double m = model.bias;
    for (const auto& [i, v] : features.at(id).entries) m += model.weights[i] * v;
    all.emplace_back(std::fabs(m), id);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

double harmonic(double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

}  // namespace facetlens::oracles
