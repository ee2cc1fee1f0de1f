#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qduet {

// Sampled observables on a strictly increasing time grid, one value row per
// time. Column k of every row corresponds to names[k].
struct TimeSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  std::size_t size() const { return times.size(); }

  std::size_t column(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return k;
    throw std::out_of_range("TimeSeries: no column named " + name);
  }

  double value(std::size_t i, const std::string& name) const {
    return rows.at(i).at(column(name));
  }
};

} // namespace qduet
