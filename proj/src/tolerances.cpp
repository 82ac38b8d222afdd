#include "hmotion/tolerances.hpp"

#include <cmath>

#include "hmotion/error.hpp"

namespace hmotion {

namespace {

template <class Table>
auto* lookup(Table& table, std::string_view key) {
  using Ptr = decltype(&table.eq);
  struct Entry {
    std::string_view name;
    Ptr field;
  };
  const Entry entries[] = {
      {"eq", &table.eq},
      {"sep", &table.sep},
      {"det", &table.det},
      {"track", &table.track},
      {"boundary", &table.boundary},
      {"circle_radius", &table.circle_radius},
      {"holomorphy", &table.holomorphy},
      {"margin_min", &table.margin_min},
      {"tube", &table.tube},
      {"cover", &table.cover},
  };
  for (const auto& e : entries) {
    if (e.name == key) return e.field;
  }
  return Ptr{nullptr};
}

}  // namespace

void Tolerances::set(std::string_view key, double value) {
  auto* field = lookup(*this, key);
  if (field == nullptr) {
    throw Error(ErrorKind::InvalidArgument,
                "unknown tolerance key '" + std::string(key) + "'");
  }
  if (!std::isfinite(value) || value <= 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "tolerance '" + std::string(key) + "' must be positive");
  }
  *field = value;
}

double Tolerances::get(std::string_view key) const {
  const auto* field = lookup(*this, key);
  if (field == nullptr) {
    throw Error(ErrorKind::InvalidArgument,
                "unknown tolerance key '" + std::string(key) + "'");
  }
  return *field;
}

std::vector<std::pair<std::string, double>> Tolerances::entries() const {
  return {
      {"eq", eq},
      {"sep", sep},
      {"det", det},
      {"track", track},
      {"boundary", boundary},
      {"circle_radius", circle_radius},
      {"holomorphy", holomorphy},
      {"margin_min", margin_min},
      {"tube", tube},
      {"cover", cover},
  };
}

}  // namespace hmotion
