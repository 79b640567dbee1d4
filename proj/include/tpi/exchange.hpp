#pragma once

namespace tpi {

/// Exchange statistics of the particle pair.
enum class ExchangeSign : int { bosons = +1, fermions = -1 };

constexpr double eta(ExchangeSign s) {
  return static_cast<double>(static_cast<int>(s));
}

}  // namespace tpi
