#pragma once

#include <cstdint>

#include <json.hpp>

#include "localmq/errors.hpp"
#include "localmq/random.hpp"

namespace localmq {

// Persistent label noise: zeta(x) = -1 with probability eta, fixed per point
// by a keyed PRF so repeated queries agree without any memo table.
class NoiseWrapper {
 public:
  NoiseWrapper(double eta, std::uint64_t seed, bool known_eta = true)
      : eta_(eta), seed_(seed), known_(known_eta), prf_(seed, 0x6e6f697365ULL) {
    if (!(eta >= 0.0 && eta < 0.5))
      throw ContractViolation("noise rate must lie in [0, 1/2)");
  }

  double eta() const { return eta_; }
  std::uint64_t seed() const { return seed_; }
  bool known_eta() const { return known_; }

  double zeta(std::uint32_t bits) const { return prf_.unit(bits) < eta_ ? -1.0 : 1.0; }
  double apply(std::uint32_t bits, double label) const { return label * zeta(bits); }

  nlohmann::json to_json() const {
    return {{"eta", eta_}, {"seed", seed_}, {"known_eta", known_}};
  }

 private:
  double eta_;
  std::uint64_t seed_;
  bool known_;
  KeyedPrf prf_;
};

}  // namespace localmq
