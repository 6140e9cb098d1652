#pragma once

#include "pol/certificate.hpp"

namespace pol::test {

inline Problem small_problem(std::size_t dim = 4, std::size_t n = 32, std::size_t batch = 8,
                             std::size_t epochs = 20, std::size_t per_stage = 2,
                             std::uint64_t seed = 7) {
  Hyper env;
  env.learning_rate = 0.05;
  env.batch_size = batch;
  env.epochs = epochs;
  env.epochs_per_stage = per_stage;
  return Problem{make_synthetic_dataset(Seed::from_u64(seed), dim, n), env,
                 Seed::from_u64(seed + 1000)};
}

}  // namespace pol::test
