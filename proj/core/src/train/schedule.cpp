#include "dape/train/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "dape/error.hpp"

namespace dape::train {

void KappaSchedule::validate() const {
  if (start_epoch < 1) throw ConfigError("kappa schedule: start_epoch must be >= 1");
  if (!(rate > 0.0)) throw ConfigError("kappa schedule: rate must be > 0");
  if (!(cap > 0.0)) throw ConfigError("kappa schedule: cap must be > 0");
  const double steps = cap / rate;
  if (std::abs(steps - std::round(steps)) > 1e-9) {
    throw ConfigError("kappa schedule: cap must be an integral multiple of rate");
  }
}

double kappa(int epoch, const KappaSchedule& sched) {
  if (epoch < 1) throw ConfigError("kappa: epochs are counted from 1");
  const int ramp = std::max(0, epoch - (sched.start_epoch - 1));
  return std::min(sched.rate * ramp, sched.cap);
}

double dann_lambda(double progress) {
  return 2.0 / (1.0 + std::exp(-10.0 * progress)) - 1.0;
}

}  // namespace dape::train
