#pragma once

namespace dape::train {

// Alignment weight annealing: zero until `start_epoch`, then +rate per
// epoch, held at `cap` once reached.
struct KappaSchedule {
  int start_epoch = 5;
  double rate = 0.25;
  double cap = 16.25;

  // rate > 0, cap > 0, cap / rate integral, start_epoch >= 1.
  void validate() const;
};

// kappa(e) = min(rate * max(0, e - (start_epoch - 1)), cap), e >= 1.
double kappa(int epoch, const KappaSchedule& sched);

// Gradient-reversal weight 2 / (1 + exp(-10 p)) - 1 for training progress p in [0, 1].
double dann_lambda(double progress);

}  // namespace dape::train
