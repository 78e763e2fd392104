#include "selftest.hpp"

#include <cmath>
#include <string>

#include "dape/mmd/mmd.hpp"
#include "dape/signalio/butterworth.hpp"
#include "dape/train/schedule.hpp"
#include "dape/version.hpp"

namespace dape::tools {

nlohmann::json run_selftest() {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok, double value) {
    checks.push_back({{"name", name}, {"passed", ok}, {"value", value}});
    all = all && ok;
  };

  Mat zp(2, 1), zq(2, 1);
  zp << 0.0, 0.0;
  zq << 1.0, 1.0;
  const double analytic = mmd::mmd2_unbiased(zp, zq, 1.0);
  record("mmd_analytic", std::abs(analytic - (2.0 - 2.0 * std::exp(-0.5))) <= 1e-9, analytic);

  const std::vector<double> u = {0.3, -1.2, 4.0};
  const double self = mmd::gaussian_kernel(u, u, 2.5);
  record("kernel_self", self == 1.0, self);

  Mat c = Mat::Constant(4, 3, 0.7);
  const double equal = mmd::mmd2_unbiased(c, c, 1.0);
  record("mmd_equal_batches", std::abs(equal) <= 1e-12, equal);

  const int epochs[] = {1, 4, 5, 6, 69, 70, 200};
  const double expected[] = {0.0, 0.0, 0.25, 0.5, 16.25, 16.25, 16.25};
  const train::KappaSchedule sched;
  for (int i = 0; i < 7; ++i) {
    const double k = train::kappa(epochs[i], sched);
    record("kappa_epoch_" + std::to_string(epochs[i]), k == expected[i], k);
  }
  record("dann_lambda_zero", train::dann_lambda(0.0) == 0.0, train::dann_lambda(0.0));

  const auto filt = signalio::design_butterworth_bandpass(4.0, 40.0, 4, 128.0);
  for (double f : {4.0, 40.0}) {
    const double g = filt.gain_db(f, 128.0);
    record("filter_edge_" + std::to_string(static_cast<int>(f)) + "hz", std::abs(g + 3.0) <= 0.5, g);
  }
  for (double f : {0.5, 64.0}) {
    const double g = filt.gain_db(f, 128.0);
    record("filter_stop_" + std::to_string(f).substr(0, 4) + "hz", g <= -20.0, g);
  }
  return {{"schema_version", kSchemaVersion}, {"passed", all}, {"checks", checks}};
}

}  // namespace dape::tools
