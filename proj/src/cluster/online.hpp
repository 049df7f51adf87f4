#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aep::cluster {

// Phase-1 online novelty clustering. The growth threshold tau is calibrated
// from the first `warmup_target` non-silent clips (half the median pairwise
// distance); during that warm-up the buffered clips themselves serve as
// centers for novelty queries. After calibration the buffer is replayed
// through the growth rule: a clip farther than tau from every center becomes
// a new center, otherwise the nearest center takes a running-mean step.
class OnlineClusterSet {
 public:
  struct Options {
    double initial_tau = 1.0;   // bonus for the very first clip; replaced at calibration
    int warmup_target = 200;
    int no_growth_window = 2000;    // steps without growth that count as saturated
    std::int64_t step_budget = 10000;  // phase-1 hard cap in agent steps
  };

  OnlineClusterSet();  // default options
  explicit OnlineClusterSet(Options opt);

  // min_i ||phi - c_i||; over the warm-up buffer while calibrating; tau when
  // nothing has been heard yet.
  double novelty_bonus(const std::vector<double>& phi) const;

  // Silent clips are ignored. `step` is the global agent step, used for
  // growth bookkeeping.
  void online_update(const std::vector<double>& phi, std::int64_t step, bool silent = false);

  // True iff the step budget is exhausted, or calibration is done and no
  // center was created in more than `no_growth_window` steps.
  bool saturated(std::int64_t step) const;

  // Calibrates tau and replays the buffer; idempotent. Called automatically
  // when the buffer fills, and by the trainer if the budget ends early.
  void finalize_warmup(std::int64_t step);

  bool in_warmup() const { return !calibrated_; }
  double tau() const { return tau_; }
  int k() const { return static_cast<int>(centers_.size()); }
  std::int64_t last_growth_step() const { return last_growth_step_; }
  const std::vector<std::vector<double>>& centers() const { return centers_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const Options& options() const { return opt_; }

  // JSON snapshot of the complete state (options, centers, counts and any
  // warm-up buffer) so checkpoints can resume clustering mid-run.
  std::string serialize() const;
  static OnlineClusterSet deserialize(const std::string& text);

 private:
  void grow_or_assign(const std::vector<double>& phi, std::int64_t step);
  void check_dim(const std::vector<double>& phi) const;

  Options opt_;
  double tau_;
  bool calibrated_;
  std::vector<std::vector<double>> buffer_;
  std::vector<std::vector<double>> centers_;
  std::vector<std::int64_t> counts_;
  std::int64_t last_growth_step_ = 0;
  std::size_t dim_ = 0;
};

}  // namespace aep::cluster
