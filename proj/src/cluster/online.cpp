#include "cluster/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "cluster/event_classes.hpp"
#include "common/error.hpp"

namespace aep::cluster {

OnlineClusterSet::OnlineClusterSet() : OnlineClusterSet(Options()) {}

OnlineClusterSet::OnlineClusterSet(Options opt)
    : opt_(opt), tau_(opt.initial_tau), calibrated_(opt.warmup_target <= 0) {
  if (opt.initial_tau <= 0.0) throw ConfigError("online clusters: initial tau must be > 0");
  if (opt.no_growth_window <= 0 || opt.step_budget <= 0)
    throw ConfigError("online clusters: bad saturation parameters");
}

void OnlineClusterSet::check_dim(const std::vector<double>& phi) const {
  for (double v : phi)
    if (!std::isfinite(v)) throw InputError("online clusters: non-finite feature");
  if (dim_ != 0 && phi.size() != dim_)
    throw ConfigError("online clusters: feature dimension changed");
}

double OnlineClusterSet::novelty_bonus(const std::vector<double>& phi) const {
  check_dim(phi);
  const auto& pool = calibrated_ ? centers_ : buffer_;
  if (pool.empty()) return tau_;
  double best = std::numeric_limits<double>::max();
  for (const auto& c : pool) best = std::min(best, squared_distance(phi, c));
  return std::sqrt(best);
}

void OnlineClusterSet::grow_or_assign(const std::vector<double>& phi, std::int64_t step) {
  if (centers_.empty()) {
    centers_.push_back(phi);
    counts_.push_back(1);
    last_growth_step_ = step;
    return;
  }
  std::size_t best = 0;
  double best_d = squared_distance(phi, centers_[0]);
  for (std::size_t i = 1; i < centers_.size(); ++i) {
    const double d = squared_distance(phi, centers_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (std::sqrt(best_d) > tau_) {
    centers_.push_back(phi);
    counts_.push_back(1);
    last_growth_step_ = step;
  } else {
    auto& c = centers_[best];
    const double n = static_cast<double>(++counts_[best]);
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += (phi[d] - c[d]) / n;
  }
}

void OnlineClusterSet::online_update(const std::vector<double>& phi, std::int64_t step,
                                     bool silent) {
  if (silent) return;
  check_dim(phi);
  if (dim_ == 0) dim_ = phi.size();
  if (!calibrated_) {
    buffer_.push_back(phi);
    if (static_cast<int>(buffer_.size()) >= opt_.warmup_target) finalize_warmup(step);
    return;
  }
  grow_or_assign(phi, step);
}

void OnlineClusterSet::finalize_warmup(std::int64_t step) {
  if (calibrated_) return;
  calibrated_ = true;
  if (buffer_.size() >= 2) {
    std::vector<double> pd;
    pd.reserve(buffer_.size() * (buffer_.size() - 1) / 2);
    for (std::size_t i = 0; i < buffer_.size(); ++i)
      for (std::size_t j = i + 1; j < buffer_.size(); ++j)
        pd.push_back(std::sqrt(squared_distance(buffer_[i], buffer_[j])));
    std::sort(pd.begin(), pd.end());
    const std::size_t n = pd.size();
    const double median = n % 2 ? pd[n / 2] : 0.5 * (pd[n / 2 - 1] + pd[n / 2]);
    const double tau = 0.5 * median;
    if (tau > 1e-12) tau_ = tau;  // degenerate all-identical warm-up keeps the default
  }
  for (const auto& phi : buffer_) grow_or_assign(phi, step);
  buffer_.clear();
  buffer_.shrink_to_fit();
}

bool OnlineClusterSet::saturated(std::int64_t step) const {
  if (step >= opt_.step_budget) return true;
  if (!calibrated_) return false;
  return step - last_growth_step_ > opt_.no_growth_window;
}

std::string OnlineClusterSet::serialize() const {
  nlohmann::json j;
  j["initial_tau"] = opt_.initial_tau;
  j["warmup_target"] = opt_.warmup_target;
  j["no_growth_window"] = opt_.no_growth_window;
  j["step_budget"] = opt_.step_budget;
  j["tau"] = tau_;
  j["calibrated"] = calibrated_;
  j["buffer"] = buffer_;
  j["centers"] = centers_;
  j["counts"] = counts_;
  j["last_growth_step"] = last_growth_step_;
  j["dim"] = dim_;
  return j.dump();
}

OnlineClusterSet OnlineClusterSet::deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cluster state parse failure: ") + e.what());
  }
  Options opt;
  OnlineClusterSet set(opt);
  try {
    set.opt_.initial_tau = j.at("initial_tau").get<double>();
    set.opt_.warmup_target = j.at("warmup_target").get<int>();
    set.opt_.no_growth_window = j.at("no_growth_window").get<int>();
    set.opt_.step_budget = j.at("step_budget").get<std::int64_t>();
    set.tau_ = j.at("tau").get<double>();
    set.calibrated_ = j.at("calibrated").get<bool>();
    set.buffer_ = j.at("buffer").get<std::vector<std::vector<double>>>();
    set.centers_ = j.at("centers").get<std::vector<std::vector<double>>>();
    set.counts_ = j.at("counts").get<std::vector<std::int64_t>>();
    set.last_growth_step_ = j.at("last_growth_step").get<std::int64_t>();
    set.dim_ = j.at("dim").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cluster state missing field: ") + e.what());
  }
  return set;
}

}  // namespace aep::cluster
