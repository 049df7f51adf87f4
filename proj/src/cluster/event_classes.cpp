#include "cluster/event_classes.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "common/error.hpp"

namespace aep::cluster {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ConfigError("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

EventClasses::EventClasses(std::vector<std::vector<double>> centers, double tau)
    : centers_(std::move(centers)), tau_(tau) {
  if (centers_.empty()) throw ConfigError("event classes: no centers");
  const std::size_t dim = centers_[0].size();
  for (const auto& c : centers_) {
    if (c.size() != dim) throw ConfigError("event classes: inconsistent center dims");
    for (double v : c)
      if (!std::isfinite(v)) throw ConfigError("event classes: non-finite center");
  }
}

int EventClasses::label(const std::vector<double>& phi, bool silent) const {
  if (silent) return silence_class();
  if (centers_.empty()) throw StateError("event classes: label before freeze");
  int best = 0;
  double best_d = squared_distance(phi, centers_[0]);
  for (std::size_t i = 1; i < centers_.size(); ++i) {
    const double d = squared_distance(phi, centers_[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void EventClasses::save(const std::string& path) const {
  nlohmann::json j;
  j["k_events"] = k_events();
  j["silence_class"] = silence_class();
  j["tau"] = tau_;
  j["centers"] = centers_;
  std::ofstream f(path);
  if (!f) throw IoError("event classes: cannot write " + path);
  f << j.dump(2) << "\n";
}

EventClasses EventClasses::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("event classes: cannot read " + path);
  nlohmann::json j;
  try {
    f >> j;
    EventClasses ec(j.at("centers").get<std::vector<std::vector<double>>>(),
                    j.at("tau").get<double>());
    if (j.at("k_events").get<int>() != ec.k_events())
      throw IoError("event classes: center count disagrees with k_events");
    return ec;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("event classes: bad file: ") + e.what());
  }
}

}  // namespace aep::cluster
