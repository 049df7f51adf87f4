#pragma once

#include <string>
#include <vector>

namespace aep::cluster {

// Frozen auditory event classes: K-means centers plus a reserved silence
// class with id k_events(). Immutable once constructed.
class EventClasses {
 public:
  EventClasses() = default;
  EventClasses(std::vector<std::vector<double>> centers, double tau);

  int k_events() const { return static_cast<int>(centers_.size()); }
  int silence_class() const { return k_events(); }
  int num_classes() const { return k_events() + 1; }
  double tau() const { return tau_; }
  const std::vector<std::vector<double>>& centers() const { return centers_; }

  // Nearest-center id, ties to the lowest id; the silence class if silent.
  int label(const std::vector<double>& phi, bool silent) const;

  void save(const std::string& path) const;
  static EventClasses load(const std::string& path);

 private:
  std::vector<std::vector<double>> centers_;
  double tau_ = 0.0;
};

double squared_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace aep::cluster
