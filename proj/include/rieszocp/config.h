#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rieszocp/pdesim.h"
#include "rieszocp/relaxation.h"
#include "rieszocp/sdp.h"
#include "rieszocp/spectral.h"

namespace rieszocp {

/// Validation failure; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ModelKind { Heat, Wave, Custom };

/// Time-window choice for the internal scaling of a free horizon.
struct TimeWindow {
  enum class Kind { Horizon, Auto, Fixed };
  Kind kind{Kind::Auto};
  double extent{0.0};  // Fixed only
};

struct RunConfig {
  ModelKind model{ModelKind::Heat};
  double epsilon{0.4};
  double x0{0.27};
  int wave_gram_size{8};
  std::vector<CustomMode> custom_modes;
  std::string custom_name{"custom"};

  std::vector<int> n_modes;  // sweep list
  Horizon horizon;
  Polynomial cost;           // on ControlSet::layout(controls)
  std::vector<Interval> control_box;
  std::vector<Polynomial> extra_constraints;
  BoundsConfig bounds;

  std::vector<int> orders;   // sweep list of r
  TestDegree test_degree{TestDegree::TwoR};
  TimeWindow time_window;

  SolverOptions solver;
  int parallelism{1};

  HeatOptions heat;
  WaveOptions wave;
  double modal_dt{1e-3};

  std::string output_directory{"out"};
  bool write_sdpa{false};
  bool write_fields{true};

  int controls() const { return static_cast<int>(control_box.size()); }
  SpectralModel spectral_model() const;
  ControlSet control_set() const;
};

/// Parses and validates a JSON document. Unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace rieszocp
