#ifndef SEGAUDIT_SYNTH_HPP
#define SEGAUDIT_SYNTH_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segaudit/cohort.hpp"
#include "segaudit/mask_volume.hpp"
#include "segaudit/rng.hpp"

namespace segaudit {

// Degradation applied to a gold mask to synthesize its silver counterpart,
// in this order: miss, uniform shrink, integer translation, boundary erosion.
struct DegradationParams {
  double miss_prob = 0.0;
  double shrink_factor = 1.0;         // keep voxels within f^(1/3) * radii
  int offset_voxels = 0;              // max translation norm, voxels
  double boundary_erosion_prob = 0.0; // per-boundary-voxel removal
};

// Selects parameters for a (attribute level, data source) cell. "*" matches
// anything; an exact (level, source) rule beats (level, *) beats (*, source)
// beats (*, *).
struct DegradationRule {
  std::string level = "*";
  std::string source = "*";
  DegradationParams params;
};

struct AttributeScheme {
  std::string name;
  std::vector<std::string> levels;
  std::vector<double> proportions;
  // Optional conditional proportions per data source level (keyed by source
  // label); lets a scenario correlate an attribute with the source.
  std::map<std::string, std::vector<double>> by_source;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t n_cases = 0;
  std::array<int, 3> dims{32, 32, 32};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 2> radius_mm{4.0, 9.0};
  AttributeScheme sources;                  // data_source levels
  std::vector<AttributeScheme> attributes;  // must include age_group
  std::string degradation_attribute;        // "" = rules keyed on source only
  std::vector<DegradationRule> rules;
  bool emit_ratings = false;

  void validate() const;
  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct EllipsoidSpec {
  std::array<double, 3> center_mm{};
  std::array<double, 3> radii_mm{};
};

// Voxel centers at index*spacing; foreground where the normalized ellipsoid
// equation is <= 1.
MaskVolume rasterize_ellipsoid(const std::array<int, 3>& dims,
                               const std::array<double, 3>& spacing,
                               const EllipsoidSpec& ellipsoid);

struct PerturbOutcome {
  MaskVolume silver;
  bool missed = false;
  std::array<int, 3> offset{0, 0, 0};
};

PerturbOutcome perturb_mask(const MaskVolume& gold, const EllipsoidSpec& ellipsoid,
                            const DegradationParams& params, Rng& rng);

struct GeneratedCase {
  CaseRecord record;
  std::map<std::string, std::string> levels;  // attribute name -> level
  std::uint64_t case_seed = 0;
  EllipsoidSpec ellipsoid;
  DegradationParams params;
  MaskVolume gold;
  MaskVolume silver;
  bool missed = false;
  std::array<int, 3> offset{0, 0, 0};
  double dice_value = 0.0;
};

// Level assignment for every case: largest-remainder counts, seeded shuffle.
struct CasePlan {
  std::string data_source;
  std::map<std::string, std::string> levels;
};

std::vector<CasePlan> plan_assignments(const ScenarioConfig& config);

// Fully generates case `index` from its own substream (seed = mix(master,
// index)); independent of every other case.
GeneratedCase generate_case(const ScenarioConfig& config, const CasePlan& plan,
                            std::size_t index);

// Largest-remainder integer allocation of n into the given proportions.
std::vector<std::size_t> largest_remainder_counts(std::size_t n,
                                                  const std::vector<double>& proportions);

// Writes cohort.csv, manifest.json, and masks/<id>_{gold,silver}.{mhd,raw}
// under out_dir. Byte-identical for identical configs.
void generate_cohort(const ScenarioConfig& config, const std::string& out_dir);

// Built-in scenario fixtures.
std::vector<std::string> scenario_names();
ScenarioConfig scenario_library(const std::string& name);

}  // namespace segaudit

#endif
