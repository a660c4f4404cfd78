#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osp/gbdt.hpp"
#include "osp/series.hpp"

namespace osp {

/// Dataset description: name, frequency, horizon, source paths.
struct DatasetManifest {
    std::string name;
    int frequency = 1;
    int h = 1;
    std::vector<std::string> paths;
};

/// Conventional horizon per frequency (yearly 6, quarterly 8, monthly 18,
/// weekly 13, daily 14, hourly 48); nullopt for anything else.
std::optional<int> default_horizon(int frequency);

/// Reads a header row followed by one series per row (id, then observations;
/// an empty or NA cell ends the row's series). Rows with fewer than 3
/// observations are skipped with a warning on `diag`.
std::vector<TimeSeries> load_m4_csv(const std::string& path, int frequency,
                                    std::ostream* diag = nullptr);

void write_m4_csv(const std::string& path, const std::vector<TimeSeries>& series_list);

/// One data-generating regime of the synthetic corpus.
struct ProcessParams {
    double level = 10.0;
    double ar = 0.3;                  // AR(1) coefficient of the noise
    double trend = 0.0;               // slope per step
    double seasonal_amplitude = 0.0;  // ignored for frequency 1
    double noise_sd = 1.0;
};

/// Seeded structural-break corpus: each series follows `pre`, and with
/// probability break_probability switches to `post` at a position drawn
/// uniformly from the middle 60% of the series. The true break index rides
/// in the id as a "_b<index>" suffix.
struct SyntheticSpec {
    int count = 100;
    int min_length = 80;
    int max_length = 150;
    int frequency = 1;
    double break_probability = 0.5;
    ProcessParams pre;
    ProcessParams post;
    std::uint64_t seed = 1;
    std::string id_prefix = "S";

    void validate() const;
};

std::vector<TimeSeries> generate_synthetic(const SyntheticSpec& spec);

/// Ground-truth break position parsed back out of a generated id.
std::optional<int> break_index_of(const std::string& id);

/// JSON model file. load_model validates the format version and that
/// feature_names matches the frozen feature order exactly.
void save_model(const GbdtModel& model, const std::string& path);
GbdtModel load_model(const std::string& path);

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

} // namespace osp
