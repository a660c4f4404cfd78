#include "osp/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "format_util.hpp"
#include "osp/errors.hpp"
#include "osp/features.hpp"
#include "osp/rng.hpp"

namespace osp {

namespace {


std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '"')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '"' || s[e - 1] == '\r')) {
        --e;
    }
    return s.substr(b, e - b);
}

bool is_na(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" ||
           cell == "N/A";
}

} // namespace

std::optional<int> default_horizon(int frequency) {
    switch (frequency) {
        case 1: return 6;
        case 4: return 8;
        case 12: return 18;
        case 52: return 13;
        case 7:
        case 365: return 14;
        case 24: return 48;
        default: return std::nullopt;
    }
}

std::vector<TimeSeries> load_m4_csv(const std::string& path, int frequency, std::ostream* diag) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "': empty file");

    std::vector<TimeSeries> out;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (strip(line).empty()) continue;
        std::vector<std::string> cells;
        {
            std::string cur;
            for (char c : line) {
                if (c == ',') {
                    cells.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            cells.push_back(cur);
        }
        TimeSeries series;
        series.id = strip(cells[0]);
        series.frequency = frequency;
        for (std::size_t col = 1; col < cells.size(); ++col) {
            const std::string cell = strip(cells[col]);
            if (is_na(cell)) break;  // an empty/NA cell ends the row's series
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw ParseError("'" + path + "': row " + std::to_string(row_no) + " col " +
                                 std::to_string(col + 1) + " (series " + series.id +
                                 "): bad numeric cell '" + cell + "'");
            }
            series.values.push_back(v);
        }
        if (series.values.size() < 3) {
            if (diag) {
                *diag << "skipping series " << series.id << " (row " << row_no << "): only "
                      << series.values.size() << " observations\n";
            }
            continue;
        }
        out.push_back(std::move(series));
    }
    return out;
}

void write_m4_csv(const std::string& path, const std::vector<TimeSeries>& series_list) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    std::size_t max_len = 0;
    for (const auto& s : series_list) max_len = std::max(max_len, s.values.size());
    out << "id";
    for (std::size_t i = 1; i <= max_len; ++i) out << ",V" << i;
    out << '\n';
    for (const auto& s : series_list) {
        out << s.id;
        for (double v : s.values) out << ',' << detail::format_double(v);
        for (std::size_t i = s.values.size(); i < max_len; ++i) out << ',';
        out << '\n';
    }
}

void SyntheticSpec::validate() const {
    if (count < 1) throw InvalidSpecError("synthetic: count must be >= 1");
    if (min_length < 10 || max_length < min_length) {
        throw InvalidSpecError("synthetic: need 10 <= min_length <= max_length");
    }
    if (frequency < 1) throw InvalidSpecError("synthetic: frequency must be >= 1");
    if (break_probability < 0.0 || break_probability > 1.0) {
        throw InvalidSpecError("synthetic: break_probability must be in [0, 1]");
    }
    if (std::abs(pre.ar) >= 1.0 || std::abs(post.ar) >= 1.0) {
        throw InvalidSpecError("synthetic: |ar| must be < 1");
    }
    if (pre.noise_sd < 0.0 || post.noise_sd < 0.0) {
        throw InvalidSpecError("synthetic: noise_sd must be >= 0");
    }
}

std::vector<TimeSeries> generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::vector<TimeSeries> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    const int digits = std::max(4, static_cast<int>(std::to_string(spec.count).size()));
    for (int index = 0; index < spec.count; ++index) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
        const int length = rng.uniform_int(spec.min_length, spec.max_length);
        const bool has_break = rng.uniform() < spec.break_probability;
        // Break position uniform over the middle 60% of the series.
        const int break_pos =
            has_break ? static_cast<int>(std::floor(length * (0.2 + 0.6 * rng.uniform()))) : length;

        TimeSeries series;
        series.frequency = spec.frequency;
        series.values.resize(static_cast<std::size_t>(length));
        double noise = 0.0;
        for (int t = 0; t < length; ++t) {
            const bool after = t >= break_pos;
            const ProcessParams& p = after ? spec.post : spec.pre;
            noise = p.ar * noise + p.noise_sd * rng.normal();
            double v = p.level + p.trend * (after ? t - break_pos : t) + noise;
            if (spec.frequency > 1) {
                v += p.seasonal_amplitude *
                     std::sin(2.0 * 3.14159265358979323846 * (t % spec.frequency) /
                              spec.frequency);
            }
            series.values[static_cast<std::size_t>(t)] = v;
        }
        std::ostringstream id;
        id << spec.id_prefix;
        const std::string num = std::to_string(index + 1);
        for (std::size_t i = num.size(); i < static_cast<std::size_t>(digits); ++i) id << '0';
        id << num;
        if (has_break) id << "_b" << break_pos;
        series.id = id.str();
        out.push_back(std::move(series));
    }
    return out;
}

std::optional<int> break_index_of(const std::string& id) {
    const std::size_t pos = id.rfind("_b");
    if (pos == std::string::npos) return std::nullopt;
    const std::string tail = id.substr(pos + 2);
    if (tail.empty()) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (ec != std::errc() || ptr != tail.data() + tail.size()) return std::nullopt;
    return v;
}

void save_model(const GbdtModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelIoError("cannot write '" + path + "'");
    out << model_to_json(model).dump(2) << '\n';
}

GbdtModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelIoError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelIoError("'" + path + "': " + e.what());
    }
    GbdtModel model = model_from_json(j);
    const auto& frozen = feature_names();
    if (model.feature_names.size() != frozen.size() ||
        !std::equal(model.feature_names.begin(), model.feature_names.end(), frozen.begin())) {
        throw ModelIoError("'" + path + "': feature_names does not match the frozen order");
    }
    return model;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        DatasetManifest manifest;
        manifest.name = j.at("name").get<std::string>();
        manifest.frequency = j.at("frequency").get<int>();
        manifest.h = j.value("horizon", default_horizon(manifest.frequency).value_or(0));
        manifest.paths = j.at("paths").get<std::vector<std::string>>();
        if (manifest.frequency < 1 || manifest.h < 1) {
            throw ParseError("'" + path + "': manifest needs frequency >= 1 and horizon >= 1");
        }
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    nlohmann::json j;
    j["name"] = manifest.name;
    j["frequency"] = manifest.frequency;
    j["horizon"] = manifest.h;
    j["paths"] = manifest.paths;
    out << j.dump(2) << '\n';
}

} // namespace osp
