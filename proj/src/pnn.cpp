#include "leafid/pnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "leafid/errors.hpp"

namespace leafid {

NormParams normalize_fit(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw EmptyTrainingSet();
    const std::size_t d = vectors.front().size();
    NormParams p;
    p.min.assign(d, std::numeric_limits<double>::infinity());
    p.max.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& v : vectors) {
        if (v.size() != d) throw DimensionMismatch(d, v.size());
        for (std::size_t i = 0; i < d; ++i) {
            p.min[i] = std::min(p.min[i], v[i]);
            p.max[i] = std::max(p.max[i], v[i]);
        }
    }
    return p;
}

std::vector<double> normalize_apply(const NormParams& p, std::span<const double> x) {
    if (x.size() != p.dim()) throw DimensionMismatch(p.dim(), x.size());
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double range = p.max[i] - p.min[i];
        out[i] = range > 0.0 ? (x[i] - p.min[i]) / range : 0.0;
    }
    return out;
}

PnnModel train(const std::vector<LabeledVector>& samples, double sigma,
               const std::string& feature_config) {
    if (samples.empty()) throw EmptyTrainingSet();
    if (sigma <= 0.0) throw NonPositiveSigma(sigma);

    const std::size_t d = samples.front().second.size();
    std::vector<std::vector<double>> all;
    all.reserve(samples.size());
    for (const auto& [label, vec] : samples) {
        if (vec.size() != d) throw DimensionMismatch(d, vec.size());
        all.push_back(vec);
    }

    PnnModel m;
    m.sigma = sigma;
    m.dim = d;
    m.feature_config = feature_config;
    m.norm = normalize_fit(all);

    // Class indices follow sorted label order; exemplar order within a class
    // follows sample order.
    std::map<std::string, std::vector<std::vector<double>>> grouped;
    for (const auto& [label, vec] : samples)
        grouped[label].push_back(normalize_apply(m.norm, vec));
    if (grouped.size() < 2) throw SingleClass();

    for (auto& [label, vecs] : grouped) {
        m.classes.push_back(label);
        m.exemplars.push_back(std::move(vecs));
    }
    return m;
}

double class_log_density(const PnnModel& m, std::span<const double> x, std::size_t class_index) {
    if (x.size() != m.dim) throw DimensionMismatch(m.dim, x.size());
    const auto& exemplars = m.exemplars[class_index];
    const double inv_two_sigma_sq = 1.0 / (2.0 * m.sigma * m.sigma);

    // logsumexp over exemplar kernels; raw exponentials underflow at d ~ 50.
    std::vector<double> terms;
    terms.reserve(exemplars.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& ex : exemplars) {
        double dist_sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double diff = x[i] - ex[i];
            dist_sq += diff * diff;
        }
        const double t = -dist_sq * inv_two_sigma_sq;
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    const double lse = peak + std::log(acc);

    const double d = static_cast<double>(m.dim);
    return -0.5 * d * std::log(2.0 * std::numbers::pi) - d * std::log(m.sigma) -
           std::log(static_cast<double>(exemplars.size())) + lse;
}

Classification classify(const PnnModel& m, std::span<const double> raw_features) {
    const std::vector<double> x = normalize_apply(m.norm, raw_features);

    Classification out;
    out.log_density.resize(m.classes.size());
    for (std::size_t j = 0; j < m.classes.size(); ++j)
        out.log_density[j] = class_log_density(m, x, j);

    // Strict > keeps the lowest index on ties.
    std::size_t best = 0;
    for (std::size_t j = 1; j < out.log_density.size(); ++j)
        if (out.log_density[j] > out.log_density[best]) best = j;
    out.class_index = best;
    out.label = m.classes[best];

    const double peak = out.log_density[best];
    out.posterior.resize(out.log_density.size());
    double total = 0.0;
    for (std::size_t j = 0; j < out.posterior.size(); ++j) {
        out.posterior[j] = std::exp(out.log_density[j] - peak);
        total += out.posterior[j];
    }
    for (double& p : out.posterior) p /= total;
    return out;
}

namespace {
constexpr int kModelFormatVersion = 1;
}

std::string model_to_json(const PnnModel& m) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["feature_config"] = m.feature_config;
    j["sigma"] = m.sigma;
    j["classes"] = m.classes;
    j["norm"]["min"] = m.norm.min;
    j["norm"]["max"] = m.norm.max;
    j["exemplars"] = m.exemplars;
    return j.dump(2);
}

PnnModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelFormatError(std::string("invalid model JSON: ") + e.what());
    }
    try {
        if (!j.contains("format_version") || !j["format_version"].is_number_integer())
            throw ModelFormatError("model JSON lacks an integer format_version");
        const int version = j["format_version"].get<int>();
        if (version != kModelFormatVersion)
            throw ModelFormatError("unsupported model format_version " + std::to_string(version));

        PnnModel m;
        m.feature_config = j.at("feature_config").get<std::string>();
        m.sigma = j.at("sigma").get<double>();
        m.classes = j.at("classes").get<std::vector<std::string>>();
        m.norm.min = j.at("norm").at("min").get<std::vector<double>>();
        m.norm.max = j.at("norm").at("max").get<std::vector<double>>();
        m.exemplars = j.at("exemplars").get<std::vector<std::vector<std::vector<double>>>>();
        m.dim = m.norm.min.size();

        if (m.sigma <= 0.0) throw NonPositiveSigma(m.sigma);
        if (m.classes.size() < 2 || m.classes.size() != m.exemplars.size())
            throw ModelFormatError("class list and exemplar table disagree");
        for (const auto& cls : m.exemplars) {
            if (cls.empty()) throw ModelFormatError("class with no exemplars");
            for (const auto& ex : cls)
                if (ex.size() != m.dim) throw ModelFormatError("exemplar dimension mismatch");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed model JSON: ") + e.what());
    }
}

void save_model(const PnnModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << model_to_json(m) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

PnnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace leafid
