#include "leafid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "leafid/color.hpp"
#include "leafid/errors.hpp"

namespace fs = std::filesystem;

namespace leafid {

namespace {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h = 1469598103934665603ull) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

// mt19937_64 + explicit Fisher-Yates so splits are identical on every
// platform and standard library.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

void reject_comma(const std::string& value, const std::string& what) {
    if (value.find(',') != std::string::npos)
        throw InvalidManifest(what + " contains a comma: " + value);
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw InvalidArgument("bad number '" + s + "' in " + context);
    return v;
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

void check_unique_paths(const DatasetManifest& m) {
    std::set<std::string> seen;
    for (const auto& e : m.entries)
        if (!seen.insert(e.path).second)
            throw InvalidManifest("duplicate path in manifest: " + e.path);
}

}  // namespace

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Test: return "test";
        default: return "unassigned";
    }
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    if (name == "unassigned") return Split::Unassigned;
    throw InvalidManifest("unknown split tag: " + name);
}

DatasetManifest scan_dataset(const std::string& root) {
    if (!fs::exists(root)) throw FileNotFound(root);
    if (!fs::is_directory(root)) throw EmptyDataset(root);

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty()) throw EmptyDataset(root);

    DatasetManifest m;
    for (const auto& dir : class_dirs) {
        const std::string label = dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && is_image_file(entry.path()))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ClassWithNoImages(label);
        for (const auto& f : files)
            m.entries.push_back({f.string(), label, Split::Unassigned});
    }
    check_unique_paths(m);
    return m;
}

DatasetManifest load_manifest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    std::string line;
    if (!std::getline(in, line) || line != "path,label,split")
        throw InvalidManifest("manifest must start with header path,label,split: " + path);

    DatasetManifest m;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw InvalidManifest("manifest row needs 3 fields: " + line);
        m.entries.push_back({fields[0], fields[1], split_from_name(fields[2])});
    }
    if (m.entries.empty()) throw InvalidManifest("manifest has no entries: " + path);
    check_unique_paths(m);
    return m;
}

void save_manifest_csv(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "path,label,split\n";
    for (const auto& e : m.entries) {
        reject_comma(e.path, "path");
        reject_comma(e.label, "label");
        out << e.path << ',' << e.label << ',' << split_name(e.split) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

DatasetManifest split_dataset(const DatasetManifest& m, int train_per_class,
                              int test_per_class, std::uint64_t seed) {
    if (train_per_class < 1 || test_per_class < 1)
        throw InvalidArgument("train and test counts must be >= 1");
    check_unique_paths(m);

    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& e : m.entries) by_label[e.label].push_back(e.path);

    DatasetManifest out;
    const std::size_t need = static_cast<std::size_t>(train_per_class) + test_per_class;
    for (auto& [label, paths] : by_label) {
        if (paths.size() < need) throw InsufficientImages(label, paths.size(), need);
        std::sort(paths.begin(), paths.end());
        seeded_shuffle(paths, seed ^ fnv1a64(label.data(), label.size()));
        for (std::size_t i = 0; i < paths.size(); ++i) {
            Split s = Split::Unassigned;
            if (i < static_cast<std::size_t>(train_per_class))
                s = Split::Train;
            else if (i < need)
                s = Split::Test;
            out.entries.push_back({paths[i], label, s});
        }
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
        return std::tie(a.label, a.path) < std::tie(b.label, b.path);
    });
    return out;
}

std::size_t FeatureConfig::dimension() const {
    std::size_t d = 0;
    if (pft) d += 35;
    if (geometric) d += 3;
    if (color_mean) d += 3;
    if (color_std) d += 3;
    if (color_skew) d += 3;
    if (color_kurt) d += 3;
    if (glcm) d += 5;
    d += static_cast<std::size_t>(vein);
    return d;
}

std::string FeatureConfig::name() const {
    std::string out;
    auto add = [&](const char* token) {
        if (!out.empty()) out += '+';
        out += token;
    };
    if (pft) add("pft");
    if (geometric) add("geom");
    if (color_mean) add("mean");
    if (color_std) add("std");
    if (color_skew) add("skew");
    if (color_kurt) add("kurt");
    if (glcm) add("glcm");
    if (vein > 0) add(("vein" + std::to_string(vein)).c_str());
    return out;
}

FeatureConfig FeatureConfig::parse(const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });

    if (lower == "best-flavia")
        return FeatureConfig{true, true, true, true, true, false, false, 3};
    if (lower == "best-foliage")
        return FeatureConfig{true, true, true, true, true, false, false, 1};
    if (lower == "full")
        return FeatureConfig{true, true, true, true, true, true, true, 4};

    FeatureConfig c;
    std::istringstream in(lower);
    std::string token;
    bool any = false;
    while (std::getline(in, token, '+')) {
        any = true;
        if (token == "pft")
            c.pft = true;
        else if (token == "geom" || token == "geometric")
            c.geometric = true;
        else if (token == "mean")
            c.color_mean = true;
        else if (token == "std")
            c.color_std = true;
        else if (token == "skew")
            c.color_skew = true;
        else if (token == "kurt")
            c.color_kurt = true;
        else if (token == "glcm")
            c.glcm = true;
        else if (token.rfind("vein", 0) == 0 && token.size() == 5 && token[4] >= '1' &&
                 token[4] <= '4')
            c.vein = token[4] - '0';
        else
            throw InvalidArgument("unknown feature token: " + token);
    }
    if (!any || c == FeatureConfig{}) throw InvalidArgument("empty feature config: " + text);
    return c;
}

std::vector<FeatureConfig> FeatureConfig::table2() {
    const FeatureConfig base{true, true, true, true, true, false, false, 0};
    std::vector<FeatureConfig> rows;
    rows.push_back(FeatureConfig{true, false, false, false, false, false, false, 0});
    rows.push_back(FeatureConfig{true, true, false, false, false, false, false, 0});
    rows.push_back(FeatureConfig{true, true, true, false, false, false, false, 0});
    rows.push_back(FeatureConfig{true, true, true, true, false, false, false, 0});
    rows.push_back(base);
    FeatureConfig with_kurt = base;
    with_kurt.color_kurt = true;
    rows.push_back(with_kurt);
    FeatureConfig kurt_glcm = with_kurt;
    kurt_glcm.glcm = true;
    rows.push_back(kurt_glcm);
    FeatureConfig with_glcm = base;
    with_glcm.glcm = true;
    rows.push_back(with_glcm);
    for (int k = 1; k <= 4; ++k) {
        FeatureConfig with_vein = base;
        with_vein.vein = k;
        rows.push_back(with_vein);
    }
    return rows;
}

FeatureConfig FeatureConfig::union_with(const FeatureConfig& other) const {
    FeatureConfig u = *this;
    u.pft |= other.pft;
    u.geometric |= other.geometric;
    u.color_mean |= other.color_mean;
    u.color_std |= other.color_std;
    u.color_skew |= other.color_skew;
    u.color_kurt |= other.color_kurt;
    u.glcm |= other.glcm;
    u.vein = std::max(u.vein, other.vein);
    return u;
}

std::string ExtractionOptions::fingerprint() const {
    std::ostringstream out;
    out << "pft:" << pft.max_radial << ',' << pft.max_angular << ',' << (pft.mask_background ? 1 : 0)
        << ";glcm:" << glcm_levels << ',' << glcm_distance << ','
        << (haralick.standard_idm ? 1 : 0) << ',' << (haralick.standard_correlation ? 1 : 0)
        << ";vein:" << vein.fixed_threshold << ',' << (vein.dark_veins ? 1 : 0)
        << ";color:" << (color_mask ? 1 : 0) << ";fg:" << static_cast<int>(foreground);
    return out.str();
}

LeafFeatureGroups extract_feature_groups(const std::string& image_path,
                                         const ExtractionOptions& opts,
                                         const FeatureConfig& needed) {
    const LoadedImage img = load_leaf_image(image_path);
    const LeafMask mask = segment_leaf(img.gray, opts.foreground);

    LeafFeatureGroups out;
    if (needed.pft || needed.geometric) {
        const Contour contour = trace_contour(mask);
        const Centroid c = mask_centroid(mask);
        if (needed.pft) {
            const double r_max = max_radius(contour, c);
            out.pft = polar_fourier_descriptors(img.gray, mask, c, r_max, opts.pft).values;
        }
        if (needed.geometric) {
            const GeometricFeatures g = geometric_features(mask, contour, c);
            out.geometric = {g.eccentricity, g.roundness, g.dispersion};
        }
    }
    if (needed.color_mean || needed.color_std || needed.color_skew || needed.color_kurt) {
        const ColorMoments cm = color_moments(img.rgb, mask, opts.color_mask);
        if (needed.color_mean) out.color_mean = {cm.r.mean, cm.g.mean, cm.b.mean};
        if (needed.color_std) out.color_std = {cm.r.stddev, cm.g.stddev, cm.b.stddev};
        if (needed.color_skew) out.color_skew = {cm.r.skewness, cm.g.skewness, cm.b.skewness};
        if (needed.color_kurt) out.color_kurt = {cm.r.kurtosis, cm.g.kurtosis, cm.b.kurtosis};
    }
    if (needed.glcm) {
        const TextureFeatures t = averaged_texture_features(img.gray, mask, opts.glcm_levels,
                                                            opts.glcm_distance, opts.haralick);
        out.glcm = {t.angular_second_moment, t.contrast, t.inverse_difference_moment, t.entropy,
                    t.correlation};
    }
    if (needed.vein > 0) {
        const VeinFeatures v = vein_features(img.gray, mask, opts.vein);
        out.vein = {v.v[0], v.v[1], v.v[2], v.v[3]};
    }
    return out;
}

std::vector<double> assemble_features(const LeafFeatureGroups& groups,
                                      const FeatureConfig& config) {
    std::vector<double> out;
    auto append = [&](const std::vector<double>& g, const char* name) {
        if (g.empty()) throw InvalidArgument(std::string("feature group not extracted: ") + name);
        out.insert(out.end(), g.begin(), g.end());
    };
    if (config.pft) append(groups.pft, "pft");
    if (config.geometric) append(groups.geometric, "geom");
    if (config.color_mean) append(groups.color_mean, "mean");
    if (config.color_std) append(groups.color_std, "std");
    if (config.color_skew) append(groups.color_skew, "skew");
    if (config.color_kurt) append(groups.color_kurt, "kurt");
    if (config.glcm) append(groups.glcm, "glcm");
    if (config.vein > 0) {
        if (groups.vein.size() < static_cast<std::size_t>(config.vein))
            throw InvalidArgument("feature group not extracted: vein");
        out.insert(out.end(), groups.vein.begin(), groups.vein.begin() + config.vein);
    }
    return out;
}

FeatureCache::FeatureCache(std::string backing_path) : backing_path_(std::move(backing_path)) {}

std::string FeatureCache::content_hash(const std::string& image_path,
                                       const std::string& fingerprint) {
    std::ifstream in(image_path, std::ios::binary);
    if (!in) throw FileNotFound(image_path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    h = fnv1a64(fingerprint.data(), fingerprint.size(), h);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

namespace {
std::string cache_key(const std::string& path, const std::string& hash, const std::string& group) {
    return path + '\x1f' + group + '\x1f' + hash;
}
}  // namespace

std::optional<std::vector<double>> FeatureCache::lookup(const std::string& path,
                                                        const std::string& hash,
                                                        const std::string& group) const {
    std::lock_guard lock(mutex_);
    const auto it = rows_.find(cache_key(path, hash, group));
    if (it == rows_.end()) return std::nullopt;
    return it->second;
}

void FeatureCache::store(const std::string& path, const std::string& hash,
                         const std::string& group, const std::vector<double>& values) {
    std::lock_guard lock(mutex_);
    rows_[cache_key(path, hash, group)] = values;
}

void FeatureCache::load() {
    if (backing_path_.empty()) return;
    std::ifstream in(backing_path_);
    if (!in) return;  // first run
    std::string line;
    if (!std::getline(in, line) || line != "path,group,hash,values") return;
    std::lock_guard lock(mutex_);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 4) continue;
        std::vector<double> values;
        values.reserve(fields.size() - 3);
        for (std::size_t i = 3; i < fields.size(); ++i)
            values.push_back(parse_double(fields[i], "feature cache"));
        rows_[cache_key(fields[0], fields[2], fields[1])] = std::move(values);
    }
}

void FeatureCache::save() const {
    if (backing_path_.empty()) return;
    std::ofstream out(backing_path_);
    if (!out) throw IoError("cannot open for writing: " + backing_path_);
    out << "path,group,hash,values\n";
    std::lock_guard lock(mutex_);
    for (const auto& [key, values] : rows_) {
        const auto first = key.find('\x1f');
        const auto second = key.find('\x1f', first + 1);
        out << key.substr(0, first) << ',' << key.substr(first + 1, second - first - 1) << ','
            << key.substr(second + 1);
        for (double v : values) out << ',' << format_full(v);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + backing_path_);
}

std::size_t FeatureCache::size() const {
    std::lock_guard lock(mutex_);
    return rows_.size();
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t workers = std::min<std::size_t>(jobs > 0 ? jobs : hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

const char* kGroupNames[] = {"pft", "geom", "mean", "std", "skew", "kurt", "glcm", "vein"};

std::vector<std::string> needed_group_names(const FeatureConfig& c) {
    std::vector<std::string> names;
    const bool flags[] = {c.pft,        c.geometric,  c.color_mean, c.color_std,
                          c.color_skew, c.color_kurt, c.glcm,       c.vein > 0};
    for (int i = 0; i < 8; ++i)
        if (flags[i]) names.emplace_back(kGroupNames[i]);
    return names;
}

std::vector<double>* group_slot(LeafFeatureGroups& g, const std::string& name) {
    if (name == "pft") return &g.pft;
    if (name == "geom") return &g.geometric;
    if (name == "mean") return &g.color_mean;
    if (name == "std") return &g.color_std;
    if (name == "skew") return &g.color_skew;
    if (name == "kurt") return &g.color_kurt;
    if (name == "glcm") return &g.glcm;
    return &g.vein;
}

FeatureConfig config_for_groups(const std::vector<std::string>& names, int vein_count) {
    FeatureConfig c;
    for (const auto& n : names) {
        if (n == "pft") c.pft = true;
        else if (n == "geom") c.geometric = true;
        else if (n == "mean") c.color_mean = true;
        else if (n == "std") c.color_std = true;
        else if (n == "skew") c.color_skew = true;
        else if (n == "kurt") c.color_kurt = true;
        else if (n == "glcm") c.glcm = true;
        else if (n == "vein") c.vein = vein_count;
    }
    return c;
}

}  // namespace

ExtractedGroups extract_groups(const DatasetManifest& m, const FeatureConfig& needed,
                               const ExtractionOptions& opts, int jobs, FeatureCache* cache) {
    ExtractedGroups out;
    out.manifest = m;
    out.groups.resize(m.entries.size());
    std::vector<std::optional<ExtractionFailure>> failures(m.entries.size());

    const std::vector<std::string> group_names = needed_group_names(needed);
    const std::string fingerprint = opts.fingerprint();

    parallel_for(m.entries.size(), jobs, [&](std::size_t i) {
        const std::string& path = m.entries[i].path;
        try {
            LeafFeatureGroups groups;
            std::vector<std::string> missing;
            std::string hash;
            if (cache) {
                hash = FeatureCache::content_hash(path, fingerprint);
                for (const auto& name : group_names) {
                    if (auto hit = cache->lookup(path, hash, name))
                        *group_slot(groups, name) = std::move(*hit);
                    else
                        missing.push_back(name);
                }
            } else {
                missing = group_names;
            }
            if (!missing.empty()) {
                // vein features are cached as the full 4-radius vector
                const FeatureConfig to_compute =
                    config_for_groups(missing, needed.vein > 0 ? 4 : 0);
                LeafFeatureGroups computed = extract_feature_groups(path, opts, to_compute);
                for (const auto& name : missing) {
                    std::vector<double>* slot = group_slot(computed, name);
                    if (cache) cache->store(path, hash, name, *slot);
                    *group_slot(groups, name) = std::move(*slot);
                }
            }
            out.groups[i] = std::move(groups);
        } catch (const Error& e) {
            failures[i] = ExtractionFailure{path, e.name() + std::string(": ") + e.what()};
        }
    });

    for (auto& f : failures)
        if (f) out.failures.push_back(std::move(*f));
    return out;
}

EvaluationReport evaluate_vectors(const PnnModel& model, const std::vector<LabeledVector>& test,
                                  int jobs) {
    if (test.empty()) throw InvalidArgument("empty test set");

    EvaluationReport report;
    report.config_name = model.feature_config;
    report.classes = model.classes;
    for (const auto& [label, vec] : test)
        if (std::find(report.classes.begin(), report.classes.end(), label) ==
            report.classes.end())
            report.classes.push_back(label);

    std::map<std::string, std::size_t> class_index;
    for (std::size_t i = 0; i < report.classes.size(); ++i) class_index[report.classes[i]] = i;

    std::vector<std::size_t> predictions(test.size());
    parallel_for(test.size(), jobs, [&](std::size_t i) {
        predictions[i] = classify(model, test[i].second).class_index;
    });

    const std::size_t n_classes = report.classes.size();
    report.class_test_count.assign(n_classes, 0);
    report.class_correct_count.assign(n_classes, 0);
    report.confusion.assign(n_classes, std::vector<int>(n_classes, 0));
    for (std::size_t i = 0; i < test.size(); ++i) {
        const std::size_t truth = class_index.at(test[i].first);
        const std::size_t pred = predictions[i];
        ++report.class_test_count[truth];
        ++report.confusion[truth][pred];
        if (model.classes[pred] == test[i].first) ++report.class_correct_count[truth];
    }
    report.n_test = static_cast<int>(test.size());
    for (int c : report.class_correct_count) report.n_correct += c;
    report.accuracy = static_cast<double>(report.n_correct) / report.n_test;
    return report;
}

namespace {

struct SplitVectors {
    std::vector<LabeledVector> train, test;
};

// Assembles config vectors for the split entries of `m`, indexing into the
// extraction result by path.
SplitVectors collect_split_vectors(const ExtractedGroups& extracted, const DatasetManifest& m,
                                   const FeatureConfig& config) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < extracted.manifest.entries.size(); ++i)
        index[extracted.manifest.entries[i].path] = i;

    SplitVectors out;
    for (const auto& e : m.entries) {
        if (e.split == Split::Unassigned) continue;
        const std::size_t i = index.at(e.path);
        const auto& groups = extracted.groups[i];
        if (!groups) continue;  // failed extraction, already reported
        auto vec = assemble_features(*groups, config);
        (e.split == Split::Train ? out.train : out.test).emplace_back(e.label, std::move(vec));
    }
    return out;
}

DatasetManifest drop_failures(const ExtractedGroups& extracted) {
    DatasetManifest survivors;
    for (std::size_t i = 0; i < extracted.manifest.entries.size(); ++i)
        if (extracted.groups[i]) survivors.entries.push_back(extracted.manifest.entries[i]);
    return survivors;
}

}  // namespace

ProtocolRun run_protocol(const DatasetManifest& m, const FeatureConfig& config,
                         const Protocol& protocol, const ExtractionOptions& opts,
                         FeatureCache* cache) {
    if (protocol.sigma <= 0.0) throw NonPositiveSigma(protocol.sigma);

    const ExtractedGroups extracted = extract_groups(m, config, opts, protocol.jobs, cache);
    const DatasetManifest split = split_dataset(drop_failures(extracted),
                                                protocol.train_per_class,
                                                protocol.test_per_class, protocol.seed);
    const SplitVectors vectors = collect_split_vectors(extracted, split, config);

    ProtocolRun run;
    run.model = train(vectors.train, protocol.sigma, config.name());
    run.report = evaluate_vectors(run.model, vectors.test, protocol.jobs);
    run.report.failures = extracted.failures;
    return run;
}

std::vector<EvaluationReport> ablation_grid(const DatasetManifest& m,
                                            const std::vector<FeatureConfig>& configs,
                                            const Protocol& protocol,
                                            const ExtractionOptions& opts, FeatureCache* cache) {
    if (configs.empty()) throw InvalidArgument("ablation needs at least one config");
    if (protocol.sigma <= 0.0) throw NonPositiveSigma(protocol.sigma);

    FeatureConfig needed = configs.front();
    for (const auto& c : configs) needed = needed.union_with(c);

    const ExtractedGroups extracted = extract_groups(m, needed, opts, protocol.jobs, cache);
    const DatasetManifest split = split_dataset(drop_failures(extracted),
                                                protocol.train_per_class,
                                                protocol.test_per_class, protocol.seed);

    std::vector<EvaluationReport> reports;
    for (const auto& config : configs) {
        const SplitVectors vectors = collect_split_vectors(extracted, split, config);
        const PnnModel model = train(vectors.train, protocol.sigma, config.name());
        EvaluationReport report = evaluate_vectors(model, vectors.test, protocol.jobs);
        report.failures = extracted.failures;
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<SweepPoint> sigma_sweep_vectors(const std::vector<LabeledVector>& train_set,
                                            const std::vector<LabeledVector>& test_set,
                                            const std::vector<double>& sigmas, int jobs) {
    if (sigmas.empty()) throw InvalidArgument("sigma sweep needs at least one value");
    for (double s : sigmas)
        if (s <= 0.0) throw NonPositiveSigma(s);

    std::vector<SweepPoint> points;
    for (double sigma : sigmas) {
        const PnnModel model = train(train_set, sigma);
        points.push_back({sigma, evaluate_vectors(model, test_set, jobs).accuracy});
    }
    return points;
}

std::vector<SweepPoint> sigma_sweep(const DatasetManifest& m, const FeatureConfig& config,
                                    const std::vector<double>& sigmas, const Protocol& protocol,
                                    const ExtractionOptions& opts, FeatureCache* cache) {
    if (sigmas.empty()) throw InvalidArgument("sigma sweep needs at least one value");
    for (double s : sigmas)
        if (s <= 0.0) throw NonPositiveSigma(s);

    const ExtractedGroups extracted = extract_groups(m, config, opts, protocol.jobs, cache);
    const DatasetManifest split = split_dataset(drop_failures(extracted),
                                                protocol.train_per_class,
                                                protocol.test_per_class, protocol.seed);
    const SplitVectors vectors = collect_split_vectors(extracted, split, config);
    return sigma_sweep_vectors(vectors.train, vectors.test, sigmas, protocol.jobs);
}

std::vector<LearningPoint> learning_curve(const DatasetManifest& m, const FeatureConfig& config,
                                          const std::vector<int>& train_sizes, int test_per_class,
                                          int repeats, std::uint64_t seed, double sigma,
                                          const ExtractionOptions& opts, int jobs,
                                          FeatureCache* cache) {
    if (train_sizes.empty()) throw InvalidArgument("learning curve needs at least one size");
    if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
    if (sigma <= 0.0) throw NonPositiveSigma(sigma);

    const ExtractedGroups extracted = extract_groups(m, config, opts, jobs, cache);
    const DatasetManifest survivors = drop_failures(extracted);

    std::vector<LearningPoint> points;
    for (int size : train_sizes) {
        double total = 0.0;
        for (int r = 0; r < repeats; ++r) {
            const DatasetManifest split =
                split_dataset(survivors, size, test_per_class, seed + static_cast<std::uint64_t>(r));
            const SplitVectors vectors = collect_split_vectors(extracted, split, config);
            const PnnModel model = train(vectors.train, sigma, config.name());
            total += evaluate_vectors(model, vectors.test, jobs).accuracy;
        }
        points.push_back({size, total / repeats});
    }
    return points;
}

void write_report_csv(const EvaluationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "config,class,n_test,n_correct,accuracy\n";
    for (std::size_t i = 0; i < report.classes.size(); ++i) {
        const int n = report.class_test_count[i];
        const int c = report.class_correct_count[i];
        out << report.config_name << ',' << report.classes[i] << ',' << n << ',' << c << ','
            << format_fixed6(n > 0 ? static_cast<double>(c) / n : 0.0) << '\n';
    }
    out << report.config_name << ",summary," << report.n_test << ',' << report.n_correct << ','
        << format_fixed6(report.accuracy) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_ablation_csv(const std::vector<EvaluationReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "config,n_test,n_correct,accuracy\n";
    for (const auto& r : reports)
        out << r.config_name << ',' << r.n_test << ',' << r.n_correct << ','
            << format_fixed6(r.accuracy) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "sigma,accuracy\n";
    for (const auto& p : points) {
        char sigma_buf[32];
        std::snprintf(sigma_buf, sizeof sigma_buf, "%.6g", p.sigma);
        out << sigma_buf << ',' << format_fixed6(p.accuracy) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_learning_csv(const std::vector<LearningPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "train_size,mean_accuracy\n";
    for (const auto& p : points)
        out << p.train_size << ',' << format_fixed6(p.mean_accuracy) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace leafid
