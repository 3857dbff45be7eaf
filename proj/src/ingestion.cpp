#include "logdef/ingestion.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "logdef/errors.hpp"

namespace logdef {

std::vector<std::string> DatasetManifest::categories() const {
    std::set<std::string> cats;
    for (const ManifestEntry& e : entries) cats.insert(e.category);
    return {cats.begin(), cats.end()};
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("manifest is not valid JSON: " + std::string(e.what()));
    }

    DatasetManifest m;
    if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].empty()) {
        throw Error("manifest needs a non-empty 'entries' list");
    }
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::set<std::string> seen;
    for (const auto& e : j["entries"]) {
        ManifestEntry entry;
        entry.path = e.at("path").get<std::string>();
        entry.category = e.at("category").get<std::string>();
        if (entry.category.empty()) throw Error("manifest entry has an empty category");
        // relative paths resolve against the manifest location
        if (!std::filesystem::path(entry.path).is_absolute()) {
            entry.path = (base / entry.path).string();
        }
        if (!seen.insert(entry.path).second) throw Error("duplicate manifest path: " + entry.path);
        if (!std::filesystem::exists(entry.path)) throw Error("manifest path does not exist: " + entry.path);
        if (cv::imread(entry.path, cv::IMREAD_COLOR).empty()) {
            throw Error("manifest path does not decode as an image: " + entry.path);
        }
        m.entries.push_back(std::move(entry));
    }

    if (j.contains("preprocessing")) {
        const auto& p = j["preprocessing"];
        if (p.contains("resize_short_side")) m.preprocessing.resize_short_side = p["resize_short_side"].get<int64_t>();
        if (p.contains("center_crop")) m.preprocessing.center_crop = p["center_crop"].get<int64_t>();
        if (p.contains("value_range")) {
            const auto r = p["value_range"].get<std::vector<double>>();
            if (r.size() != 2 || !(r[0] < r[1])) throw Error("manifest value_range must be [lo, hi]");
            m.preprocessing.value_range = {r[0], r[1]};
        }
    }
    if (m.preprocessing.center_crop > m.preprocessing.resize_short_side) {
        throw Error("center_crop larger than resize_short_side");
    }

    std::sort(m.entries.begin(), m.entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
        return a.category != b.category ? a.category < b.category : a.path < b.path;
    });
    return m;
}

Tensor preprocess_image(const std::string& path, const Preprocessing& pp) {
    cv::Mat img = cv::imread(path, cv::IMREAD_COLOR); // forces 3-channel BGR
    if (img.empty()) throw Error("cannot decode image: " + path);

    const int64_t short_side = std::min(img.rows, img.cols);
    if (short_side != pp.resize_short_side) {
        const double scale = double(pp.resize_short_side) / double(short_side);
        cv::Mat resized;
        cv::resize(img, resized, cv::Size(), scale, scale, cv::INTER_CUBIC);
        img = resized;
    }

    const int crop = static_cast<int>(pp.center_crop);
    if (img.rows < crop || img.cols < crop) {
        throw Error("image smaller than crop after resize: " + path);
    }
    const int y0 = (img.rows - crop) / 2;
    const int x0 = (img.cols - crop) / 2;
    img = img(cv::Rect(x0, y0, crop, crop)).clone();

    const double lo = pp.value_range[0], hi = pp.value_range[1];
    Tensor out({3, crop, crop});
    for (int y = 0; y < crop; ++y) {
        for (int x = 0; x < crop; ++x) {
            const cv::Vec3b px = img.at<cv::Vec3b>(y, x);
            // BGR -> RGB
            for (int c = 0; c < 3; ++c) {
                const double v = double(px[2 - c]) / 255.0;
                out.data[static_cast<size_t>((c * crop + y) * crop + x)] = lo + v * (hi - lo);
            }
        }
    }
    return out;
}

std::vector<Tensor> load_dataset(const DatasetManifest& manifest) {
    std::vector<Tensor> out;
    out.reserve(manifest.entries.size());
    for (const ManifestEntry& e : manifest.entries) {
        out.push_back(preprocess_image(e.path, manifest.preprocessing));
    }
    return out;
}

} // namespace logdef
