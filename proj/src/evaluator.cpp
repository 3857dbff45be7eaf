#include "logdef/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "logdef/errors.hpp"
#include "logdef/tokenizer.hpp"

namespace logdef {

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine: embedding dimensions differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw Error("cosine: empty embedding");
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw Error("cosine: zero-norm embedding");
    // sqrt of the product (not product of sqrts) keeps identical inputs at
    // exactly 1.
    return dot / std::sqrt(aa * bb);
}

EvalRecord clip_t(const std::vector<Tensor>& images, const std::string& prompt, EncoderPair& encoder,
                  bool raw_cosine) {
    if (images.empty()) throw Error("clip_t: empty image list");
    const std::vector<double> text = encoder.embed_text(prompt);

    EvalRecord rec;
    rec.prompt = prompt;
    rec.per_image.resize(images.size());
    const double scale = raw_cosine ? 1.0 : 100.0;
    // Per-image scores are independent; order of writes is fixed by index.
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(images.size()); ++i) {
        const std::vector<double> img = encoder.embed_image(images[static_cast<size_t>(i)]);
        rec.per_image[static_cast<size_t>(i)] = scale * cosine_similarity(img, text);
    }
    double sum = 0.0;
    for (double v : rec.per_image) sum += v;
    rec.mean = sum / double(rec.per_image.size());
    return rec;
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::vector<std::string> check_categories(const std::vector<MethodScores>& methods) {
    if (methods.empty()) throw Error("eval table: no methods");
    std::vector<std::string> cats;
    for (const EvalRecord& r : methods.front().records) cats.push_back(r.category);
    if (cats.empty()) throw Error("eval table: no categories");
    for (const MethodScores& m : methods) {
        std::vector<std::string> got;
        for (const EvalRecord& r : m.records) got.push_back(r.category);
        if (got != cats) {
            throw Error("eval table: method '" + m.method + "' has a different category set");
        }
    }
    return cats;
}

} // namespace

std::string eval_table_markdown(const std::vector<MethodScores>& methods) {
    const std::vector<std::string> cats = check_categories(methods);
    const size_t ncols = cats.size() + 1; // + mean

    // column values: per-category means, then the row mean
    std::vector<std::vector<double>> rows;
    for (const MethodScores& m : methods) {
        std::vector<double> row;
        double sum = 0.0;
        for (const EvalRecord& r : m.records) {
            row.push_back(r.mean);
            sum += r.mean;
        }
        row.push_back(sum / double(m.records.size()));
        rows.push_back(std::move(row));
    }

    std::vector<double> best(ncols, -std::numeric_limits<double>::infinity());
    for (const auto& row : rows) {
        for (size_t c = 0; c < ncols; ++c) best[c] = std::max(best[c], row[c]);
    }

    std::string out = "| Method |";
    for (const std::string& c : cats) out += " " + c + " |";
    out += " mean |\n|---|";
    for (size_t c = 0; c < ncols; ++c) out += "---|";
    out += "\n";
    for (size_t m = 0; m < methods.size(); ++m) {
        out += "| " + methods[m].method + " |";
        for (size_t c = 0; c < ncols; ++c) {
            const std::string v = fmt2(rows[m][c]);
            out += rows[m][c] == best[c] ? " **" + v + "** |" : " " + v + " |";
        }
        out += "\n";
    }
    return out;
}

std::string eval_table_csv(const std::vector<MethodScores>& methods) {
    check_categories(methods);
    std::string out = "method,category,n_images,mean_clip_t\n";
    for (const MethodScores& m : methods) {
        for (const EvalRecord& r : m.records) {
            out += m.method + "," + r.category + "," + std::to_string(r.per_image.size()) + "," + fmt2(r.mean) + "\n";
        }
    }
    return out;
}

namespace {

// Linear encoder pair over a JSON description: text = mean of per-word
// vectors, image = projection matrix applied to an average-pooled pixel grid.
class FileEncoder final : public EncoderPair {
  public:
    explicit FileEncoder(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open encoder file: " + path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error("encoder file is not valid JSON: " + std::string(e.what()));
        }
        dim_ = j.at("dim").get<int64_t>();
        for (const auto& [word, vec] : j.at("text_vocab").items()) {
            auto v = vec.get<std::vector<double>>();
            if (static_cast<int64_t>(v.size()) != dim_) {
                throw ShapeError("encoder text vector for '" + word + "' has wrong dimension");
            }
            vocab_[word] = std::move(v);
        }
        grid_ = j.at("image_projection").at("grid").get<int64_t>();
        const auto mat = j.at("image_projection").at("matrix").get<std::vector<std::vector<double>>>();
        if (static_cast<int64_t>(mat.size()) != dim_) throw ShapeError("encoder projection has wrong row count");
        for (const auto& row : mat) {
            if (static_cast<int64_t>(row.size()) != 3 * grid_ * grid_) {
                throw ShapeError("encoder projection has wrong column count");
            }
            proj_.insert(proj_.end(), row.begin(), row.end());
        }
    }

    std::vector<double> embed_text(const std::string& prompt) override {
        std::vector<double> acc(static_cast<size_t>(dim_), 0.0);
        int64_t hits = 0;
        for (const std::string& w : split_words(lowercase(prompt))) {
            const auto it = vocab_.find(w);
            if (it == vocab_.end()) continue;
            for (int64_t i = 0; i < dim_; ++i) acc[static_cast<size_t>(i)] += it->second[static_cast<size_t>(i)];
            ++hits;
        }
        if (hits == 0) throw Error("encoder vocabulary covers no word of: " + prompt);
        for (double& v : acc) v /= double(hits);
        return acc;
    }

    std::vector<double> embed_image(const Tensor& image) override {
        if (image.shape.size() != 3 || image.shape[0] != 3) {
            throw ShapeError("encoder expects [3, H, W] images, got " + image.shape_str());
        }
        const int64_t h = image.shape[1], w = image.shape[2];
        std::vector<double> pooled(static_cast<size_t>(3 * grid_ * grid_), 0.0);
        std::vector<int64_t> counts(pooled.size(), 0);
        for (int64_t c = 0; c < 3; ++c) {
            for (int64_t y = 0; y < h; ++y) {
                for (int64_t x = 0; x < w; ++x) {
                    const int64_t gy = y * grid_ / h, gx = x * grid_ / w;
                    const size_t k = static_cast<size_t>((c * grid_ + gy) * grid_ + gx);
                    pooled[k] += image.data[static_cast<size_t>((c * h + y) * w + x)];
                    counts[k] += 1;
                }
            }
        }
        for (size_t k = 0; k < pooled.size(); ++k) {
            if (counts[k] > 0) pooled[k] /= double(counts[k]);
        }
        std::vector<double> out(static_cast<size_t>(dim_), 0.0);
        const int64_t cols = 3 * grid_ * grid_;
        for (int64_t r = 0; r < dim_; ++r) {
            double acc = 0.0;
            for (int64_t c = 0; c < cols; ++c) {
                acc += proj_[static_cast<size_t>(r * cols + c)] * pooled[static_cast<size_t>(c)];
            }
            out[static_cast<size_t>(r)] = acc;
        }
        return out;
    }

    int64_t dim() const override { return dim_; }

  private:
    static std::string lowercase(std::string s) {
        for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    int64_t dim_ = 0;
    int64_t grid_ = 0;
    std::map<std::string, std::vector<double>> vocab_;
    std::vector<double> proj_;
};

} // namespace

std::unique_ptr<EncoderPair> load_file_encoder(const std::string& path) {
    return std::make_unique<FileEncoder>(path);
}

std::string eval_prompt_for_category(const std::string& category) {
    std::string prompt = "A few {fruits} are growing on the tree";
    const size_t pos = prompt.find("{fruits}");
    prompt.replace(pos, 8, category);
    return prompt;
}

} // namespace logdef
