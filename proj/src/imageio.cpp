#include "logdef/imageio.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "logdef/errors.hpp"

namespace logdef {

void save_png(const std::string& path, const Tensor& image) {
    if (image.shape.size() != 3 || image.shape[0] != 3) {
        throw ShapeError("save_png expects [3, H, W], got " + image.shape_str());
    }
    const int h = static_cast<int>(image.shape[1]);
    const int w = static_cast<int>(image.shape[2]);
    cv::Mat bgr(h, w, CV_8UC3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto to_u8 = [&](int c) {
                const double v = image.data[static_cast<size_t>((c * h + y) * w + x)];
                return cv::saturate_cast<uint8_t>((v + 1.0) * 127.5);
            };
            // tensor is RGB, OpenCV wants BGR
            bgr.at<cv::Vec3b>(y, x) = cv::Vec3b(to_u8(2), to_u8(1), to_u8(0));
        }
    }
    if (!cv::imwrite(path, bgr)) throw Error("failed to write " + path);
}

void save_scatter_png(const std::string& path, const std::vector<Tensor>& points, int64_t size, double extent) {
    if (points.empty()) throw Error("no points to plot");
    const int s = static_cast<int>(size);
    cv::Mat canvas(s, s, CV_8UC3, cv::Scalar(255, 255, 255));
    cv::line(canvas, {s / 2, 0}, {s / 2, s - 1}, cv::Scalar(220, 220, 220));
    cv::line(canvas, {0, s / 2}, {s - 1, s / 2}, cv::Scalar(220, 220, 220));
    for (const Tensor& p : points) {
        if (p.numel() != 2) throw ShapeError("scatter expects 2-vectors");
        const int x = static_cast<int>(std::lround((p[0] / extent + 1.0) * 0.5 * (s - 1)));
        const int y = static_cast<int>(std::lround((1.0 - (p[1] / extent + 1.0) * 0.5) * (s - 1)));
        if (x < 0 || x >= s || y < 0 || y >= s) continue;
        cv::circle(canvas, {x, y}, 2, cv::Scalar(180, 90, 30), cv::FILLED);
    }
    if (!cv::imwrite(path, canvas)) throw Error("failed to write " + path);
}

bool image_decodable(const std::string& path) {
    const cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    return !m.empty();
}

double psnr(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "psnr");
    double mse = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        const double d = a[i] - b[i];
        mse += d * d;
    }
    mse /= double(a.numel());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    // dynamic range of [-1, 1] data is 2
    return 10.0 * std::log10(4.0 / mse);
}

} // namespace logdef
