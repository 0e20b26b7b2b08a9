#include "aquasem/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aquasem/backends.hpp"

namespace aquasem {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 6.5025;   // (0.01 * 255)^2
constexpr double kC2 = 58.5225;  // (0.03 * 255)^2

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("image shapes differ");
    }
}

std::array<double, kWindow> gaussian_kernel() {
    std::array<double, kWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        double d = i - (kWindow - 1) / 2.0;
        k[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Valid-mode convolution of each row with the 1D kernel: (w, h) -> (w-10, h).
std::vector<double> convolve_rows(const std::vector<double>& in, int w, int h,
                                  const std::array<double, kWindow>& k) {
    const int out_w = w - kWindow + 1;
    std::vector<double> out(static_cast<std::size_t>(out_w) * h);
    for (int y = 0; y < h; ++y) {
        const double* row = in.data() + static_cast<std::size_t>(y) * w;
        double* orow = out.data() + static_cast<std::size_t>(y) * out_w;
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kWindow; ++t) acc += k[t] * row[x + t];
            orow[x] = acc;
        }
    }
    return out;
}

// Valid-mode convolution down each column: (w, h) -> (w, h-10).
std::vector<double> convolve_cols(const std::vector<double>& in, int w, int h,
                                  const std::array<double, kWindow>& k) {
    const int out_h = h - kWindow + 1;
    std::vector<double> out(static_cast<std::size_t>(w) * out_h);
    for (int y = 0; y < out_h; ++y) {
        double* orow = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kWindow; ++t) {
                acc += k[t] * in[static_cast<std::size_t>(y + t) * w + x];
            }
            orow[x] = acc;
        }
    }
    return out;
}

std::vector<double> window_means(const std::vector<double>& plane, int w, int h,
                                 const std::array<double, kWindow>& k) {
    return convolve_cols(convolve_rows(plane, w, h, k), w - kWindow + 1, h, k);
}

}  // namespace

double Embedding::norm() const {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return std::sqrt(acc);
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    // Squared byte differences are integers bounded by 255^2, so the sum fits
    // a 64-bit accumulator exactly and the result is reproducible regardless
    // of summation order.
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(a.samples[i]) - b.samples[i];
        acc += static_cast<std::uint64_t>(d * d);
    }
    return static_cast<double>(acc) / static_cast<double>(a.samples.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    double err = mse(a, b);
    if (err == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(255.0 * 255.0 / err);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    if (a.width < kWindow || a.height < kWindow) {
        throw std::invalid_argument("ssim requires images of at least 11x11");
    }
    ImageBuffer ga = to_gray(a);
    ImageBuffer gb = to_gray(b);

    const int w = a.width;
    const int h = a.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = ga.samples[i];
        y[i] = gb.samples[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }

    const auto kernel = gaussian_kernel();
    auto mu_x = window_means(x, w, h, kernel);
    auto mu_y = window_means(y, w, h, kernel);
    auto e_xx = window_means(xx, w, h, kernel);
    auto e_yy = window_means(yy, w, h, kernel);
    auto e_xy = window_means(xy, w, h, kernel);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        double mx = mu_x[i];
        double my = mu_y[i];
        double var_x = e_xx[i] - mx * mx;
        double var_y = e_yy[i] - my * my;
        double cov = e_xy[i] - mx * my;
        double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
        double den = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
        total += num / den;
    }
    return total / static_cast<double>(mu_x.size());
}

double cosine(const Embedding& u, const Embedding& v) {
    if (u.values.size() != v.values.size()) {
        throw std::invalid_argument("embedding lengths differ");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
    }
    double nu = u.norm();
    double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) {
        throw std::invalid_argument("cosine of a zero vector is undefined");
    }
    return dot / (nu * nv);
}

double clip_score(const ImageBuffer& a, const ImageBuffer& b, Embedder& embedder) {
    Embedding ea = embedder.embed(a);
    Embedding eb = embedder.embed(b);
    double c = cosine(ea, eb);
    double pct = 100.0 * std::max(0.0, c);
    return std::min(pct, 100.0);
}

}  // namespace aquasem
