// Naive reference implementations the library is tested against. These are
// deliberately written as direct double loops over the defining formulas,
// independent of the optimized library code paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "aquasem/image.hpp"
#include "aquasem/rng.hpp"

namespace oracle {

inline double naive_mse(const aquasem::ImageBuffer& a, const aquasem::ImageBuffer& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        double d = static_cast<double>(a.samples[i]) - static_cast<double>(b.samples[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.samples.size());
}

inline double naive_psnr(const aquasem::ImageBuffer& a, const aquasem::ImageBuffer& b) {
    double m = naive_mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

// Gray conversion duplicated from the spec formula rather than calling the
// library, so the SSIM oracle is self-contained.
inline std::vector<double> naive_gray(const aquasem::ImageBuffer& img) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.channels == 1) {
                out.push_back(img.at(x, y, 0));
            } else {
                double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                           0.114 * img.at(x, y, 2);
                out.push_back(std::llround(v));
            }
        }
    }
    return out;
}

// Direct sliding-window SSIM: a full 11x11 Gaussian-weighted window at every
// valid position, no separable shortcuts.
inline double naive_ssim(const aquasem::ImageBuffer& ia, const aquasem::ImageBuffer& ib) {
    constexpr int kWindow = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 6.5025;
    constexpr double kC2 = 58.5225;

    double kernel[kWindow][kWindow];
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        for (int j = 0; j < kWindow; ++j) {
            double di = i - (kWindow - 1) / 2.0;
            double dj = j - (kWindow - 1) / 2.0;
            kernel[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
            total += kernel[i][j];
        }
    }
    for (auto& row : kernel) {
        for (double& w : row) w /= total;
    }

    std::vector<double> a = naive_gray(ia);
    std::vector<double> b = naive_gray(ib);
    const int w = ia.width;
    const int h = ia.height;

    double acc = 0.0;
    int windows = 0;
    for (int y = 0; y + kWindow <= h; ++y) {
        for (int x = 0; x + kWindow <= w; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int i = 0; i < kWindow; ++i) {
                for (int j = 0; j < kWindow; ++j) {
                    mu_a += kernel[i][j] * a[(y + i) * w + (x + j)];
                    mu_b += kernel[i][j] * b[(y + i) * w + (x + j)];
                }
            }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int i = 0; i < kWindow; ++i) {
                for (int j = 0; j < kWindow; ++j) {
                    double da = a[(y + i) * w + (x + j)] - mu_a;
                    double db = b[(y + i) * w + (x + j)] - mu_b;
                    var_a += kernel[i][j] * da * da;
                    var_b += kernel[i][j] * db * db;
                    cov += kernel[i][j] * da * db;
                }
            }
            double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
            double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            acc += num / den;
            ++windows;
        }
    }
    return acc / windows;
}

inline double naive_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// Random test images driven by the library RNG (only the inputs; every
// expected value above is computed independently).
inline aquasem::ImageBuffer random_image(int w, int h, int channels, std::uint64_t seed) {
    aquasem::ImageBuffer img = aquasem::ImageBuffer::make(w, h, channels);
    aquasem::Splitmix64 rng(seed);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng.next() & 0xFF);
    return img;
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0.0, equal = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) ++less;
                if (v[j] == v[i]) ++equal;
            }
            r[i] = less + (equal + 1.0) / 2.0;
        }
        return r;
    };
    std::vector<double> rx = ranks(xs);
    std::vector<double> ry = ranks(ys);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

}  // namespace oracle
