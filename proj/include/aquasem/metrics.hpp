#pragma once

#include <vector>

#include "aquasem/image.hpp"

namespace aquasem {

class Embedder;

struct Embedding {
    std::vector<double> values;

    double norm() const;
};

struct MetricReport {
    double psnr_db = 0.0;  // +infinity when the images are identical
    double ssim = 0.0;
    double clip_score_pct = 0.0;
};

// Mean squared sample difference over every stored sample, in double
// precision. Throws std::invalid_argument on shape mismatch.
double mse(const ImageBuffer& a, const ImageBuffer& b);

// 10 * log10(255^2 / mse); +infinity for identical images. Computed over the
// samples as stored, all channels jointly.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Structural similarity on the luma of both inputs. 11x11 Gaussian window
// with sigma 1.5, C1 = (0.01*255)^2, C2 = (0.03*255)^2, averaged over
// windows lying fully inside the image. Requires equal width/height, both
// at least 11.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

// dot(u,v) / (|u| |v|). Throws on length mismatch or a zero vector.
double cosine(const Embedding& u, const Embedding& v);

// 100 * max(0, cosine(embed(a), embed(b))), clamped to the 0-100 range.
double clip_score(const ImageBuffer& a, const ImageBuffer& b, Embedder& embedder);

}  // namespace aquasem
