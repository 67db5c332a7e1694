#pragma once

#include "lart/imaging/raster.hpp"

namespace lart::imaging {

/// Separable Gaussian blur with a kernel truncated at ceil(3 sigma) and
/// clamp-replicated borders. Throws on sigma <= 0 or multi-channel input.
RealImage gaussian_smooth(const RealImage& img, double sigma);
RealImage gaussian_smooth(const GrayImage& img, double sigma);

/// 3x3 Sobel gradient magnitude, clamp-replicated borders.
/// Throws if the image is smaller than 3x3.
EdgeMap sobel_edges(const RealImage& img);

/// Gaussian smoothing followed by Sobel magnitude.
EdgeMap structural_edges(const GrayImage& img, double sigma = 1.0);

std::vector<double> gaussian_kernel(double sigma);

}  // namespace lart::imaging
