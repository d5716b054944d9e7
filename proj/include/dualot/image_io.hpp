#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dualot/core.hpp"

namespace dualot {

/// Grayscale raster, row-major. Pixel values are kept as doubles so that
/// block means survive without rounding until the image is written out.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  int maxval = 255;
  std::vector<double> pixels;

  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// Reads P2 (ASCII) or P5 (binary, 8 or 16 bit) PGM. Throws std::runtime_error.
Image read_pgm(const std::filesystem::path& path);
/// Writes P2 when `ascii`, else P5. Pixels are rounded and clamped to [0, maxval].
void write_pgm(const std::filesystem::path& path, const Image& image, bool ascii = false);

/// Adds `perturbation` to every pixel and normalizes, in row-major order.
/// Throws std::invalid_argument when no pixel is positive.
Histogram ingest_image_histogram(std::span<const double> pixels, double perturbation = 1e-6);
inline Histogram ingest_image_histogram(const Image& image, double perturbation = 1e-6) {
  return ingest_image_histogram(image.pixels, perturbation);
}

/// Block-mean downsampling by an integer factor that divides both dimensions.
Image downsample(const Image& image, std::size_t factor);

/// Renders a histogram on a width x height grid, scaled so the peak maps to maxval.
Image histogram_to_image(const Histogram& h, std::size_t width, std::size_t height, int maxval = 255);

/// One value per line; a non-numeric first line is treated as a header.
std::vector<double> read_values_csv(const std::filesystem::path& path);
void write_values_csv(const std::filesystem::path& path, std::span<const double> values,
                      const std::string& header = "");

/// Comma-separated rows of numbers; returns the rows in file order.
std::vector<std::vector<double>> read_table_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const DenseCoupling& m);

/// Formats with enough digits to round-trip a double.
std::string format_double(double v);

}  // namespace dualot
