#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vgmm/em.hpp"
#include "vgmm/gmm_ot.hpp"
#include "vgmm/vector_gmm_ot.hpp"

namespace vgmm {

/// Row-major, channel-interleaved image with intensities scaled to [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  double at(int col, int row, int channel) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
};

/// Reads binary PPM/PGM (P6/P5, 8 or 16 bit) and, when built with libpng,
/// PNG files. Throws InputError on unsupported or corrupt files.
Image read_image(const std::filesystem::path& path);

/// Writes an 8-bit binary PPM (P6).
void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb);

struct ChannelSamples {
  std::vector<WeightedSamples> channels;  // intensities as weights at pixel centres
  Vector masses;                          // summed intensity per channel
};

/// Pixel (col, row) becomes the point (col + 0.5, row + 0.5) with weight equal
/// to its intensity. Throws InputError for an all-black image.
ChannelSamples image_to_channels(const Image& image);

/// Axis-aligned sampling grid; sample k of an axis sits at the centre of
/// cell k: lo + (k + 0.5) * (hi - lo) / count.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> count;

  std::size_t dim() const { return count.size(); }
};

/// Parses "x0:x1:nx" or "x0:x1:nx,y0:y1:ny".
GridSpec parse_grid(const std::string& text);

/// Sampled channel densities. For 2D grids x varies fastest (columns) and y
/// indexes rows.
struct DensityGrid {
  Vector origin;
  Vector spacing;
  std::vector<int> shape;
  std::vector<std::vector<double>> channels;

  double cell_volume() const;
  double max_value() const;
  /// Riemann sum of one channel.
  double channel_mass(std::size_t channel) const;
};

/// channels[m](x) = sum_i w_i * delta_vector(position_i)[m] * density(nu_i, x).
DensityGrid rasterize(const VectorInterpolant& model, const GridSpec& grid);
DensityGrid rasterize(const VectorMixtureModel& model, const GridSpec& grid);
/// Single-channel rendering of a scalar mixture.
DensityGrid rasterize(const MixtureModel& model, const GridSpec& grid);
/// One channel per component list (used for original + source layers).
DensityGrid rasterize_layers(const std::vector<std::vector<Component>>& layers, Eigen::Index dim,
                             const GridSpec& grid);

/// RGB pixels of a grid scaled by `global_max`: byte = round(255 * v / max).
/// One channel renders grey, two render red and blue, three render RGB. 1D
/// grids become 16-pixel-tall strips.
std::vector<std::uint8_t> frame_pixels(const DensityGrid& grid, double global_max, int& width, int& height);

/// Writes frame_000.ppm ... with a normalization shared by the whole
/// sequence. Returns the written paths.
std::vector<std::filesystem::path> write_frames(const std::vector<DensityGrid>& frames,
                                                const std::filesystem::path& out_dir);

}  // namespace vgmm
