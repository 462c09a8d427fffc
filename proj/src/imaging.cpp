#include "vgmm/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "vgmm/errors.hpp"

#ifdef VGMM_WITH_PNG
#include <png.h>
#endif

namespace vgmm {

namespace {

constexpr int kStripHeight = 16;

// Next whitespace-separated header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

int pnm_int(std::istream& in, const std::string& what) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid PNM " + what + " '" + tok + "'");
  }
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P6") throw InputError(path.string() + ": unsupported PNM type '" + magic + "'");
  Image img;
  img.channels = magic == "P6" ? 3 : 1;
  img.width = pnm_int(in, "width");
  img.height = pnm_int(in, "height");
  const int maxval = pnm_int(in, "maxval");
  if (maxval > 65535) throw InputError(path.string() + ": maxval above 65535");
  const std::size_t samples = static_cast<std::size_t>(img.width) * img.height * img.channels;
  const int bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(samples * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw InputError(path.string() + ": truncated pixel data");
  img.data.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const unsigned v = bytes == 1 ? raw[k] : (static_cast<unsigned>(raw[2 * k]) << 8) | raw[2 * k + 1];
    img.data[k] = static_cast<double>(std::min<unsigned>(v, static_cast<unsigned>(maxval))) / maxval;
  }
  return img;
}

#ifdef VGMM_WITH_PNG
Image read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
    throw InputError(path.string() + ": " + png.message);
  }
  const bool colour = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw InputError(path.string() + ": " + msg);
  }
  Image img;
  img.width = static_cast<int>(png.width);
  img.height = static_cast<int>(png.height);
  img.channels = colour ? 3 : 1;
  img.data.reserve(buffer.size());
  for (png_byte b : buffer) img.data.push_back(b / 255.0);
  return img;
}
#endif

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void require_grid(const GridSpec& grid, Eigen::Index model_dim) {
  if (grid.dim() != 1 && grid.dim() != 2) throw InputError("rasterization supports 1D and 2D grids only");
  if (static_cast<Eigen::Index>(grid.dim()) != model_dim) {
    std::ostringstream os;
    os << "grid is " << grid.dim() << "D but the model is " << model_dim << "D";
    throw InputError(os.str());
  }
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    if (grid.count[a] <= 0 || !(grid.hi[a] > grid.lo[a])) throw InputError("grid axes need hi > lo and count > 0");
  }
}

struct Weighted {
  double weight;
  const Gaussian* gaussian;
};

DensityGrid sample(const std::vector<std::vector<Weighted>>& layers, const GridSpec& grid) {
  DensityGrid out;
  const auto d = static_cast<Eigen::Index>(grid.dim());
  out.origin.resize(d);
  out.spacing.resize(d);
  out.shape = grid.count;
  for (Eigen::Index a = 0; a < d; ++a) {
    out.spacing(a) = (grid.hi[a] - grid.lo[a]) / grid.count[a];
    out.origin(a) = grid.lo[a] + 0.5 * out.spacing(a);
  }
  const int nx = grid.count[0];
  const int ny = d == 2 ? grid.count[1] : 1;
  for (const auto& layer : layers) {
    std::vector<double> values(static_cast<std::size_t>(nx) * ny, 0.0);
    Vector x(d);
    for (int row = 0; row < ny; ++row) {
      for (int col = 0; col < nx; ++col) {
        x(0) = out.origin(0) + col * out.spacing(0);
        if (d == 2) x(1) = out.origin(1) + row * out.spacing(1);
        double v = 0.0;
        for (const Weighted& w : layer) v += w.weight * density(*w.gaussian, x);
        values[static_cast<std::size_t>(row) * nx + col] = v;
      }
    }
    out.channels.push_back(std::move(values));
  }
  return out;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
  if (ext == ".png") {
#ifdef VGMM_WITH_PNG
    return read_png(path);
#else
    throw InputError(path.string() + ": PNG support was not enabled in this build");
#endif
  }
  throw InputError(path.string() + ": unsupported image format '" + ext + "'");
}

void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw InputError("pixel buffer size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

ChannelSamples image_to_channels(const Image& image) {
  if (image.channels != 1 && image.channels != 3) throw InputError("images must have 1 or 3 channels");
  ChannelSamples out;
  out.masses = Vector::Zero(image.channels);
  for (int c = 0; c < image.channels; ++c) {
    std::vector<std::pair<Eigen::Index, double>> lit;
    for (int row = 0; row < image.height; ++row)
      for (int col = 0; col < image.width; ++col)
        if (const double v = image.at(col, row, c); v > 0.0) lit.emplace_back(static_cast<Eigen::Index>(row) * image.width + col, v);
    WeightedSamples s{Matrix(static_cast<Eigen::Index>(lit.size()), 2), Vector(static_cast<Eigen::Index>(lit.size()))};
    for (std::size_t k = 0; k < lit.size(); ++k) {
      const auto [index, v] = lit[k];
      s.points(static_cast<Eigen::Index>(k), 0) = static_cast<double>(index % image.width) + 0.5;
      s.points(static_cast<Eigen::Index>(k), 1) = static_cast<double>(index / image.width) + 0.5;
      s.weights(static_cast<Eigen::Index>(k)) = v;
    }
    out.masses(c) = s.weights.sum();
    out.channels.push_back(std::move(s));
  }
  if (!(out.masses.sum() > 0.0)) throw InputError("image has zero total mass");
  return out;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec out;
  std::stringstream axes(text);
  std::string axis;
  while (std::getline(axes, axis, ',')) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(axis);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
      throw InputError("grid axis '" + axis + "' is not of the form lo:hi:count");
    }
    if (!(hi > lo) || n <= 0) throw InputError("grid axis '" + axis + "' needs hi > lo and count > 0");
    out.lo.push_back(lo);
    out.hi.push_back(hi);
    out.count.push_back(n);
  }
  if (out.dim() != 1 && out.dim() != 2) throw InputError("grid must have one or two axes");
  return out;
}

double DensityGrid::cell_volume() const { return spacing.prod(); }

double DensityGrid::max_value() const {
  double m = 0.0;
  for (const auto& ch : channels)
    for (double v : ch) m = std::max(m, v);
  return m;
}

double DensityGrid::channel_mass(std::size_t channel) const {
  double total = 0.0;
  for (double v : channels.at(channel)) total += v;
  return total * cell_volume();
}

DensityGrid rasterize(const VectorInterpolant& model, const GridSpec& grid) {
  require_grid(grid, model.dim());
  const int m = model.graph().node_count();
  std::vector<std::vector<Weighted>> layers(static_cast<std::size_t>(m));
  for (const PlacedComponent& c : model.components()) {
    const Vector share = delta_vector(c.position, m);
    for (int ch = 0; ch < m; ++ch)
      if (share(ch) > 0.0) layers[static_cast<std::size_t>(ch)].push_back({c.weight * share(ch), &c.gaussian});
  }
  return sample(layers, grid);
}

DensityGrid rasterize(const VectorMixtureModel& model, const GridSpec& grid) {
  return rasterize(VectorInterpolant::from_model(model), grid);
}

DensityGrid rasterize(const MixtureModel& model, const GridSpec& grid) {
  return rasterize_layers({model.components()}, model.dim(), grid);
}

DensityGrid rasterize_layers(const std::vector<std::vector<Component>>& layers, Eigen::Index dim,
                             const GridSpec& grid) {
  require_grid(grid, dim);
  std::vector<std::vector<Weighted>> refs;
  for (const auto& layer : layers) {
    std::vector<Weighted> items;
    for (const Component& c : layer) {
      if (c.gaussian.dim() != dim) throw InputError("layer component dimension does not match the grid");
      items.push_back({c.weight, &c.gaussian});
    }
    refs.push_back(std::move(items));
  }
  return sample(refs, grid);
}

std::vector<std::uint8_t> frame_pixels(const DensityGrid& grid, double global_max, int& width, int& height) {
  const std::size_t m = grid.channels.size();
  if (m == 0 || m > 3) throw InputError("frames support 1 to 3 channels, got " + std::to_string(m));
  const bool one_d = grid.shape.size() == 1;
  width = grid.shape[0];
  height = one_d ? kStripHeight : grid.shape[1];
  // Channel -> RGB slot.
  std::vector<std::vector<int>> slots;
  if (m == 1) slots = {{0, 1, 2}};
  if (m == 2) slots = {{0}, {2}};
  if (m == 3) slots = {{0}, {1}, {2}};

  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3, 0);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const std::size_t src = one_d ? static_cast<std::size_t>(col) : static_cast<std::size_t>(row) * width + col;
      for (std::size_t ch = 0; ch < m; ++ch) {
        const double v = global_max > 0.0 ? grid.channels[ch][src] / global_max : 0.0;
        const auto byte = static_cast<std::uint8_t>(std::clamp<long>(std::lround(255.0 * v), 0, 255));
        for (int slot : slots[ch]) rgb[(static_cast<std::size_t>(row) * width + col) * 3 + slot] = byte;
      }
    }
  }
  return rgb;
}

std::vector<std::filesystem::path> write_frames(const std::vector<DensityGrid>& frames,
                                                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
  double global_max = 0.0;
  for (const DensityGrid& g : frames) global_max = std::max(global_max, g.max_value());
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    int w = 0, h = 0;
    const auto rgb = frame_pixels(frames[k], global_max, w, h);
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu.ppm", k);
    paths.push_back(out_dir / name);
    write_ppm(paths.back(), w, h, rgb);
  }
  return paths;
}

}  // namespace vgmm
