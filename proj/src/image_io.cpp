#include "dualot/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dualot {
namespace {

// Next whitespace-delimited token of a PGM header, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
      if (!tok.empty()) return tok;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

std::size_t parse_size(const std::string& tok, const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw std::runtime_error(std::string("PGM: bad ") + what + " '" + tok + "'");
  }
  return v;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return false;
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size();
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw std::runtime_error(path.string() + ": not a P2/P5 PGM");
  Image img;
  img.width = parse_size(next_token(in), "width");
  img.height = parse_size(next_token(in), "height");
  const std::size_t maxval = parse_size(next_token(in), "maxval");
  if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 65535) {
    throw std::runtime_error(path.string() + ": invalid PGM header");
  }
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = img.width * img.height;
  img.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t k = 0; k < count; ++k) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw std::runtime_error(path.string() + ": truncated pixel data");
      img.pixels[k] = static_cast<double>(parse_size(tok, "pixel"));
    }
  } else {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(count * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw std::runtime_error(path.string() + ": truncated pixel data");
    }
    for (std::size_t k = 0; k < count; ++k) {
      img.pixels[k] = bytes == 1 ? raw[k] : static_cast<double>((raw[2 * k] << 8) | raw[2 * k + 1]);
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& image, bool ascii) {
  if (image.pixels.size() != image.width * image.height) {
    throw std::invalid_argument("image pixel count does not match its dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (ascii ? "P2" : "P5") << '\n' << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  auto quantize = [&](double v) {
    return static_cast<unsigned>(std::clamp(std::round(v), 0.0, static_cast<double>(image.maxval)));
  };
  if (ascii) {
    for (std::size_t r = 0; r < image.height; ++r) {
      for (std::size_t c = 0; c < image.width; ++c) {
        out << quantize(image.at(r, c)) << (c + 1 == image.width ? '\n' : ' ');
      }
    }
  } else {
    for (double v : image.pixels) {
      const unsigned q = quantize(v);
      if (image.maxval < 256) {
        out.put(static_cast<char>(q));
      } else {
        out.put(static_cast<char>(q >> 8));
        out.put(static_cast<char>(q & 0xff));
      }
    }
  }
}

Histogram ingest_image_histogram(std::span<const double> pixels, double perturbation) {
  if (perturbation < 0.0) throw std::invalid_argument("perturbation must be >= 0");
  bool any_positive = false;
  for (double p : pixels) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("pixels must be finite and >= 0");
    any_positive = any_positive || p > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("image has no positive pixel");
  std::vector<double> w(pixels.begin(), pixels.end());
  for (double& v : w) v += perturbation;
  return Histogram::normalized(std::move(w));
}

Image downsample(const Image& image, std::size_t factor) {
  if (factor == 0 || image.width % factor != 0 || image.height % factor != 0) {
    throw std::invalid_argument("downsample factor must divide both image dimensions");
  }
  Image out;
  out.width = image.width / factor;
  out.height = image.height / factor;
  out.maxval = image.maxval;
  out.pixels.assign(out.width * out.height, 0.0);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      double sum = 0.0;
      for (std::size_t dr = 0; dr < factor; ++dr) {
        for (std::size_t dc = 0; dc < factor; ++dc) sum += image.at(r * factor + dr, c * factor + dc);
      }
      out.pixels[r * out.width + c] = sum * inv;
    }
  }
  return out;
}

Image histogram_to_image(const Histogram& h, std::size_t width, std::size_t height, int maxval) {
  if (width * height != h.size()) throw std::invalid_argument("histogram size does not match grid");
  Image img{width, height, maxval, {}};
  const double peak = h.empty() ? 0.0 : *std::max_element(h.vector().begin(), h.vector().end());
  img.pixels.resize(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) img.pixels[k] = peak > 0.0 ? h[k] / peak * maxval : 0.0;
  return img;
}

std::vector<double> read_values_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s(line);
    if (s.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    double v = 0.0;
    if (!parse_double(s, v)) {
      if (lineno == 1) continue;  // header
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
    values.push_back(v);
  }
  return values;
}

void write_values_csv(const std::filesystem::path& path, std::span<const double> values,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (!header.empty()) out << header << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

std::vector<std::vector<double>> read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (lineno == 1) continue;
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not numeric");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_matrix_csv(const std::filesystem::path& path, const DenseCoupling& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << format_double(m(i, j)) << (j + 1 == m.cols() ? '\n' : ',');
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace dualot
