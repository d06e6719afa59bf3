#include "radarbev/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "radarbev/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace rbev {

namespace {

class Writer {
  public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), std::streamsize(n));
    }
    template <typename T>
    void pod(T v) {
        bytes(&v, sizeof(T));
    }
    void magic(const char m[4]) { bytes(m, 4); }
    void finish(const std::string& path) {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path);
    }

  private:
    std::ofstream out_;
};

class Reader {
  public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open for reading: " + path);
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), std::streamsize(n));
        if (std::size_t(in_.gcount()) != n)
            throw FormatError("truncated file: " + path_);
    }
    template <typename T>
    T pod() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }
    void expect_magic(const char m[4]) {
        char got[4];
        bytes(got, 4);
        if (std::memcmp(got, m, 4) != 0)
            throw FormatError("bad magic in " + path_);
    }
    void expect_version(std::uint8_t v) {
        const auto got = pod<std::uint8_t>();
        if (got != v)
            throw FormatError("unsupported version " + std::to_string(got) + " in " +
                              path_);
    }

  private:
    std::string path_;
    std::ifstream in_;
};

}  // namespace

void write_rsiq(const std::string& path, const IqFrame& frame) {
    frame.validate();
    Writer w(path);
    w.magic("RSIQ");
    w.pod<std::uint8_t>(1);
    w.pod(frame.n_chirps);
    w.pod(frame.n_rx);
    w.pod(frame.n_samples);
    w.bytes(frame.data.data(), frame.data.size() * sizeof(std::complex<float>));
    w.finish(path);
}

IqFrame read_rsiq(const std::string& path) {
    Reader r(path);
    r.expect_magic("RSIQ");
    r.expect_version(1);
    IqFrame frame;
    frame.n_chirps = r.pod<std::uint32_t>();
    frame.n_rx = r.pod<std::uint32_t>();
    frame.n_samples = r.pod<std::uint32_t>();
    if (frame.n_chirps == 0 || frame.n_rx == 0 || frame.n_samples == 0 ||
        frame.expected_size() > (1u << 28))
        throw FormatError("implausible dimensions in " + path);
    frame.data.resize(frame.expected_size());
    r.bytes(frame.data.data(), frame.data.size() * sizeof(std::complex<float>));
    try {
        frame.validate();
    } catch (const Error& e) {
        throw FormatError(std::string("invalid frame in ") + path + ": " + e.what());
    }
    return frame;
}

void write_rsbev(const std::string& path, const PolarBev& bev) {
    Writer w(path);
    w.magic("RSBV");
    w.pod<std::uint8_t>(1);
    w.pod(bev.n_range);
    w.pod(bev.n_azimuth);
    w.pod(bev.range_res);
    w.pod(bev.fov);
    w.bytes(bev.values.data(), bev.values.size() * sizeof(float));
    w.finish(path);
}

PolarBev read_rsbev(const std::string& path) {
    Reader r(path);
    r.expect_magic("RSBV");
    r.expect_version(1);
    PolarBev bev;
    bev.n_range = r.pod<std::uint32_t>();
    bev.n_azimuth = r.pod<std::uint32_t>();
    bev.range_res = r.pod<float>();
    bev.fov = r.pod<float>();
    if (bev.n_range == 0 || bev.n_azimuth == 0 ||
        std::size_t(bev.n_range) * bev.n_azimuth > (1u << 28))
        throw FormatError("implausible dimensions in " + path);
    bev.values.resize(std::size_t(bev.n_range) * bev.n_azimuth);
    r.bytes(bev.values.data(), bev.values.size() * sizeof(float));
    return bev;
}

namespace {

void write_pgm_impl(const std::string& path, const float* values, std::uint32_t width,
                    std::uint32_t height) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    std::vector<std::uint8_t> row(width);
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            const double v = double(values[std::size_t(y) * width + x]) * 255.0;
            // nearbyint under the default FE_TONEAREST mode = half-to-even
            row[x] = std::uint8_t(std::min(255.0, std::max(0.0, std::nearbyint(v))));
        }
        out.write(reinterpret_cast<const char*>(row.data()), width);
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_pgm(const std::string& path, const PolarBev& bev) {
    write_pgm_impl(path, bev.values.data(), bev.n_azimuth, bev.n_range);
}

void write_pgm(const std::string& path, const CartesianRaster& raster) {
    write_pgm_impl(path, raster.values.data(), raster.width, raster.height);
}

void write_rslat(const std::string& path, const LatentTensor& z) {
    Writer w(path);
    w.magic("RSLT");
    w.pod(z.c);
    w.pod(z.h);
    w.pod(z.w);
    w.bytes(z.v.data(), z.v.size() * sizeof(float));
    w.finish(path);
}

LatentTensor read_rslat(const std::string& path) {
    Reader r(path);
    r.expect_magic("RSLT");
    LatentTensor z;
    z.c = r.pod<std::uint32_t>();
    z.h = r.pod<std::uint32_t>();
    z.w = r.pod<std::uint32_t>();
    if (z.c == 0 || z.h == 0 || z.w == 0 ||
        std::size_t(z.c) * z.h * z.w > (1u << 28))
        throw FormatError("implausible dimensions in " + path);
    z.v.resize(std::size_t(z.c) * z.h * z.w);
    r.bytes(z.v.data(), z.v.size() * sizeof(float));
    return z;
}

void write_rsckpt(const std::string& path, const Checkpoint& ckpt) {
    if (ckpt.params.size() != ckpt.adam_m.size() ||
        ckpt.params.size() != ckpt.adam_v.size())
        throw ShapeMismatch("checkpoint: parameter/optimizer size mismatch");
    Writer w(path);
    w.magic("RSCK");
    w.pod<std::uint8_t>(1);
    w.pod(ckpt.arch_hash);
    w.pod(ckpt.T);
    w.pod(ckpt.beta_start);
    w.pod(ckpt.beta_end);
    w.pod(ckpt.latent_scale);
    w.pod<std::uint8_t>(ckpt.use_beta_variance ? 1 : 0);
    w.pod(ckpt.train_step);
    w.pod(std::uint32_t(ckpt.params.size()));
    w.bytes(ckpt.params.data(), ckpt.params.size() * sizeof(float));
    w.bytes(ckpt.adam_m.data(), ckpt.adam_m.size() * sizeof(float));
    w.bytes(ckpt.adam_v.data(), ckpt.adam_v.size() * sizeof(float));
    w.pod(ckpt.adam_step);
    for (auto s : ckpt.rng_state) w.pod(s);
    w.finish(path);
}

Checkpoint read_rsckpt(const std::string& path) {
    Reader r(path);
    r.expect_magic("RSCK");
    r.expect_version(1);
    Checkpoint c;
    c.arch_hash = r.pod<std::uint64_t>();
    c.T = r.pod<std::uint32_t>();
    c.beta_start = r.pod<double>();
    c.beta_end = r.pod<double>();
    c.latent_scale = r.pod<float>();
    c.use_beta_variance = r.pod<std::uint8_t>() != 0;
    c.train_step = r.pod<std::uint64_t>();
    const auto n = r.pod<std::uint32_t>();
    if (n == 0 || n > (1u << 26)) throw FormatError("implausible parameter count");
    c.params.resize(n);
    c.adam_m.resize(n);
    c.adam_v.resize(n);
    r.bytes(c.params.data(), n * sizeof(float));
    r.bytes(c.adam_m.data(), n * sizeof(float));
    r.bytes(c.adam_v.data(), n * sizeof(float));
    c.adam_step = r.pod<std::uint64_t>();
    for (auto& s : c.rng_state) s = r.pod<std::uint64_t>();
    return c;
}

void write_points_csv(const std::string& path, const PointCloud2D& pc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "x_m,y_m\n";
    char buf[80];
    for (const auto& p : pc.points) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.x, p.y);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

PointCloud2D read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty CSV: " + path);
    if (line.rfind("x_m,y_m", 0) != 0)
        throw FormatError("unexpected CSV header in " + path);
    PointCloud2D pc;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x = 0, y = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) != 2)
            throw FormatError("bad CSV row in " + path + ": " + line);
        pc.points.push_back({x, y});
    }
    return pc;
}

void write_points_ply(const std::string& path, const PointCloud2D& pc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "ply\nformat ascii 1.0\nelement vertex " << pc.points.size()
        << "\nproperty float x\nproperty float y\nend_header\n";
    char buf[80];
    for (const auto& p : pc.points) {
        std::snprintf(buf, sizeof(buf), "%.6f %.6f\n", p.x, p.y);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace rbev
