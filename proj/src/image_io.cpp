#include "clumpsplit/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace clumpsplit {

namespace {

constexpr unsigned char png_signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read failure on " + path);
    return data;
}

void write_file(const std::string& path, const std::vector<unsigned char>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw io_error("write failure on " + path);
}

std::string lower_extension(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// ---------------------------------------------------------------------------
// PNG

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

std::uint32_t get_u32(const unsigned char* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void append_chunk(std::vector<unsigned char>& out, const char type[4],
                  const std::vector<unsigned char>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + payload.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<unsigned char> zlib_deflate(const std::vector<unsigned char>& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw io_error("deflate failed");
    compressed.resize(bound);
    return compressed;
}

std::vector<unsigned char> zlib_inflate(const std::vector<unsigned char>& compressed,
                                        std::size_t expected_size) {
    std::vector<unsigned char> raw(expected_size);
    uLongf size = static_cast<uLongf>(expected_size);
    if (uncompress(raw.data(), &size, compressed.data(),
                   static_cast<uLong>(compressed.size())) != Z_OK ||
        size != expected_size)
        throw io_error("corrupt PNG stream");
    return raw;
}

void write_png(const std::string& path, int width, int height, int bit_depth, int color_type,
               const std::vector<unsigned char>& samples) {
    const std::size_t channels = color_type == 2 ? 3 : 1;
    const std::size_t row_bytes =
        static_cast<std::size_t>(width) * channels * (bit_depth == 16 ? 2 : 1);

    std::vector<unsigned char> raw;
    raw.reserve((row_bytes + 1) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0); // filter: none
        const unsigned char* row = samples.data() + static_cast<std::size_t>(y) * row_bytes;
        raw.insert(raw.end(), row, row + row_bytes);
    }

    std::vector<unsigned char> out(png_signature, png_signature + 8);
    std::vector<unsigned char> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<unsigned char>(bit_depth));
    ihdr.push_back(static_cast<unsigned char>(color_type));
    ihdr.push_back(0); // compression
    ihdr.push_back(0); // filter method
    ihdr.push_back(0); // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_deflate(raw));
    append_chunk(out, "IEND", {});
    write_file(path, out);
}

struct PngImage {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    int color_type = 0;
    std::vector<unsigned char> samples; // unfiltered scanline bytes
};

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    return pb <= pc ? b : c;
}

PngImage read_png(const std::string& path, const std::vector<unsigned char>& data) {
    if (data.size() < 8 || std::memcmp(data.data(), png_signature, 8) != 0)
        throw io_error(path + ": not a PNG file");

    PngImage img;
    std::vector<unsigned char> idat;
    std::size_t pos = 8;
    bool saw_ihdr = false, saw_iend = false;
    while (pos + 12 <= data.size() && !saw_iend) {
        const std::uint32_t len = get_u32(data.data() + pos);
        if (pos + 12 + len > data.size()) throw io_error(path + ": truncated PNG");
        const char* type = reinterpret_cast<const char*>(data.data() + pos + 4);
        const unsigned char* payload = data.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw io_error(path + ": bad IHDR");
            img.width = static_cast<int>(get_u32(payload));
            img.height = static_cast<int>(get_u32(payload + 4));
            img.bit_depth = payload[8];
            img.color_type = payload[9];
            if (payload[12] != 0) throw io_error(path + ": interlaced PNG unsupported");
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr || !saw_iend || idat.empty()) throw io_error(path + ": truncated PNG");
    if (img.width < 1 || img.height < 1) throw io_error(path + ": bad PNG dimensions");
    if (img.color_type != 0 && img.color_type != 2)
        throw io_error(path + ": only grayscale and RGB PNGs are supported");
    if (img.bit_depth != 8 && img.bit_depth != 16)
        throw io_error(path + ": only 8- and 16-bit PNGs are supported");
    if (img.color_type == 2 && img.bit_depth != 8)
        throw io_error(path + ": only 8-bit RGB PNGs are supported");

    const std::size_t channels = img.color_type == 2 ? 3 : 1;
    const std::size_t pixel_bytes = channels * (img.bit_depth == 16 ? 2 : 1);
    const std::size_t row_bytes = static_cast<std::size_t>(img.width) * pixel_bytes;
    const std::size_t expected = (row_bytes + 1) * static_cast<std::size_t>(img.height);
    std::vector<unsigned char> raw = zlib_inflate(idat, expected);

    img.samples.resize(row_bytes * static_cast<std::size_t>(img.height));
    std::vector<unsigned char> prev(row_bytes, 0);
    for (int y = 0; y < img.height; ++y) {
        const unsigned char* src = raw.data() + static_cast<std::size_t>(y) * (row_bytes + 1);
        unsigned char* dst = img.samples.data() + static_cast<std::size_t>(y) * row_bytes;
        const unsigned char filter = src[0];
        ++src;
        const std::size_t bpp = pixel_bytes;
        for (std::size_t i = 0; i < row_bytes; ++i) {
            const int left = i >= bpp ? dst[i - bpp] : 0;
            const int up = prev[i];
            const int up_left = i >= bpp ? prev[i - bpp] : 0;
            int v = src[i];
            switch (filter) {
            case 0: break;
            case 1: v += left; break;
            case 2: v += up; break;
            case 3: v += (left + up) / 2; break;
            case 4: v += paeth(left, up, up_left); break;
            default: throw io_error(path + ": bad PNG filter");
            }
            dst[i] = static_cast<unsigned char>(v & 0xff);
        }
        std::copy(dst, dst + row_bytes, prev.begin());
    }
    return img;
}

// ---------------------------------------------------------------------------
// PGM (P2/P5, maxval up to 65535; binary data big-endian per netpbm)

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::vector<std::uint32_t> values;
};

PgmImage read_pgm(const std::string& path, const std::vector<unsigned char>& data) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(data[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto next_int = [&]() -> long {
        skip_space();
        long v = 0;
        bool any = false;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + (data[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) throw io_error(path + ": malformed PGM header");
        return v;
    };

    if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
        throw io_error(path + ": not a PGM file");
    const bool binary = data[1] == '5';
    pos = 2;
    PgmImage img;
    img.width = static_cast<int>(next_int());
    img.height = static_cast<int>(next_int());
    img.maxval = static_cast<int>(next_int());
    if (img.width < 1 || img.height < 1 || img.maxval < 1 || img.maxval > 65535)
        throw io_error(path + ": bad PGM header");

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.values.resize(n);
    if (binary) {
        ++pos; // single whitespace after maxval
        const std::size_t sample_bytes = img.maxval > 255 ? 2 : 1;
        if (pos + n * sample_bytes > data.size()) throw io_error(path + ": truncated PGM");
        for (std::size_t i = 0; i < n; ++i) {
            if (sample_bytes == 1)
                img.values[i] = data[pos + i];
            else
                img.values[i] = (static_cast<std::uint32_t>(data[pos + 2 * i]) << 8) |
                                data[pos + 2 * i + 1];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) img.values[i] = static_cast<std::uint32_t>(next_int());
    }
    return img;
}

void write_pgm(const std::string& path, int width, int height, int maxval,
               const std::vector<std::uint32_t>& values) {
    std::vector<unsigned char> out;
    std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                         std::to_string(maxval) + "\n";
    out.insert(out.end(), header.begin(), header.end());
    for (std::uint32_t v : values) {
        if (maxval > 255) out.push_back(static_cast<unsigned char>(v >> 8));
        out.push_back(static_cast<unsigned char>(v & 0xff));
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// TIFF (minimal: single-strip-or-multi-strip uncompressed 8-bit grayscale)

struct TiffReader {
    const std::vector<unsigned char>& data;
    bool little_endian;
    const std::string& path;

    std::uint16_t u16(std::size_t at) const {
        if (at + 2 > data.size()) throw io_error(path + ": truncated TIFF");
        return little_endian
                   ? static_cast<std::uint16_t>(data[at] | (data[at + 1] << 8))
                   : static_cast<std::uint16_t>((data[at] << 8) | data[at + 1]);
    }
    std::uint32_t u32(std::size_t at) const {
        if (at + 4 > data.size()) throw io_error(path + ": truncated TIFF");
        if (little_endian)
            return static_cast<std::uint32_t>(data[at]) | (static_cast<std::uint32_t>(data[at + 1]) << 8) |
                   (static_cast<std::uint32_t>(data[at + 2]) << 16) |
                   (static_cast<std::uint32_t>(data[at + 3]) << 24);
        return (static_cast<std::uint32_t>(data[at]) << 24) |
               (static_cast<std::uint32_t>(data[at + 1]) << 16) |
               (static_cast<std::uint32_t>(data[at + 2]) << 8) |
               static_cast<std::uint32_t>(data[at + 3]);
    }
};

GrayImage read_tiff_gray(const std::string& path, const std::vector<unsigned char>& data) {
    if (data.size() < 8) throw io_error(path + ": truncated TIFF");
    const bool little = data[0] == 'I' && data[1] == 'I';
    TiffReader rd{data, little, path};
    if (rd.u16(2) != 42) throw io_error(path + ": not a TIFF file");

    const std::uint32_t ifd = rd.u32(4);
    const std::uint16_t entries = rd.u16(ifd);

    std::uint32_t width = 0, height = 0, bits = 1, compression = 1, photometric = 1;
    std::uint32_t rows_per_strip = 0xffffffff, samples = 1;
    std::vector<std::uint32_t> strip_offsets, strip_counts;

    auto read_values = [&](std::size_t entry, std::vector<std::uint32_t>& out) {
        const std::uint16_t type = rd.u16(entry + 2);
        const std::uint32_t count = rd.u32(entry + 4);
        const std::size_t size = type == 3 ? 2 : 4; // SHORT or LONG
        const std::size_t total = size * count;
        std::size_t at = entry + 8;
        if (total > 4) at = rd.u32(entry + 8);
        for (std::uint32_t i = 0; i < count; ++i)
            out.push_back(type == 3 ? rd.u16(at + 2 * i) : rd.u32(at + 4 * i));
    };
    auto first_value = [&](std::size_t entry) {
        std::vector<std::uint32_t> v;
        read_values(entry, v);
        return v.empty() ? 0u : v[0];
    };

    for (std::uint16_t e = 0; e < entries; ++e) {
        const std::size_t at = ifd + 2 + static_cast<std::size_t>(e) * 12;
        switch (rd.u16(at)) {
        case 256: width = first_value(at); break;
        case 257: height = first_value(at); break;
        case 258: bits = first_value(at); break;
        case 259: compression = first_value(at); break;
        case 262: photometric = first_value(at); break;
        case 273: read_values(at, strip_offsets); break;
        case 277: samples = first_value(at); break;
        case 278: rows_per_strip = first_value(at); break;
        case 279: read_values(at, strip_counts); break;
        default: break;
        }
    }
    if (compression != 1) throw io_error(path + ": only uncompressed TIFF is supported");
    if (bits != 8 || samples != 1)
        throw io_error(path + ": only 8-bit grayscale TIFF is supported");
    if (width < 1 || height < 1 || strip_offsets.empty())
        throw io_error(path + ": bad TIFF layout");

    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    const std::size_t total = static_cast<std::size_t>(width) * height;
    std::size_t written = 0;
    for (std::size_t s = 0; s < strip_offsets.size() && written < total; ++s) {
        const std::size_t off = strip_offsets[s];
        const std::size_t len = s < strip_counts.size()
                                    ? strip_counts[s]
                                    : std::min<std::size_t>(total - written,
                                                            static_cast<std::size_t>(rows_per_strip) * width);
        if (off + len > data.size()) throw io_error(path + ": truncated TIFF");
        const std::size_t n = std::min(len, total - written);
        std::copy(data.begin() + static_cast<std::ptrdiff_t>(off),
                  data.begin() + static_cast<std::ptrdiff_t>(off + n),
                  img.data().begin() + static_cast<std::ptrdiff_t>(written));
        written += n;
    }
    if (written < total) throw io_error(path + ": truncated TIFF");
    if (photometric == 0)
        for (std::uint8_t& v : img.data()) v = static_cast<std::uint8_t>(255 - v);
    return img;
}

// ---------------------------------------------------------------------------
// CSV label grids

LabelMap read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::vector<std::vector<std::uint16_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::uint16_t> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            const long v = std::strtol(field.c_str(), nullptr, 10);
            if (v < 0 || v > 65535) throw io_error(path + ": label out of range");
            row.push_back(static_cast<std::uint16_t>(v));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw io_error(path + ": ragged CSV grid");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw io_error(path + ": empty CSV grid");
    LabelMap map(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            map.set(x, y, rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]);
    return map;
}

void write_labels_csv(const std::string& path, const LabelMap& labels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open " + path + " for writing");
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            if (x) out << ',';
            out << labels.at(x, y);
        }
        out << '\n';
    }
    if (!out) throw io_error("write failure on " + path);
}

bool is_png(const std::vector<unsigned char>& d) {
    return d.size() >= 8 && std::memcmp(d.data(), png_signature, 8) == 0;
}
bool is_pgm(const std::vector<unsigned char>& d) {
    return d.size() >= 2 && d[0] == 'P' && (d[1] == '2' || d[1] == '5');
}
bool is_tiff(const std::vector<unsigned char>& d) {
    return d.size() >= 4 && ((d[0] == 'I' && d[1] == 'I' && d[2] == 42 && d[3] == 0) ||
                             (d[0] == 'M' && d[1] == 'M' && d[2] == 0 && d[3] == 42));
}

} // namespace

GrayImage read_gray(const std::string& path) {
    const std::vector<unsigned char> data = read_file(path);
    if (is_png(data)) {
        const PngImage png = read_png(path, data);
        GrayImage img(png.width, png.height);
        const std::size_t n = static_cast<std::size_t>(png.width) * png.height;
        if (png.color_type == 0 && png.bit_depth == 8) {
            std::copy(png.samples.begin(), png.samples.end(), img.data().begin());
        } else if (png.color_type == 0) { // 16-bit: keep the high byte
            for (std::size_t i = 0; i < n; ++i) img.data()[i] = png.samples[2 * i];
        } else { // RGB -> Rec.601 luma
            for (std::size_t i = 0; i < n; ++i) {
                const double r = png.samples[3 * i], g = png.samples[3 * i + 1],
                             b = png.samples[3 * i + 2];
                img.data()[i] =
                    static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
            }
        }
        return img;
    }
    if (is_pgm(data)) {
        const PgmImage pgm = read_pgm(path, data);
        GrayImage img(pgm.width, pgm.height);
        for (std::size_t i = 0; i < pgm.values.size(); ++i) {
            const std::uint32_t v = pgm.values[i];
            img.data()[i] = static_cast<std::uint8_t>(
                pgm.maxval > 255 ? v * 255u / static_cast<std::uint32_t>(pgm.maxval)
                                 : std::min<std::uint32_t>(v, 255));
        }
        return img;
    }
    if (is_tiff(data)) return read_tiff_gray(path, data);
    throw io_error(path + ": unrecognized image format");
}

LabelMap read_labels(const std::string& path) {
    if (lower_extension(path) == "csv") return read_labels_csv(path);
    const std::vector<unsigned char> data = read_file(path);
    if (is_png(data)) {
        const PngImage png = read_png(path, data);
        if (png.color_type != 0) throw io_error(path + ": label maps must be grayscale");
        LabelMap map(png.width, png.height);
        const std::size_t n = static_cast<std::size_t>(png.width) * png.height;
        for (std::size_t i = 0; i < n; ++i) {
            map.data()[i] = png.bit_depth == 16
                                ? static_cast<std::uint16_t>((png.samples[2 * i] << 8) |
                                                             png.samples[2 * i + 1])
                                : png.samples[i];
        }
        return map;
    }
    if (is_pgm(data)) {
        const PgmImage pgm = read_pgm(path, data);
        LabelMap map(pgm.width, pgm.height);
        for (std::size_t i = 0; i < pgm.values.size(); ++i)
            map.data()[i] = static_cast<std::uint16_t>(pgm.values[i]);
        return map;
    }
    throw io_error(path + ": unrecognized label map format");
}

BinaryMask read_mask(const std::string& path, int threshold) {
    const GrayImage img = read_gray(path);
    if (threshold < 0) {
        std::uint8_t high = 0;
        for (std::uint8_t v : img.data()) {
            if (v == 0) continue;
            if (high == 0) high = v;
            if (v != high)
                throw io_error(path + ": image is not binary (pass an explicit threshold)");
        }
        threshold = 0;
    }
    BinaryMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            mask.set(x, y, img.at(x, y) > threshold);
    return mask;
}

void write_gray(const std::string& path, const GrayImage& image) {
    const std::string ext = lower_extension(path);
    if (ext == "pgm") {
        std::vector<std::uint32_t> values(image.data().begin(), image.data().end());
        write_pgm(path, image.width(), image.height(), 255, values);
        return;
    }
    std::vector<unsigned char> samples(image.data().begin(), image.data().end());
    write_png(path, image.width(), image.height(), 8, 0, samples);
}

void write_labels(const std::string& path, const LabelMap& labels) {
    const std::string ext = lower_extension(path);
    if (ext == "csv") {
        write_labels_csv(path, labels);
        return;
    }
    if (ext == "pgm") {
        std::vector<std::uint32_t> values(labels.data().begin(), labels.data().end());
        write_pgm(path, labels.width(), labels.height(), 65535, values);
        return;
    }
    std::vector<unsigned char> samples;
    samples.reserve(labels.data().size() * 2);
    for (std::uint16_t v : labels.data()) {
        samples.push_back(static_cast<unsigned char>(v >> 8));
        samples.push_back(static_cast<unsigned char>(v & 0xff));
    }
    write_png(path, labels.width(), labels.height(), 16, 0, samples);
}

void write_rgb_png(const std::string& path, const RgbImage& image) {
    std::vector<unsigned char> samples(image.data().begin(), image.data().end());
    write_png(path, image.width(), image.height(), 8, 2, samples);
}

} // namespace clumpsplit
