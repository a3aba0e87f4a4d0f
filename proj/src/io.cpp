#include "gftmark/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "gftmark/error.hpp"

namespace gftmark {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(Bytes& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
}

void put_tag(Bytes& out, std::string_view tag) { out.insert(out.end(), tag.begin(), tag.end()); }

std::string_view tag_at(std::span<const std::uint8_t> b, std::size_t at) {
  return {reinterpret_cast<const char*>(b.data() + at), 4};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

std::string status_text(const EvalResult& r) {
  switch (r.status) {
    case CellStatus::ok:
      return "ok";
    case CellStatus::skipped:
      return "skipped";
    case CellStatus::error:
      return r.message.empty() ? "error" : "error: " + r.message;
  }
  return "error";
}

// Whitespace/comment-aware tokenizer for the PBM header and P1 raster.
class PbmCursor {
 public:
  explicit PbmCursor(std::span<const std::uint8_t> bytes) : b_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') {
          ++pos_;
        }
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::size_t read_uint(const char* what) {
    skip_space_and_comments();
    std::size_t v = 0;
    std::size_t digits = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      ++pos_;
      if (++digits > 9) {
        throw FormatError(std::string("PBM: ") + what + " is too large");
      }
    }
    if (digits == 0) {
      throw FormatError(std::string("PBM: expected ") + what);
    }
    return v;
  }

  std::uint8_t read_bit() {
    skip_space_and_comments();
    if (pos_ >= b_.size()) {
      throw FormatError("PBM: raster ends early");
    }
    const std::uint8_t c = b_[pos_++];
    if (c != '0' && c != '1') {
      throw FormatError(std::string("PBM: unexpected raster character '") + static_cast<char>(c) + "'");
    }
    return c == '1' ? 1 : 0;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  bool at_space() const { return pos_ < b_.size() && std::isspace(b_[pos_]); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::int32_t quantize_sample(double x, int bits) {
  const double levels = std::ldexp(1.0, bits - 1);
  const double scaled = std::round(x * levels);
  return static_cast<std::int32_t>(std::clamp(scaled, -levels, levels - 1.0));
}

AudioClip parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || tag_at(bytes, 0) != "RIFF" || tag_at(bytes, 8) != "WAVE") {
    throw FormatError("WAV: missing RIFF/WAVE header");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string tag(tag_at(bytes, pos));
    const std::uint32_t declared = le32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;

    if (tag == "fmt ") {
      if (declared < 16 || declared > available) {
        throw FormatError("WAV: 'fmt ' chunk is truncated");
      }
      std::uint16_t format = le16(bytes, body);
      channels = le16(bytes, body + 2);
      rate = le32(bytes, body + 4);
      bits = le16(bytes, body + 14);
      if (format == kFormatExtensible && declared >= 26) {
        format = le16(bytes, body + 24);  // first two bytes of the subformat GUID
      }
      if (format != kFormatPcm) {
        throw FormatError("WAV: 'fmt ' chunk declares codec " + std::to_string(format) +
                          ", only PCM is supported");
      }
      if (bits != 16) {
        throw FormatError("WAV: 'fmt ' chunk declares " + std::to_string(bits) +
                          "-bit samples, only 16-bit is supported");
      }
      if (channels != 1 && channels != 2) {
        throw FormatError("WAV: 'fmt ' chunk declares " + std::to_string(channels) +
                          " channels, only mono and stereo are supported");
      }
      if (rate == 0) {
        throw FormatError("WAV: 'fmt ' chunk declares a zero sample rate");
      }
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) {
        throw FormatError("WAV: 'data' chunk precedes 'fmt ' chunk");
      }
      // Streaming writers leave the size as 0 or 0xFFFFFFFF; take what is there.
      std::size_t size = declared;
      if (declared == 0 || declared == 0xFFFFFFFFu || declared > available) {
        size = available;
      }
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t frames = size / frame_bytes;
      AudioClip clip;
      clip.sample_rate = rate;
      clip.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          const auto v = static_cast<std::int16_t>(le16(bytes, body + f * frame_bytes + 2 * c));
          acc += v / 32768.0;
        }
        clip.samples[f] = acc / channels;
      }
      return clip;
    }

    if (declared > available) {
      throw FormatError("WAV: '" + tag + "' chunk is truncated");
    }
    pos = body + declared + (declared & 1u);
  }
  throw FormatError(have_fmt ? "WAV: no 'data' chunk" : "WAV: no 'fmt ' chunk");
}

Bytes serialize_wav(const AudioClip& clip) {
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  Bytes out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, rate);
  put32(out, rate * 2);
  put16(out, 2);
  put16(out, 16);
  put_tag(out, "data");
  put32(out, data_bytes);
  for (double s : clip.samples) {
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(quantize_sample(s, 16))));
  }
  return out;
}

AudioClip read_wav(const std::filesystem::path& path) { return parse_wav(read_file(path)); }

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  write_file(path, serialize_wav(clip));
}

BinaryImage parse_pbm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '1' && bytes[1] != '4')) {
    throw FormatError("PBM: magic must be P1 or P4");
  }
  const bool binary = bytes[1] == '4';
  PbmCursor cur(bytes);
  cur.advance(2);
  const std::size_t width = cur.read_uint("width");
  const std::size_t height = cur.read_uint("height");
  if (width == 0 || height == 0) {
    throw FormatError("PBM: zero image dimension");
  }
  BinaryImage img(width, height);

  if (!binary) {
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        img.set(r, c, cur.read_bit() != 0);
      }
    }
    return img;
  }

  if (!cur.at_space()) {
    throw FormatError("PBM: missing whitespace before P4 raster");
  }
  cur.advance(1);
  const std::size_t row_bytes = (width + 7) / 8;
  if (bytes.size() - cur.pos() < row_bytes * height) {
    throw FormatError("PBM: P4 raster ends early");
  }
  const std::uint8_t* raster = bytes.data() + cur.pos();
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::uint8_t byte = raster[r * row_bytes + c / 8];
      img.set(r, c, ((byte >> (7 - c % 8)) & 1u) != 0);
    }
  }
  return img;
}

Bytes serialize_pbm(const BinaryImage& img, PbmFormat format) {
  std::ostringstream os;
  os << (format == PbmFormat::binary ? "P4\n" : "P1\n") << img.width() << ' ' << img.height() << '\n';
  std::string header = os.str();
  Bytes out(header.begin(), header.end());
  if (format == PbmFormat::binary) {
    const std::size_t row_bytes = (img.width() + 7) / 8;
    for (std::size_t r = 0; r < img.height(); ++r) {
      std::vector<std::uint8_t> row(row_bytes, 0);
      for (std::size_t c = 0; c < img.width(); ++c) {
        if (img.at(r, c)) {
          row[c / 8] |= static_cast<std::uint8_t>(0x80u >> (c % 8));
        }
      }
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (c != 0) {
        out.push_back(' ');
      }
      out.push_back(img.at(r, c) ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

BinaryImage read_pbm(const std::filesystem::path& path) { return parse_pbm(read_file(path)); }

void write_pbm(const BinaryImage& img, const std::filesystem::path& path, PbmFormat format) {
  write_file(path, serialize_pbm(img, format));
}

Bytes serialize_key(const BitSequence& key, std::size_t k) {
  if (k > 255) {
    throw std::invalid_argument("key file stores k in one byte; k=" + std::to_string(k));
  }
  if (key.size() > 0xFFFFFFFFu) {
    throw std::invalid_argument("key too long for the key file format");
  }
  const auto m = static_cast<std::uint32_t>(key.size());
  Bytes out{'G', 'Z', 'W', 'K', kKeyFileVersion};
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>((m >> shift) & 0xFF));
  }
  out.push_back(static_cast<std::uint8_t>(k));
  Bytes payload((key.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i]) {
      payload[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
  }
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

WatermarkKey parse_key(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 10;
  if (bytes.size() < kHeader) {
    throw FormatError("key file: truncated header");
  }
  if (tag_at(bytes, 0) != "GZWK") {
    throw FormatError("key file: bad magic");
  }
  if (bytes[4] != kKeyFileVersion) {
    throw FormatError("key file: unsupported version " + std::to_string(bytes[4]));
  }
  const std::uint32_t m = (static_cast<std::uint32_t>(bytes[5]) << 24) |
                          (static_cast<std::uint32_t>(bytes[6]) << 16) |
                          (static_cast<std::uint32_t>(bytes[7]) << 8) | bytes[8];
  const std::size_t payload = (static_cast<std::size_t>(m) + 7) / 8;
  if (bytes.size() < kHeader + payload) {
    throw FormatError("key file: truncated payload (" + std::to_string(bytes.size() - kHeader) +
                      " of " + std::to_string(payload) + " bytes)");
  }
  if (bytes.size() > kHeader + payload) {
    throw FormatError("key file: trailing bytes after payload");
  }
  WatermarkKey key{BitSequence(m), bytes[9]};
  for (std::size_t i = 0; i < payload * 8; ++i) {
    const bool bit = ((bytes[kHeader + i / 8] >> (7 - i % 8)) & 1u) != 0;
    if (i < m) {
      key.bits.set(i, bit);
    } else if (bit) {
      throw FormatError("key file: nonzero padding bits");
    }
  }
  return key;
}

void write_key(const BitSequence& key, std::size_t k, const std::filesystem::path& path) {
  write_file(path, serialize_key(key, k));
}

WatermarkKey read_key(const std::filesystem::path& path) { return parse_key(read_file(path)); }

std::string format_report(std::span<const EvalResult> results) {
  std::string out = "clip,attack,parameters,ber,nc,status\n";
  std::vector<std::string> attacks;
  for (const EvalResult& r : results) {
    if (std::find(attacks.begin(), attacks.end(), r.attack) == attacks.end()) {
      attacks.push_back(r.attack);
    }
    const bool ok = r.status == CellStatus::ok;
    out += csv_field(r.clip) + ',' + csv_field(r.attack) + ',' + csv_field(r.parameters) + ',' +
           (ok ? format_double(r.ber) : "") + ',' + (ok ? format_double(r.nc) : "") + ',' +
           csv_field(status_text(r)) + '\n';
  }
  for (const std::string& attack : attacks) {
    double ber = 0.0;
    double nc = 0.0;
    std::size_t n = 0;
    std::string parameters;
    for (const EvalResult& r : results) {
      if (r.attack != attack) {
        continue;
      }
      parameters = r.parameters;
      if (r.status == CellStatus::ok) {
        ber += r.ber;
        nc += r.nc;
        ++n;
      }
    }
    out += "mean," + csv_field(attack) + ',' + csv_field(parameters) + ',';
    if (n == 0) {
      out += ",,skipped\n";
    } else {
      out += format_double(ber / static_cast<double>(n)) + ',' +
             format_double(nc / static_cast<double>(n)) + ",ok\n";
    }
  }
  return out;
}

void write_report(std::span<const EvalResult> results, const std::filesystem::path& path) {
  if (results.empty()) {
    throw std::invalid_argument("write_report: no results");
  }
  const std::string text = format_report(results);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_feature_traces(const std::filesystem::path& path, std::span<const std::string> labels,
                          std::span<const std::vector<double>> traces) {
  if (labels.size() != traces.size()) {
    throw DimensionError("write_feature_traces: label/trace count mismatch");
  }
  std::size_t rows = 0;
  for (const auto& t : traces) {
    rows = std::max(rows, t.size());
  }
  std::string out = "frame";
  for (const auto& l : labels) {
    out += ',' + csv_field(l);
  }
  out += '\n';
  char buf[40];
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i);
    for (const auto& t : traces) {
      out += ',';
      if (i < t.size()) {
        std::snprintf(buf, sizeof buf, "%.10g", t[i]);
        out += buf;
      }
    }
    out += '\n';
  }
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(out.data()), out.size()));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace gftmark
