#include "logtax/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <memory>
#include <string>

#include "logtax/error.hpp"

namespace logtax {

namespace {

constexpr std::size_t kMalformedSamples = 5;

bool is_space(char c) { return c == ' ' || c == '\t'; }

struct PresetEntry {
  std::string_view name;
  std::size_t headerFields;
};

// label + header fields before the content:
//   bgl:         label epoch date node time node type component level
//   thunderbird: label epoch date host month day time location
//   spirit:      same layout as thunderbird
constexpr std::array kPresets = {
    PresetEntry{"bgl", 9},
    PresetEntry{"thunderbird", 8},
    PresetEntry{"spirit", 8},
    PresetEntry{"generic", 1},
};

class RecordSink {
 public:
  RecordSink(const DatasetFormat& format, std::optional<std::size_t> limit)
      : format_(format), limit_(limit) {}

  bool full() const { return limit_ && records_.size() >= *limit_; }

  void accept(std::string_view line) {
    ++summary_.linesRead;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::optional<LogRecord> record;
    if (std::all_of(line.begin(), line.end(),
                    [](char c) { return static_cast<unsigned char>(c) < 0x80; })) {
      record = parse_line(line, format_);
    } else {
      record = parse_line(sanitize_utf8(line), format_);
    }

    if (!record) {
      ++summary_.malformedLines;
      if (summary_.malformedSamples.size() < kMalformedSamples)
        summary_.malformedSamples.push_back(summary_.linesRead);
      return;
    }
    record->index = records_.size() + 1;
    records_.push_back(std::move(*record));
  }

  DatasetReadResult finish() && {
    summary_.recordsEmitted = records_.size();
    return {split_corpus(std::move(records_)), summary_};
  }

 private:
  const DatasetFormat& format_;
  std::optional<std::size_t> limit_;
  std::vector<LogRecord> records_;
  ReadSummary summary_;
};

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};

}  // namespace

void DatasetFormat::validate() const {
  if (headerFieldCount < 1) throw ValidationError("format '" + name + "': headerFieldCount must be >= 1");
  if (labelField >= headerFieldCount)
    throw ValidationError("format '" + name + "': labelField must be < headerFieldCount");
  if (normalLabelToken.empty()) throw ValidationError("format '" + name + "': empty normal label token");
}

DatasetFormat dataset_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) {
      DatasetFormat f;
      f.name = std::string(p.name);
      f.headerFieldCount = p.headerFields;
      return f;
    }
  }
  throw ValidationError("unknown dataset preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::optional<LogRecord> parse_line(std::string_view line, const DatasetFormat& format) {
  LogRecord record;
  std::size_t pos = 0;
  for (std::size_t field = 0; field < format.headerFieldCount; ++field) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos == line.size()) return std::nullopt;
    std::size_t end = pos;
    while (end < line.size() && !is_space(line[end])) ++end;
    std::string_view value = line.substr(pos, end - pos);

    if (field == format.labelField) {
      record.label = value == format.normalLabelToken ? Label::Normal : Label::Anomalous;
    } else {
      if (!record.meta.empty()) record.meta += ' ';
      record.meta.append(value);
    }
    pos = end;
  }
  while (pos < line.size() && is_space(line[pos])) ++pos;
  record.content.assign(line.substr(pos));
  return record;
}

std::string sanitize_utf8(std::string_view bytes) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    auto b = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    std::uint32_t min_cp = 0;
    if (b < 0x80) {
      out += static_cast<char>(b);
      ++i;
      continue;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
    }

    bool valid = len > 0 && i + len <= bytes.size();
    std::uint32_t cp = len > 0 ? (b & (0x7F >> len)) : 0;
    for (std::size_t k = 1; valid && k < len; ++k) {
      auto c = static_cast<unsigned char>(bytes[i + k]);
      if ((c & 0xC0) != 0x80) {
        valid = false;
      } else {
        cp = (cp << 6) | (c & 0x3F);
      }
    }
    valid = valid && cp >= min_cp && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);

    if (valid) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out += kReplacement;
      ++i;
    }
  }
  return out;
}

DatasetReadResult read_dataset(const std::filesystem::path& path, const DatasetFormat& format,
                               std::optional<std::size_t> limit) {
  format.validate();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError("cannot read '" + path.string() + "': not a readable file");

  // gzopen reads uncompressed files transparently.
  std::unique_ptr<gzFile_s, GzCloser> file(gzopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open '" + path.string() + "'");
  gzbuffer(file.get(), 1 << 18);

  RecordSink sink(format, limit);
  std::string line;
  std::array<char, 1 << 16> buf{};
  while (!sink.full()) {
    char* got = gzgets(file.get(), buf.data(), static_cast<int>(buf.size()));
    if (got == nullptr) {
      int err = 0;
      const char* msg = gzerror(file.get(), &err);
      if (err != Z_OK && err != Z_BUF_ERROR)
        throw IoError("error reading '" + path.string() + "': " + msg);
      if (!line.empty()) sink.accept(line);
      break;
    }
    std::string_view chunk(got);
    if (!chunk.empty() && chunk.back() == '\n') {
      chunk.remove_suffix(1);
      if (line.empty()) {
        sink.accept(chunk);
      } else {
        line.append(chunk);
        sink.accept(line);
        line.clear();
      }
    } else {
      line.append(chunk);
    }
  }
  return std::move(sink).finish();
}

DatasetReadResult read_dataset(std::istream& in, const DatasetFormat& format,
                               std::optional<std::size_t> limit) {
  format.validate();
  RecordSink sink(format, limit);
  std::string line;
  while (!sink.full() && std::getline(in, line)) sink.accept(line);
  if (in.bad()) throw IoError("error reading input stream");
  return std::move(sink).finish();
}

}  // namespace logtax
