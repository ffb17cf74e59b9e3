#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logtax/core_model.hpp"

namespace logtax {

/// Layout of one labeled log line: `headerFieldCount` whitespace-separated
/// header fields (one of which is the label) followed by free-text content.
struct DatasetFormat {
  std::string name = "generic";
  std::size_t headerFieldCount = 1;
  std::size_t labelField = 0;
  std::string normalLabelToken = "-";

  void validate() const;
};

/// Shipped presets: "bgl", "thunderbird", "spirit", "generic".
///
/// The Thunderbird and Spirit presets keep the syslog component
/// ("kernel:", "sshd(pam_unix)[123]:") as the first content token. When a
/// `--limit` is given it counts emitted records, so malformed lines are
/// skipped without shortening the slice; published 5M-line slices may have
/// been cut by physical line instead, which can shift counts slightly.
DatasetFormat dataset_preset(std::string_view name);
std::vector<std::string> preset_names();

struct ReadSummary {
  std::size_t linesRead = 0;
  std::size_t recordsEmitted = 0;
  std::size_t malformedLines = 0;
  std::vector<std::size_t> malformedSamples;  // first few 1-based line numbers
};

struct DatasetReadResult {
  LabeledCorpus corpus;
  ReadSummary summary;
};

/// Splits one line per `format`. Returns nullopt when the line has fewer
/// than headerFieldCount fields. The returned record has index 0.
std::optional<LogRecord> parse_line(std::string_view line, const DatasetFormat& format);

/// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

/// Streams a plain or gzip-compressed log file. At most `limit` records are
/// emitted; malformed lines are counted and skipped.
DatasetReadResult read_dataset(const std::filesystem::path& path, const DatasetFormat& format,
                               std::optional<std::size_t> limit = std::nullopt);

/// Same as read_dataset but from an already open stream.
DatasetReadResult read_dataset(std::istream& in, const DatasetFormat& format,
                               std::optional<std::size_t> limit = std::nullopt);

}  // namespace logtax
