#include <charconv>
#include <fstream>
#include <sstream>

#include "io_util.hpp"
#include "ringshift/imageio.hpp"

namespace ringshift {

namespace {

constexpr std::string_view kHeader = "k,criterion_value,entropy_after";
constexpr std::string_view kStoppedPrefix = "# stopped: ";

// Shortest representation that parses back to the identical double.
std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ImageIoError(IoErrorKind::MalformedPixel, "trace line " + std::to_string(line_no) +
                                                        ": cannot parse '" + std::string(field) +
                                                        "'");
  }
  return value;
}

} // namespace

std::string format_trace_csv(const IterationTrace& trace) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& e : trace.entries) {
    out += std::to_string(e.k) + "," + format_real(e.criterion_value) + "," +
           format_real(e.entropy_after) + "\n";
  }
  out += kStoppedPrefix;
  out += to_string(trace.stopped_reason);
  out += '\n';
  return out;
}

void write_trace_csv(const IterationTrace& trace, const std::filesystem::path& path) {
  if (trace.entries.empty()) {
    throw DomainError("refusing to write an empty iteration trace");
  }
  detail::write_file(path, format_trace_csv(trace));
}

IterationTrace parse_trace_csv(std::string_view text) {
  IterationTrace trace;
  bool saw_header = false;
  bool saw_reason = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (!saw_header) {
      if (line != kHeader) {
        throw ImageIoError(IoErrorKind::MalformedHeader,
                           "trace header must be '" + std::string(kHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.starts_with(kStoppedPrefix)) {
      const std::string_view reason = line.substr(kStoppedPrefix.size());
      if (reason == to_string(StopReason::ThresholdMet)) {
        trace.stopped_reason = StopReason::ThresholdMet;
      } else if (reason == to_string(StopReason::MaxItersReached)) {
        trace.stopped_reason = StopReason::MaxItersReached;
      } else {
        throw ImageIoError(IoErrorKind::MalformedPixel,
                           "trace line " + std::to_string(line_no) + ": unknown stop reason");
      }
      saw_reason = true;
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw ImageIoError(IoErrorKind::MalformedPixel,
                         "trace line " + std::to_string(line_no) + ": expected three fields");
    }
    trace.entries.push_back({parse_field<int>(line.substr(0, c1), line_no),
                             parse_field<double>(line.substr(c1 + 1, c2 - c1 - 1), line_no),
                             parse_field<double>(line.substr(c2 + 1), line_no)});
  }
  if (!saw_header || !saw_reason) {
    throw ImageIoError(IoErrorKind::MalformedHeader, "trace is missing its header or stop line");
  }
  return trace;
}

IterationTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ImageIoError(IoErrorKind::UnreadableFile, path.string() + ": cannot open for reading");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_trace_csv(buffer.str());
}

} // namespace ringshift
