#include <fstream>
#include <sstream>

#include "plcmine/errors.hpp"
#include "plcmine/event_log.hpp"

namespace plcmine {

namespace {
constexpr std::string_view kHeader = "tick,address,value,class";
}

void write_io_log(std::span<const IOSample> samples, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& s : samples)
    out << s.tick << ',' << s.address << ',' << (s.value ? "true" : "false") << ','
        << to_string(s.cls) << '\n';
}

void write_io_log(std::span<const IOSample> samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_io_log(samples, out);
}

std::vector<IOSample> read_io_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw ParseError("io log line 1: expected header '" + std::string(kHeader) + "'");
  std::vector<IOSample> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    const auto where = "io log line " + std::to_string(lineno) + ": ";
    if (fields.size() != 4) throw ParseError(where + "expected 4 fields");
    IOSample s;
    try {
      std::size_t used = 0;
      s.tick = std::stoll(fields[0], &used);
      if (used != fields[0].size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError(where + "bad tick '" + fields[0] + "'");
    }
    s.address = fields[1];
    if (fields[2] == "true")
      s.value = true;
    else if (fields[2] != "false")
      throw ParseError(where + "bad value '" + fields[2] + "'");
    try {
      s.cls = parse_signal_class(fields[3]);
    } catch (const ParseError&) {
      throw ParseError(where + "bad class '" + fields[3] + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<IOSample> read_io_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_io_log(in);
}

}  // namespace plcmine
