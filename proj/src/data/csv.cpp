#include "daelstm/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "daelstm/errors.hpp"

namespace daelstm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, const std::string& where) {
  double v = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw DataError("non-numeric cell '" + std::string(cell) + "' at " + where);
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

MotionSequence load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open motion file " + path.string());
  MotionSequence seq;
  std::vector<double> values;
  std::size_t width = 0;
  bool have_header = false;
  std::size_t frames = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      if (body.starts_with("fps=")) {
        seq.fps = parse_number(trim(body.substr(4)), where);
        if (!(seq.fps > 0.0)) throw DataError("fps must be positive at " + where);
      } else if (body.starts_with("label=")) {
        seq.label = static_cast<int>(parse_number(trim(body.substr(6)), where));
      }
      continue;
    }
    const auto cells = split(line);
    if (!have_header) {
      have_header = true;
      width = cells.size();
      continue;
    }
    if (cells.size() != width) {
      throw DataError("ragged row at " + where + ": " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(width));
    }
    for (const auto cell : cells) values.push_back(parse_number(cell, where));
    ++frames;
  }
  if (!have_header) throw DataError("missing header row in " + path.string());
  if (frames == 0) throw DataError("empty sequence in " + path.string());
  seq.frames = Matrix(frames, width, std::move(values));
  return seq;
}

std::string to_csv_string(const MotionSequence& seq, const std::vector<std::string>& names) {
  std::string out = "# fps=";
  out += format_number(seq.fps);
  out += '\n';
  if (seq.label) out += "# label=" + std::to_string(*seq.label) + "\n";
  for (std::size_t c = 0; c < seq.dims(); ++c) {
    if (c) out += ',';
    out += names.empty() ? "f" + std::to_string(c) : names.at(c);
  }
  out += '\n';
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const auto row = seq.frames.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const std::filesystem::path& path, const MotionSequence& seq,
              const std::vector<std::string>& names) {
  if (!names.empty() && names.size() != seq.dims()) {
    throw ShapeError("save_csv: header has " + std::to_string(names.size()) + " names for " +
                     std::to_string(seq.dims()) + " features");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_csv_string(seq, names);
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<std::filesystem::path> list_csv_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace daelstm
