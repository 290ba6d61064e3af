#include "gcnalign/config_file.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gcnalign/error.h"

namespace gcnalign {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto end = comma == std::string_view::npos ? value.size() : comma;
    const auto item = trim(value.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile file;
  file.source_ = std::move(source);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCategory::kConfig, file.source_ + ":" + std::to_string(line_no) +
                                       ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail(ErrorCategory::kConfig,
           file.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    file.entries_.push_back({std::string(key), std::string(value), line_no});
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

void KeyValueFile::set(std::string key, std::string value) {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const Entry& e) { return e.key == key; }),
                 entries_.end());
  entries_.push_back({std::move(key), std::move(value), 0});
}

void KeyValueFile::add(std::string key, std::string value) {
  entries_.push_back({std::move(key), std::move(value), 0});
}

bool KeyValueFile::contains(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.key == key; });
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  std::optional<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out = e.value;  // last one wins
  }
  return out;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e.value);
  }
  return out;
}

std::vector<std::string> KeyValueFile::keys_with_prefix(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key.starts_with(prefix) &&
        std::find(out.begin(), out.end(), e.key) == out.end()) {
      out.push_back(e.key);
    }
  }
  return out;
}

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + " = " + e.value + "\n";
  return out;
}

}  // namespace gcnalign
