#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcnalign {

// Declarative "key = value" text. '#' starts a comment, blank lines are
// ignored, keys may repeat (get_all returns them in file order).
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::string_view text, std::string source = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  void add(std::string key, std::string value);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  // Keys that start with `prefix`, in file order, without duplicates.
  std::vector<std::string> keys_with_prefix(std::string_view prefix) const;

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  std::string to_string() const;

 private:
  std::vector<Entry> entries_;
  std::string source_;
};

// Comma separated, whitespace trimmed.
std::vector<std::string> split_list(std::string_view value);
std::string_view trim(std::string_view s);

}  // namespace gcnalign
