#pragma once

// Structured-text run reports. Everything before the [timing] section is a
// deterministic function of (config, seed); tests compare reports byte-wise
// after stripping that section.

#include <sstream>
#include <string>
#include <vector>

namespace cusp {

class Report {
 public:
  void kv(const std::string& key, const std::string& value) {
    body_ << key << " = " << value << "\n";
  }
  void kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }
  void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
  void kv(const std::string& key, bool value) { kv(key, std::string(value ? "true" : "false")); }

  void section(const std::string& name) { body_ << "\n[" << name << "]\n"; }

  void raw(const std::string& text) { body_ << text; }
  void line(const std::string& text) { body_ << text << "\n"; }

  // CSV table block; header first, then one row per call.
  void table(const std::string& name, const std::vector<std::string>& columns) {
    section("table " + name);
    for (std::size_t i = 0; i < columns.size(); ++i) body_ << (i ? "," : "") << columns[i];
    body_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
    body_ << "\n";
  }

  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

/// Portion of a report that must be byte-identical across reruns.
inline std::string deterministic_part(const std::string& report) {
  auto pos = report.find("\n[timing]");
  return pos == std::string::npos ? report : report.substr(0, pos);
}

}  // namespace cusp
