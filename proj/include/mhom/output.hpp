#pragma once

// Locale-independent number formatting and all-or-nothing output directories.

#include <filesystem>
#include <string>
#include <vector>

namespace mhom {

/// Shortest-form double with 17 significant digits ('.' decimal, no locale).
std::string format_double(double v);

/// Collects files in a directory and publishes them together. Files are
/// written as hidden temporaries; commit() renames them into place. If the
/// transaction is destroyed before commit, the temporaries are removed and
/// so is any file that commit() had already renamed.
class OutputTransaction {
 public:
  explicit OutputTransaction(std::filesystem::path dir);
  ~OutputTransaction();
  OutputTransaction(const OutputTransaction &) = delete;
  OutputTransaction &operator=(const OutputTransaction &) = delete;

  void write(const std::string &name, const std::string &content);
  void commit();
  const std::filesystem::path &dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;  // tmp, final
  std::vector<std::filesystem::path> published_;
  bool committed_ = false;
};

}  // namespace mhom
