#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "epkit/rational.hpp"

namespace epkit::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kDomain = 3;
inline constexpr int kNonConvergence = 4;

// Shortest representation that reads back to the same double; "nan",
// "inf", "-inf" for non-finite values.  Locale independent.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  // Fields containing a comma, quote or newline are quoted.
  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return header_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::string body_;
};

// Writes to a temporary file next to `path`, then renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct Provenance {
  std::string command;
  std::string model;
  std::map<std::string, std::string> flags;  // canonical flag values
  std::uint64_t seed = 42;
  Precision precision = Precision::Double;
};

nlohmann::json provenance_json(const Provenance& p);
std::string version();

// Runs one command.  args[0] is the program name.  Help and errors go to
// `out` and `err`; data goes to files, or to `out` when no --out is given.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace epkit::cli
